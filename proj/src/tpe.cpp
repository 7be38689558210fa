#include "nml/tpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "nml/errors.hpp"

namespace nml {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

/// Gaussian KDE with Silverman bandwidth, floored against degenerate groups.
struct Kde {
    std::vector<double> points;
    double bandwidth = 1.0;

    Kde(std::vector<double> pts, double range) : points(std::move(pts)) {
        const std::size_t n = points.size();
        if (n == 0) {
            bandwidth = range / 4.0;
            return;
        }
        double mean = 0.0;
        for (double p : points) mean += p;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double p : points) var += (p - mean) * (p - mean);
        var /= static_cast<double>(n);
        double silverman = 0.9 * std::sqrt(var) * std::pow(static_cast<double>(n), -0.2);
        bandwidth = std::max({silverman, 0.05 * range, 1e-12});
    }

    double density(double x) const {
        if (points.empty()) return 1e-12;
        double s = 0.0;
        for (double p : points) {
            double z = (x - p) / bandwidth;
            s += std::exp(-0.5 * z * z);
        }
        return std::max(1e-300, s * kInvSqrt2Pi / (bandwidth * static_cast<double>(points.size())));
    }
};

/// Add-one-smoothed category frequencies.
struct CategoryModel {
    std::map<int, double> prob;

    CategoryModel(const std::vector<int>& observed, const std::vector<int>& domain) {
        std::map<int, int> counts;
        for (int d : domain) counts[d] = 0;
        for (int o : observed) counts[o] += 1;
        double total = static_cast<double>(observed.size() + domain.size());
        for (int d : domain) prob[d] = (counts[d] + 1.0) / total;
    }

    double density(int x) const {
        auto it = prob.find(x);
        return it == prob.end() ? 1e-12 : it->second;
    }

    int sample(Rng& rng) const {
        double u = rng.uniform();
        double acc = 0.0;
        int last = prob.begin()->first;
        for (const auto& [v, p] : prob) {
            acc += p;
            last = v;
            if (u < acc) return v;
        }
        return last;
    }
};

Hyperparams random_draw(const HpSpace& space, Rng& rng) {
    Hyperparams hp;
    hp.units = space.units[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(space.units.size()) - 1))];
    hp.dropout = rng.uniform(space.dropout.first, space.dropout.second);
    hp.lookback = space.lookback[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(space.lookback.size()) - 1))];
    double loglr = rng.uniform(std::log(space.learning_rate.first), std::log(space.learning_rate.second));
    hp.learning_rate =
        std::clamp(std::exp(loglr), space.learning_rate.first, space.learning_rate.second);
    hp.optimizer = space.optimizers[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(space.optimizers.size()) - 1))];
    hp.batch_size = space.batch_sizes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(space.batch_sizes.size()) - 1))];
    return hp;
}

std::vector<int> optimizer_domain(const HpSpace& space) {
    std::vector<int> d;
    for (auto o : space.optimizers) d.push_back(static_cast<int>(o));
    return d;
}

} // namespace

Hyperparams tpe_search(const HpSpace& space,
                       const std::function<double(const Hyperparams&)>& objective,
                       const TpeOptions& options, Rng& rng, std::vector<TpeTrial>* history) {
    if (options.trials < 10) throw DataError("tpe_search: need at least 10 trials");

    std::vector<TpeTrial> trials;
    trials.reserve(static_cast<std::size_t>(options.trials));

    auto run_trial = [&](const Hyperparams& hp) {
        TpeTrial t;
        t.hp = hp;
        try {
            t.loss = objective(hp);
            t.ok = std::isfinite(t.loss);
            if (!t.ok) t.error = "non-finite loss";
        } catch (const std::exception& e) {
            t.ok = false;
            t.error = e.what();
        }
        trials.push_back(t);
    };

    for (int i = 0; i < options.trials; ++i) {
        std::vector<const TpeTrial*> ok;
        for (const auto& t : trials)
            if (t.ok) ok.push_back(&t);

        if (i < options.warmup || ok.size() < 2) {
            run_trial(random_draw(space, rng));
            continue;
        }

        // Split at the gamma loss quantile.
        std::sort(ok.begin(), ok.end(),
                  [](const TpeTrial* a, const TpeTrial* b) { return a->loss < b->loss; });
        std::size_t n_good = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(options.gamma * static_cast<double>(ok.size()))));
        if (n_good >= ok.size()) n_good = ok.size() - 1;

        std::vector<double> good_drop, bad_drop, good_lr, bad_lr;
        std::vector<int> good_units, bad_units, good_lb, bad_lb, good_opt, bad_opt, good_bs, bad_bs;
        for (std::size_t k = 0; k < ok.size(); ++k) {
            const Hyperparams& hp = ok[k]->hp;
            bool good = k < n_good;
            (good ? good_drop : bad_drop).push_back(hp.dropout);
            (good ? good_lr : bad_lr).push_back(std::log(hp.learning_rate));
            (good ? good_units : bad_units).push_back(hp.units);
            (good ? good_lb : bad_lb).push_back(hp.lookback);
            (good ? good_opt : bad_opt).push_back(static_cast<int>(hp.optimizer));
            (good ? good_bs : bad_bs).push_back(hp.batch_size);
        }

        const double drop_range = space.dropout.second - space.dropout.first;
        const double lr_range = std::log(space.learning_rate.second) - std::log(space.learning_rate.first);
        Kde g_drop(good_drop, drop_range), b_drop(bad_drop, drop_range);
        Kde g_lr(good_lr, lr_range), b_lr(bad_lr, lr_range);
        CategoryModel g_units(good_units, space.units), b_units(bad_units, space.units);
        CategoryModel g_lb(good_lb, space.lookback), b_lb(bad_lb, space.lookback);
        CategoryModel g_opt(good_opt, optimizer_domain(space)), b_opt(bad_opt, optimizer_domain(space));
        CategoryModel g_bs(good_bs, space.batch_sizes), b_bs(bad_bs, space.batch_sizes);

        Hyperparams best_cand;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < options.candidates; ++c) {
            Hyperparams cand;
            // Draw from the good model: jittered resample for continuous dims.
            std::size_t pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(good_drop.size()) - 1));
            cand.dropout = std::clamp(rng.normal(good_drop[pick], g_drop.bandwidth),
                                      space.dropout.first, space.dropout.second);
            pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(good_lr.size()) - 1));
            double loglr = std::clamp(rng.normal(good_lr[pick], g_lr.bandwidth),
                                      std::log(space.learning_rate.first),
                                      std::log(space.learning_rate.second));
            cand.learning_rate = std::clamp(std::exp(loglr), space.learning_rate.first,
                                            space.learning_rate.second);
            cand.units = g_units.sample(rng);
            cand.lookback = g_lb.sample(rng);
            cand.optimizer = static_cast<OptimizerKind>(g_opt.sample(rng));
            cand.batch_size = g_bs.sample(rng);

            double score = std::log(g_drop.density(cand.dropout)) - std::log(b_drop.density(cand.dropout));
            score += std::log(g_lr.density(loglr)) - std::log(b_lr.density(loglr));
            score += std::log(g_units.density(cand.units)) - std::log(b_units.density(cand.units));
            score += std::log(g_lb.density(cand.lookback)) - std::log(b_lb.density(cand.lookback));
            score += std::log(g_opt.density(static_cast<int>(cand.optimizer))) -
                     std::log(b_opt.density(static_cast<int>(cand.optimizer)));
            score += std::log(g_bs.density(cand.batch_size)) - std::log(b_bs.density(cand.batch_size));
            if (score > best_score) {
                best_score = score;
                best_cand = cand;
            }
        }
        run_trial(best_cand);
    }

    const TpeTrial* best = nullptr;
    for (const auto& t : trials)
        if (t.ok && (!best || t.loss < best->loss)) best = &t;
    if (history) *history = trials;
    if (!best) throw NumericError("tpe_search: all trials failed (last: " + trials.back().error + ")");
    return best->hp;
}

} // namespace nml
