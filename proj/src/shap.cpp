#include "nml/shap.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <set>

#include "nml/errors.hpp"

namespace nml {

namespace {

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

struct Coalition {
    std::vector<std::uint8_t> mask; // length M
    double weight = 0.0;
};

/// Next combination in lexicographic order; `idx` holds k member indices.
bool next_combination(std::vector<int>& idx, int m) {
    int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < m - k + i) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

} // namespace

ShapExplanation kernel_shap(const BatchPredictFn& predict,
                            const std::vector<Eigen::MatrixXd>& background,
                            const Eigen::MatrixXd& x, int nsamples, Rng& rng) {
    if (background.empty()) throw DataError("kernel_shap: empty background set");
    const int L = static_cast<int>(x.rows());
    const int N = static_cast<int>(x.cols());
    const int M = L * N;
    if (nsamples < 2 * M + 2)
        throw DataError("kernel_shap: nsamples must be at least 2M+2 = " +
                        std::to_string(2 * M + 2));
    for (const auto& b : background)
        if (b.rows() != L || b.cols() != N)
            throw DataError("kernel_shap: background window shape mismatch");

    const std::size_t B = background.size();

    Eigen::VectorXd bg_pred = predict(background);
    const double phi0 = bg_pred.mean();
    const double fx = predict({x})(0);

    if (M == 1) {
        // Single player: additivity pins the whole attribution.
        ShapExplanation out;
        out.phi.resize(1, 1);
        out.phi(0, 0) = fx - phi0;
        out.phi0 = phi0;
        out.coalitions = 0;
        return out;
    }

    // --- coalition plan ------------------------------------------------
    // Sizes in order of total kernel mass W(s) = (M-1)/(s(M-s)): 1, M-1, 2, ...
    // Fully enumerated sizes use exact per-coalition weights; the rest of the
    // budget is sampled uniformly within each size, splitting W(s) evenly.
    int budget = nsamples - 2;
    std::vector<int> size_order;
    for (int s = 1; s <= M - 1; ++s) size_order.push_back(s);
    std::stable_sort(size_order.begin(), size_order.end(), [&](int a, int b) {
        double wa = 1.0 / (static_cast<double>(a) * (M - a));
        double wb = 1.0 / (static_cast<double>(b) * (M - b));
        return wa > wb;
    });

    std::vector<Coalition> coalitions;
    std::vector<int> sampled_sizes;
    for (int s : size_order) {
        double log_count = log_choose(M, s);
        if (log_count <= std::log(1e9) && std::exp(log_count) <= budget) {
            int count = static_cast<int>(std::llround(std::exp(log_count)));
            double w = (M - 1.0) / (std::exp(log_count) * s * (M - s));
            std::vector<int> idx(s);
            std::iota(idx.begin(), idx.end(), 0);
            do {
                Coalition c;
                c.mask.assign(static_cast<std::size_t>(M), 0);
                for (int i : idx) c.mask[static_cast<std::size_t>(i)] = 1;
                c.weight = w;
                coalitions.push_back(std::move(c));
            } while (next_combination(idx, M));
            budget -= count;
        } else {
            sampled_sizes.push_back(s);
        }
    }
    if (!sampled_sizes.empty() && budget > 0) {
        double total_mass = 0.0;
        for (int s : sampled_sizes) total_mass += (M - 1.0) / (static_cast<double>(s) * (M - s));
        std::vector<int> draws(sampled_sizes.size(), 0);
        int assigned = 0;
        for (std::size_t i = 0; i < sampled_sizes.size(); ++i) {
            int s = sampled_sizes[i];
            double mass = (M - 1.0) / (static_cast<double>(s) * (M - s));
            draws[i] = static_cast<int>(std::floor(budget * mass / total_mass));
            assigned += draws[i];
        }
        for (std::size_t i = 0; assigned < budget; i = (i + 1) % sampled_sizes.size()) {
            ++draws[i];
            ++assigned;
        }
        std::vector<int> pool(static_cast<std::size_t>(M));
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < sampled_sizes.size(); ++i) {
            int s = sampled_sizes[i];
            if (draws[i] == 0) continue;
            double w = (M - 1.0) / (static_cast<double>(s) * (M - s)) / draws[i];
            for (int d = 0; d < draws[i]; ++d) {
                // Partial Fisher-Yates draw of an s-subset.
                for (int j = 0; j < s; ++j) {
                    std::size_t pick = static_cast<std::size_t>(rng.uniform_int(j, M - 1));
                    std::swap(pool[static_cast<std::size_t>(j)], pool[pick]);
                }
                Coalition c;
                c.mask.assign(static_cast<std::size_t>(M), 0);
                for (int j = 0; j < s; ++j) c.mask[static_cast<std::size_t>(pool[j])] = 1;
                c.weight = w;
                coalitions.push_back(std::move(c));
            }
        }
    }
    if (coalitions.empty())
        throw NumericError("kernel_shap: no coalitions; increase nsamples");

    // --- masked model evaluations ---------------------------------------
    // Cell m = row * N + col of the window.
    std::vector<double> y(coalitions.size());
    std::vector<Eigen::MatrixXd> batch;
    batch.reserve(B);
    for (std::size_t ci = 0; ci < coalitions.size(); ++ci) {
        const auto& mask = coalitions[ci].mask;
        batch.clear();
        for (std::size_t b = 0; b < B; ++b) {
            Eigen::MatrixXd mix = background[b];
            for (int m = 0; m < M; ++m)
                if (mask[static_cast<std::size_t>(m)]) mix(m / N, m % N) = x(m / N, m % N);
            batch.push_back(std::move(mix));
        }
        y[ci] = predict(batch).mean();
    }

    // --- constrained weighted least squares ------------------------------
    // phi_M is eliminated through the additivity constraint, which then holds
    // exactly in the reported values.
    const double v = fx - phi0;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(coalitions.size()), M - 1);
    Eigen::VectorXd r(static_cast<Eigen::Index>(coalitions.size()));
    Eigen::VectorXd w(static_cast<Eigen::Index>(coalitions.size()));
    for (std::size_t ci = 0; ci < coalitions.size(); ++ci) {
        const auto& mask = coalitions[ci].mask;
        double zm = mask[static_cast<std::size_t>(M - 1)];
        for (int m = 0; m < M - 1; ++m)
            A(static_cast<Eigen::Index>(ci), m) = mask[static_cast<std::size_t>(m)] - zm;
        r(static_cast<Eigen::Index>(ci)) = y[ci] - phi0 - zm * v;
        w(static_cast<Eigen::Index>(ci)) = coalitions[ci].weight;
    }
    Eigen::MatrixXd wa = w.asDiagonal() * A;
    Eigen::MatrixXd ata = A.transpose() * wa;
    Eigen::VectorXd atb = wa.transpose() * r;
    Eigen::LDLT<Eigen::MatrixXd> solver(ata);
    if (solver.info() != Eigen::Success || !solver.isPositive())
        throw NumericError("kernel_shap: singular weighted system; increase nsamples");
    Eigen::VectorXd phi_free = solver.solve(atb);

    ShapExplanation out;
    out.phi.resize(L, N);
    double sum_free = 0.0;
    for (int m = 0; m < M - 1; ++m) {
        out.phi(m / N, m % N) = phi_free(m);
        sum_free += phi_free(m);
    }
    out.phi((M - 1) / N, (M - 1) % N) = v - sum_free;
    out.phi0 = phi0;
    out.coalitions = static_cast<int>(coalitions.size());
    return out;
}

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0; // sample sd, 0 for a single value
};

MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd r;
    if (v.empty()) return r;
    for (double x : v) r.mean += x;
    r.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double s = 0.0;
        for (double x : v) s += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(s / static_cast<double>(v.size() - 1));
    }
    return r;
}

} // namespace

std::vector<RankedRow> aggregate_attributions(const AttributionTensor& t, AggregationMode mode) {
    if (t.records.empty()) return {};
    if (mode == AggregationMode::TemporalProfile)
        throw DataError("aggregate_attributions: use temporal_profiles() for profile output");

    // key -> fold -> run -> (sum |phi|, count)
    std::map<std::pair<int, int>, std::map<int, std::map<int, std::pair<double, std::size_t>>>> acc;
    std::set<int> folds;
    for (const auto& rec : t.records) {
        int lag_key = mode == AggregationMode::Global ? -1 : rec.lag;
        auto& cell = acc[{rec.feature, lag_key}][rec.fold][rec.run];
        cell.first += std::abs(rec.phi);
        cell.second += 1;
        folds.insert(rec.fold);
    }

    std::vector<RankedRow> rows;
    for (const auto& [key, fold_map] : acc) {
        RankedRow row;
        row.feature = key.first;
        row.lag = key.second;
        const std::string& name = t.feature_names.at(static_cast<std::size_t>(key.first));
        row.key = key.second < 0 ? name : name + " (t" + (key.second == 0 ? "" : "-" + std::to_string(key.second)) + ")";

        std::vector<double> fold_means;
        for (int fold : folds) {
            auto it = fold_map.find(fold);
            if (it == fold_map.end()) {
                row.fold_mean.push_back(std::numeric_limits<double>::quiet_NaN());
                row.fold_sd.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            std::vector<double> run_means;
            for (const auto& [run, cell] : it->second)
                run_means.push_back(cell.first / static_cast<double>(cell.second));
            MeanSd ms = mean_sd(run_means);
            row.fold_mean.push_back(ms.mean);
            row.fold_sd.push_back(ms.sd);
            fold_means.push_back(ms.mean);
        }
        MeanSd overall = mean_sd(fold_means);
        row.average = overall.mean;
        row.average_sd = overall.sd;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const RankedRow& a, const RankedRow& b) {
        if (a.average != b.average) return a.average > b.average;
        return a.key < b.key;
    });
    return rows;
}

std::vector<TemporalProfile> temporal_profiles(const AttributionTensor& t) {
    // feature -> lag -> fold -> (sum, count)
    std::map<int, std::map<int, std::map<int, std::pair<double, std::size_t>>>> acc;
    for (const auto& rec : t.records) {
        auto& cell = acc[rec.feature][rec.lag][rec.fold];
        cell.first += std::abs(rec.phi);
        cell.second += 1;
    }
    std::vector<TemporalProfile> out;
    for (const auto& [feature, lag_map] : acc) {
        TemporalProfile p;
        p.feature = feature;
        p.name = t.feature_names.at(static_cast<std::size_t>(feature));
        int max_lag = lag_map.rbegin()->first;
        p.mean_by_lag.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
        p.sd_by_lag.assign(static_cast<std::size_t>(max_lag) + 1, 0.0);
        for (const auto& [lag, fold_map] : lag_map) {
            std::vector<double> fold_means;
            for (const auto& [fold, cell] : fold_map)
                fold_means.push_back(cell.first / static_cast<double>(cell.second));
            MeanSd ms = mean_sd(fold_means);
            p.mean_by_lag[static_cast<std::size_t>(lag)] = ms.mean;
            p.sd_by_lag[static_cast<std::size_t>(lag)] = ms.sd;
        }
        out.push_back(std::move(p));
    }
    return out;
}

namespace {

RegimeSlope fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    RegimeSlope s;
    s.n = static_cast<int>(x.size());
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) return s; // vertical stack of points, no slope
    s.slope = sxy / sxx;
    s.intercept = my - s.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - s.intercept - s.slope * x[i];
        ssr += e * e;
    }
    int dof = s.n - 2;
    if (dof <= 0) return s;
    double sigma2 = ssr / dof;
    double se = std::sqrt(sigma2 / sxx);
    s.fitted = true;
    if (se == 0.0) {
        s.p_value = 0.0;
    } else {
        boost::math::students_t dist(dof);
        s.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(s.slope / se)));
        if (s.p_value > 1.0) s.p_value = 1.0;
    }
    s.display = s.p_value < 0.01;
    return s;
}

} // namespace

std::vector<RegimeSlope> interaction_by_regime(const std::vector<double>& mpe_values,
                                               const std::vector<double>& mpe_phi,
                                               const std::vector<Regime>& regimes) {
    if (mpe_values.size() != mpe_phi.size() || mpe_values.size() != regimes.size())
        throw DataError("interaction_by_regime: input length mismatch");
    if (mpe_values.size() < 3)
        throw DataError("interaction_by_regime: need at least 3 samples");

    std::map<Regime, std::pair<std::vector<double>, std::vector<double>>> by_regime;
    for (std::size_t i = 0; i < mpe_values.size(); ++i) {
        by_regime[regimes[i]].first.push_back(mpe_values[i]);
        by_regime[regimes[i]].second.push_back(mpe_phi[i]);
    }

    std::vector<RegimeSlope> out;
    for (Regime reg : {Regime::Falling, Regime::Flat, Regime::Rising}) {
        auto it = by_regime.find(reg);
        RegimeSlope s;
        s.regime = reg;
        if (it != by_regime.end() && it->second.first.size() >= 3) {
            s = fit_slope(it->second.first, it->second.second);
            s.regime = reg;
        } else {
            s.n = it == by_regime.end() ? 0 : static_cast<int>(it->second.first.size());
        }
        out.push_back(s);
    }
    RegimeSlope global = fit_slope(mpe_values, mpe_phi);
    global.is_global = true;
    out.push_back(global);
    return out;
}

} // namespace nml
