#include <doctest.h>

#include <cmath>
#include <numeric>

#include "nml/errors.hpp"
#include "nml/shap.hpp"

using namespace nml;

namespace {

/// Brute-force Shapley oracle: exact subset enumeration of
/// phi_i = sum_S |S|!(M-|S|-1)!/M! [f_x(S+i) - f_x(S)] with the same
/// background-mean masking as the implementation under test.
Eigen::MatrixXd shapley_oracle(const BatchPredictFn& predict,
                               const std::vector<Eigen::MatrixXd>& background,
                               const Eigen::MatrixXd& x) {
    const int L = static_cast<int>(x.rows());
    const int N = static_cast<int>(x.cols());
    const int M = L * N;
    REQUIRE(M <= 14);

    auto masked_value = [&](unsigned mask) {
        std::vector<Eigen::MatrixXd> batch;
        for (const auto& b : background) {
            Eigen::MatrixXd mix = b;
            for (int m = 0; m < M; ++m)
                if (mask & (1u << m)) mix(m / N, m % N) = x(m / N, m % N);
            batch.push_back(std::move(mix));
        }
        return predict(batch).mean();
    };

    std::vector<double> value(1u << M);
    for (unsigned mask = 0; mask < (1u << M); ++mask) value[mask] = masked_value(mask);

    std::vector<double> fact(static_cast<std::size_t>(M) + 1, 1.0);
    for (int i = 1; i <= M; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;

    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(L, N);
    for (int i = 0; i < M; ++i) {
        double acc = 0.0;
        for (unsigned mask = 0; mask < (1u << M); ++mask) {
            if (mask & (1u << i)) continue;
            int s = __builtin_popcount(mask);
            double w = fact[static_cast<std::size_t>(s)] *
                       fact[static_cast<std::size_t>(M - s - 1)] / fact[static_cast<std::size_t>(M)];
            acc += w * (value[mask | (1u << i)] - value[mask]);
        }
        phi(i / N, i % N) = acc;
    }
    return phi;
}

BatchPredictFn wrap(const std::function<double(const Eigen::MatrixXd&)>& f) {
    return [f](const std::vector<Eigen::MatrixXd>& batch) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(batch.size()));
        for (std::size_t i = 0; i < batch.size(); ++i)
            out(static_cast<Eigen::Index>(i)) = f(batch[i]);
        return out;
    };
}

std::vector<Eigen::MatrixXd> random_background(int count, int L, int N, Rng& rng) {
    std::vector<Eigen::MatrixXd> bg;
    for (int b = 0; b < count; ++b) {
        Eigen::MatrixXd w(L, N);
        for (int r = 0; r < L; ++r)
            for (int c = 0; c < N; ++c) w(r, c) = rng.normal();
        bg.push_back(w);
    }
    return bg;
}

} // namespace

TEST_CASE("constant model attributes nothing") {
    auto predict = wrap([](const Eigen::MatrixXd&) { return 2.5; });
    Rng rng(1);
    auto bg = random_background(8, 2, 3, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 3);
    ShapExplanation e = kernel_shap(predict, bg, x, 256, rng);
    CHECK(e.phi0 == doctest::Approx(2.5));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) CHECK(std::abs(e.phi(r, c)) < 1e-10);
}

TEST_CASE("linear model recovers the closed-form attributions") {
    Rng rng(2);
    const int L = 2, N = 3;
    Eigen::MatrixXd w = Eigen::MatrixXd::Random(L, N);
    w(1, 2) = 0.0; // null player
    auto predict = wrap([&](const Eigen::MatrixXd& win) { return (win.array() * w.array()).sum(); });
    auto bg = random_background(12, L, N, rng);
    Eigen::MatrixXd bg_mean = Eigen::MatrixXd::Zero(L, N);
    for (const auto& b : bg) bg_mean += b;
    bg_mean /= static_cast<double>(bg.size());

    Eigen::MatrixXd x = Eigen::MatrixXd::Random(L, N);
    ShapExplanation e = kernel_shap(predict, bg, x, 2048, rng);
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < N; ++c) {
            double expected = w(r, c) * (x(r, c) - bg_mean(r, c));
            CHECK(e.phi(r, c) == doctest::Approx(expected).scale(1.0).epsilon(1e-6));
        }
    // Null player gets zero.
    CHECK(std::abs(e.phi(1, 2)) < 1e-9);
}

TEST_CASE("sampled KernelSHAP matches exact enumeration on a nonlinear model") {
    Rng rng(3);
    const int L = 3, N = 3; // M = 9
    auto model = [](const Eigen::MatrixXd& win) {
        double s = win.sum();
        return std::tanh(0.6 * s) + 0.3 * win(0, 0) * win(2, 1) - 0.2 * win(1, 2);
    };
    auto predict = wrap(model);
    auto bg = random_background(6, L, N, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(L, N);

    Eigen::MatrixXd oracle = shapley_oracle(predict, bg, x);
    ShapExplanation e = kernel_shap(predict, bg, x, 1 << 12, rng); // full enumeration budget
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < N; ++c)
            CHECK(e.phi(r, c) == doctest::Approx(oracle(r, c)).scale(1.0).epsilon(1e-4));
}

TEST_CASE("additivity holds exactly by construction") {
    Rng rng(4);
    const int L = 4, N = 5;
    auto model = [](const Eigen::MatrixXd& win) { return std::sin(win.sum()) + win(0, 0); };
    auto predict = wrap(model);
    auto bg = random_background(10, L, N, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(L, N);
    ShapExplanation e = kernel_shap(predict, bg, x, 300, rng);
    double fx = model(x);
    CHECK(e.phi0 + e.phi.sum() == doctest::Approx(fx).scale(1.0).epsilon(1e-10));
}

TEST_CASE("symmetric players receive equal attributions") {
    Rng rng(5);
    const int L = 2, N = 2;
    // Model symmetric in cells (0,0) and (0,1).
    auto model = [](const Eigen::MatrixXd& win) {
        return std::tanh(win(0, 0) + win(0, 1)) + 0.5 * win(1, 0);
    };
    auto predict = wrap(model);
    // Background and instance identical across the symmetric pair.
    std::vector<Eigen::MatrixXd> bg;
    for (int b = 0; b < 8; ++b) {
        Eigen::MatrixXd w(L, N);
        double v = rng.normal();
        w << v, v, rng.normal(), rng.normal();
        bg.push_back(w);
    }
    Eigen::MatrixXd x(L, N);
    x << 0.7, 0.7, -0.3, 0.4;
    ShapExplanation e = kernel_shap(predict, bg, x, 64, rng);
    CHECK(e.phi(0, 0) == doctest::Approx(e.phi(0, 1)).scale(1.0).epsilon(1e-6));
}

TEST_CASE("kernel_shap input validation") {
    Rng rng(6);
    auto predict = wrap([](const Eigen::MatrixXd& w) { return w.sum(); });
    auto bg = random_background(3, 2, 2, rng);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 2);
    CHECK_THROWS_AS(kernel_shap(predict, bg, x, 5, rng), DataError); // < 2M+2
    CHECK_THROWS_AS(kernel_shap(predict, {}, x, 64, rng), DataError);
}

TEST_CASE("attribution aggregation fixtures") {
    AttributionTensor t;
    t.feature_names = {"A", "B"};
    t.max_lookback = 2;

    SUBCASE("single nonzero cell ranks first") {
        for (int run = 1; run <= 2; ++run)
            for (int lag = 0; lag < 2; ++lag)
                for (int feat = 0; feat < 2; ++feat)
                    t.records.push_back({1, run, Date(0), lag, feat,
                                         (feat == 1 && lag == 1) ? 0.9 : 0.0});
        auto global = aggregate_attributions(t, AggregationMode::Global);
        REQUIRE(global.size() == 2);
        CHECK(global[0].key == "B");
        CHECK(global[0].average == doctest::Approx(0.45)); // averaged over 2 lags
        CHECK(global[1].average == doctest::Approx(0.0));

        auto bylag = aggregate_attributions(t, AggregationMode::FeatureLag);
        REQUIRE(bylag.size() == 4);
        CHECK(bylag[0].key == "B (t-1)");
        CHECK(bylag[0].average == doctest::Approx(0.9));
        for (std::size_t i = 1; i < bylag.size(); ++i)
            CHECK(bylag[i].average == doctest::Approx(0.0));
    }

    SUBCASE("identical runs give zero dispersion") {
        for (int run = 1; run <= 2; ++run) {
            t.records.push_back({1, run, Date(0), 0, 0, 0.5});
            t.records.push_back({1, run, Date(0), 0, 1, 0.2});
        }
        auto global = aggregate_attributions(t, AggregationMode::Global);
        for (const auto& row : global)
            for (double sd : row.fold_sd) CHECK(sd == doctest::Approx(0.0));
    }

    SUBCASE("ranking is invariant to record order") {
        Rng rng(7);
        for (int i = 0; i < 40; ++i)
            t.records.push_back({1 + i % 2, 1 + i % 3, Date(i), i % 2, i % 2,
                                 rng.normal()});
        auto base = aggregate_attributions(t, AggregationMode::Global);
        rng.shuffle(t.records);
        auto shuffled = aggregate_attributions(t, AggregationMode::Global);
        REQUIRE(base.size() == shuffled.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(base[i].key == shuffled[i].key);
            CHECK(base[i].average == doctest::Approx(shuffled[i].average));
        }
    }
}

TEST_CASE("temporal profiles collapse to per-lag means") {
    AttributionTensor t;
    t.feature_names = {"A"};
    t.max_lookback = 3;
    for (int fold = 1; fold <= 2; ++fold)
        for (int lag = 0; lag < 3; ++lag)
            t.records.push_back({fold, 1, Date(0), lag, 0, fold * (lag + 1.0)});
    auto profiles = temporal_profiles(t);
    REQUIRE(profiles.size() == 1);
    REQUIRE(profiles[0].mean_by_lag.size() == 3);
    CHECK(profiles[0].mean_by_lag[0] == doctest::Approx(1.5));
    CHECK(profiles[0].mean_by_lag[2] == doctest::Approx(4.5));
    CHECK(profiles[0].sd_by_lag[0] > 0.0);
}

TEST_CASE("interaction regression fixtures") {
    SUBCASE("planted linear relation") {
        Rng rng(8);
        std::vector<double> mpe, phi;
        std::vector<Regime> regimes;
        for (int i = 0; i < 120; ++i) {
            double m = rng.normal(0.0, 0.2);
            mpe.push_back(m);
            phi.push_back(2.0 * m + 1e-6 * rng.normal());
            regimes.push_back(i % 3 == 0 ? Regime::Falling
                                         : (i % 3 == 1 ? Regime::Flat : Regime::Rising));
        }
        auto slopes = interaction_by_regime(mpe, phi, regimes);
        REQUIRE(slopes.size() == 4);
        const RegimeSlope& global = slopes.back();
        CHECK(global.is_global);
        CHECK(global.slope == doctest::Approx(2.0).epsilon(1e-3));
        CHECK(global.display);
        for (const auto& s : slopes) {
            CHECK(s.fitted);
            CHECK(s.slope == doctest::Approx(2.0).epsilon(1e-3));
        }
    }

    SUBCASE("independent noise rarely displays") {
        int displayed = 0;
        const int seeds = 40;
        for (int s = 0; s < seeds; ++s) {
            Rng rng(500 + s);
            std::vector<double> mpe, phi;
            std::vector<Regime> regimes;
            for (int i = 0; i < 50; ++i) {
                mpe.push_back(rng.normal());
                phi.push_back(rng.normal());
                regimes.push_back(Regime::Flat);
            }
            auto slopes = interaction_by_regime(mpe, phi, regimes);
            if (slopes.back().display) ++displayed;
        }
        CHECK(displayed <= 3); // ~1% nominal rate
    }

    SUBCASE("regimes with too few points are recorded unfitted") {
        std::vector<double> mpe{0.1, 0.2, 0.3, 0.4};
        std::vector<double> phi{0.2, 0.4, 0.6, 0.8};
        std::vector<Regime> regimes{Regime::Flat, Regime::Flat, Regime::Flat, Regime::Rising};
        auto slopes = interaction_by_regime(mpe, phi, regimes);
        const RegimeSlope* rising = nullptr;
        const RegimeSlope* falling = nullptr;
        for (const auto& s : slopes) {
            if (!s.is_global && s.regime == Regime::Rising) rising = &s;
            if (!s.is_global && s.regime == Regime::Falling) falling = &s;
        }
        REQUIRE(rising);
        REQUIRE(falling);
        CHECK(!rising->fitted);
        CHECK(rising->n == 1);
        CHECK(!falling->fitted);
        CHECK(falling->n == 0);
    }

    SUBCASE("slope is invariant to joint shifts") {
        Rng rng(9);
        std::vector<double> mpe, phi;
        std::vector<Regime> regimes;
        for (int i = 0; i < 60; ++i) {
            double m = rng.normal();
            mpe.push_back(m);
            phi.push_back(0.7 * m + 0.1 * rng.normal());
            regimes.push_back(Regime::Flat);
        }
        auto base = interaction_by_regime(mpe, phi, regimes);
        for (double& v : mpe) v += 5.0;
        for (double& v : phi) v -= 2.0;
        auto shifted = interaction_by_regime(mpe, phi, regimes);
        CHECK(base.back().slope == doctest::Approx(shifted.back().slope).epsilon(1e-10));
    }
}
