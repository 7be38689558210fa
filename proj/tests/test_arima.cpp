#include <doctest.h>

#include <cmath>

#include "nml/arima.hpp"
#include "nml/errors.hpp"
#include "nml/optim.hpp"
#include "nml/rng.hpp"

using namespace nml;

namespace {

std::vector<double> simulate_ar(const std::vector<double>& phi, double c, double sd, int n,
                                Rng& rng) {
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < n; ++t) {
        double v = c + sd * rng.normal();
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (t > static_cast<int>(i)) v += phi[i] * y[static_cast<std::size_t>(t) - i - 1];
        y[static_cast<std::size_t>(t)] = v;
    }
    return y;
}

} // namespace

TEST_CASE("nelder_mead minimizes rosenbrock") {
    auto rosen = [](const std::vector<double>& v) {
        double a = 1.0 - v[0], b = v[1] - v[0] * v[0];
        return a * a + 100.0 * b * b;
    };
    NelderMeadResult r = nelder_mead(rosen, {-1.0, 2.0}, 0.5, 1e-12, 5000);
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("white noise with order (0,0,0): intercept is the mean, variance matches") {
    Rng rng(1);
    std::vector<double> y(1000);
    double mean = 0.0;
    for (double& v : y) {
        v = 5.0 + 2.0 * rng.normal();
        mean += v;
    }
    mean /= 1000.0;
    ArimaModel m = fit_arima(y, {0, 0, 0});
    CHECK(m.intercept == doctest::Approx(mean).epsilon(1e-6));
    CHECK(m.sigma2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("AR(1) coefficient recovery") {
    Rng rng(2);
    std::vector<double> y = simulate_ar({0.6}, 0.0, 1.0, 1000, rng);
    ArimaModel m = fit_arima(y, {1, 0, 0});
    CHECK(std::abs(m.ar(0) - 0.6) < 0.07);
}

TEST_CASE("first differencing removes a linear trend") {
    std::vector<double> y(200);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) y[static_cast<std::size_t>(t)] = 0.5 * t + 1e-4 * rng.normal();
    ArimaModel m = fit_arima(y, {0, 1, 0});
    // Differenced series is approximately the constant slope; with no
    // intercept modeled the residual variance absorbs it.
    CHECK(m.sigma2 == doctest::Approx(0.25).epsilon(0.01));
    CHECK(!m.has_intercept);
}

TEST_CASE("MA(1) estimation stays invertible") {
    Rng rng(4);
    std::vector<double> eps(800), y(800);
    for (int t = 0; t < 800; ++t) {
        eps[static_cast<std::size_t>(t)] = rng.normal();
        y[static_cast<std::size_t>(t)] =
            eps[static_cast<std::size_t>(t)] + 0.5 * (t > 0 ? eps[static_cast<std::size_t>(t - 1)] : 0.0);
    }
    ArimaModel m = fit_arima(y, {0, 0, 1});
    CHECK(std::abs(m.ma(0) - 0.5) < 0.1);
}

TEST_CASE("order grid recovers an AR(2) most of the time") {
    Rng rng(5);
    int hits = 0;
    const int seeds = 12;
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> y = simulate_ar({0.5, -0.3}, 0.0, 1.0, 1000, rng);
        ArimaOrder order = select_arima_aic(y, 3, 1, 3);
        if (order.p == 2 && order.q == 0 && order.d == 0) ++hits;
    }
    CHECK(hits >= 7); // the acceptance suite runs the full 200-seed version
}

TEST_CASE("white noise selects a minimal order") {
    Rng rng(6);
    std::vector<double> y(600);
    for (double& v : y) v = rng.normal();
    ArimaOrder order = select_arima_aic(y, 3, 1, 3);
    CHECK(order.d == 0);
    CHECK(order.p + order.q <= 1);
}

TEST_CASE("AIC of a supermodel cannot beat the nested fit by more than the penalty") {
    Rng rng(7);
    std::vector<double> y = simulate_ar({0.5}, 0.0, 1.0, 600, rng);
    ArimaModel small = fit_arima(y, {1, 0, 0});
    ArimaModel big = fit_arima(y, {2, 0, 1});
    // Two extra parameters: AIC_big >= AIC_small - 2*2 within conditioning slack.
    CHECK(big.aic >= small.aic - 4.0 - 3.0);
}

TEST_CASE("adding a constant shifts the intercept and keeps the dynamics") {
    Rng rng(8);
    std::vector<double> y = simulate_ar({0.4}, 1.0, 1.0, 800, rng);
    std::vector<double> shifted(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) shifted[i] = y[i] + 10.0;
    ArimaModel a = fit_arima(y, {1, 0, 0});
    ArimaModel b = fit_arima(shifted, {1, 0, 0});
    CHECK(a.ar(0) == doctest::Approx(b.ar(0)).epsilon(1e-6));
    CHECK(b.intercept == doctest::Approx(a.intercept + 10.0 * (1.0 - a.ar(0))).epsilon(1e-4));
}

TEST_CASE("one-step forecasts of white noise converge to the intercept") {
    Rng rng(9);
    std::vector<double> y(1100);
    for (double& v : y) v = 3.0 + rng.normal();
    std::vector<double> history(y.begin(), y.begin() + 1000);
    std::vector<double> test(y.begin() + 1000, y.end());
    ArimaModel m = fit_arima(history, {0, 0, 0});
    std::vector<double> fc = arima_forecast_onestep(m, history, test);
    REQUIRE(fc.size() == test.size());
    for (double f : fc) CHECK(f == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("one-step forecasts track an AR(1)") {
    Rng rng(10);
    std::vector<double> y = simulate_ar({0.7}, 0.0, 1.0, 1200, rng);
    std::vector<double> history(y.begin(), y.begin() + 1000);
    std::vector<double> test(y.begin() + 1000, y.end());
    ArimaModel m = fit_arima(history, {1, 0, 0});
    std::vector<double> fc = arima_forecast_onestep(m, history, test);
    // Forecast at step i uses the realized previous value.
    double err = 0.0, naive = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        double prev = i == 0 ? history.back() : test[i - 1];
        err += (test[i] - fc[i]) * (test[i] - fc[i]);
        naive += (test[i] - prev) * (test[i] - prev);
    }
    CHECK(err < naive); // beats the random-walk forecast on an AR(1)
}

TEST_CASE("order validation") {
    std::vector<double> y(100, 0.0);
    CHECK_THROWS_AS(fit_arima(y, {6, 0, 0}), DataError);
    CHECK_THROWS_AS(fit_arima(y, {0, 3, 0}), DataError);
    std::vector<double> tiny(15, 1.0);
    CHECK_THROWS_AS(fit_arima(tiny, {2, 0, 2}), DataError);
}

TEST_CASE("diebold_mariano fixtures") {
    SUBCASE("identical errors are indistinguishable") {
        Rng rng(11);
        std::vector<double> e(100);
        for (double& v : e) v = rng.normal();
        CHECK_THROWS_AS(diebold_mariano(e, e), NumericError);
    }
    SUBCASE("dominated forecaster is detected") {
        int detected = 0;
        const int seeds = 40;
        for (int s = 0; s < seeds; ++s) {
            Rng rng(200 + s);
            std::vector<double> e1(200), e2(200);
            for (int i = 0; i < 200; ++i) {
                e1[static_cast<std::size_t>(i)] = rng.normal();
                e2[static_cast<std::size_t>(i)] = std::sqrt(2.0) * rng.normal();
            }
            DmResult r = diebold_mariano(e1, e2);
            if (r.p_value < 0.01 && r.statistic < 0.0) ++detected;
        }
        CHECK(detected >= 38);
    }
    SUBCASE("antisymmetry is exact") {
        Rng rng(12);
        std::vector<double> e1(60), e2(60);
        for (int i = 0; i < 60; ++i) {
            e1[static_cast<std::size_t>(i)] = rng.normal();
            e2[static_cast<std::size_t>(i)] = rng.normal(0.0, 1.3);
        }
        DmResult a = diebold_mariano(e1, e2);
        DmResult b = diebold_mariano(e2, e1);
        CHECK(a.statistic == -b.statistic);
        CHECK(a.p_value == b.p_value);
    }
    SUBCASE("preconditions") {
        std::vector<double> shorty(5, 1.0), other(5, 2.0);
        CHECK_THROWS_AS(diebold_mariano(shorty, other), DataError);
        std::vector<double> a(20, 1.0), b(19, 2.0);
        CHECK_THROWS_AS(diebold_mariano(a, b), DataError);
    }
}

TEST_CASE("diebold_mariano null calibration (spot check)") {
    Rng rng(13);
    int reject = 0;
    const int reps = 400;
    for (int rep = 0; rep < reps; ++rep) {
        std::vector<double> e1(100), e2(100);
        for (int i = 0; i < 100; ++i) {
            e1[static_cast<std::size_t>(i)] = rng.normal();
            e2[static_cast<std::size_t>(i)] = rng.normal();
        }
        if (diebold_mariano(e1, e2).p_value < 0.05) ++reject;
    }
    CHECK(reject >= reps * 0.02);
    CHECK(reject <= reps * 0.08);
}
