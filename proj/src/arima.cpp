#include "nml/arima.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "nml/errors.hpp"
#include "nml/optim.hpp"
#include "nml/stat_tests.hpp"

namespace nml {

namespace {

constexpr double kRootMargin = 1.001; // polynomial roots must stay this far outside the unit circle
constexpr double kTwoPi = 6.283185307179586476925287;

std::string order_str(const ArimaOrder& o) {
    return "(" + std::to_string(o.p) + "," + std::to_string(o.d) + "," + std::to_string(o.q) + ")";
}

std::vector<double> difference(std::span<const double> y, int d) {
    std::vector<double> w(y.begin(), y.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = w.size() - 1; i >= 1; --i) w[i] -= w[i - 1];
        w.erase(w.begin());
    }
    return w;
}

/// Largest companion-matrix eigenvalue modulus of 1 - c1 z - ... - ck z^k.
/// Stationarity/invertibility needs this below 1/margin.
double max_companion_root(const Eigen::VectorXd& coef) {
    int k = static_cast<int>(coef.size());
    while (k > 0 && coef(k - 1) == 0.0) --k;
    if (k == 0) return 0.0;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) comp(0, i) = coef(i);
    for (int i = 1; i < k; ++i) comp(i, i - 1) = 1.0;
    return comp.eigenvalues().cwiseAbs().maxCoeff();
}

struct CssSpec {
    const std::vector<double>& w;
    int p, q;
    bool intercept;
};

/// Conditional sum of squares; presample innovations are zero and the first p
/// observations condition the recursion.
double css(const CssSpec& spec, const std::vector<double>& theta_vec,
           std::vector<double>* resid_out = nullptr) {
    const int n = static_cast<int>(spec.w.size());
    const double c = spec.intercept ? theta_vec[0] : 0.0;
    const int base = spec.intercept ? 1 : 0;
    const double* phi = theta_vec.data() + base;
    const double* th = theta_vec.data() + base + spec.p;

    double ss = 0.0;
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    for (int t = spec.p; t < n; ++t) {
        double pred = c;
        for (int i = 1; i <= spec.p; ++i) pred += phi[i - 1] * spec.w[t - i];
        for (int j = 1; j <= spec.q; ++j)
            if (t - j >= spec.p) pred += th[j - 1] * e[t - j];
        e[t] = spec.w[t] - pred;
        ss += e[t] * e[t];
    }
    if (resid_out) resid_out->assign(e.begin() + spec.p, e.end());
    return ss;
}

double penalized_css(const CssSpec& spec, const std::vector<double>& theta_vec) {
    const int base = spec.intercept ? 1 : 0;
    Eigen::VectorXd phi(spec.p), th(spec.q);
    for (int i = 0; i < spec.p; ++i) phi(i) = theta_vec[base + i];
    for (int j = 0; j < spec.q; ++j) th(j) = theta_vec[base + spec.p + j];
    double r_ar = spec.p > 0 ? max_companion_root(phi) : 0.0;
    double r_ma = spec.q > 0 ? max_companion_root(th) : 0.0;
    double limit = 1.0 / kRootMargin;
    if (r_ar > limit || r_ma > limit)
        return 1e12 * (1.0 + std::max(r_ar, r_ma));
    return css(spec, theta_vec);
}

/// OLS AR(p) starting values, shrunk into the stationary region if needed.
Eigen::VectorXd init_ar(const std::vector<double>& w, int p) {
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(p);
    if (p == 0) return phi;
    const int n = static_cast<int>(w.size());
    const int rows = n - p;
    if (rows <= p + 1) return phi;
    Eigen::MatrixXd X(rows, p + 1);
    Eigen::VectorXd y(rows);
    for (int r = 0; r < rows; ++r) {
        y(r) = w[p + r];
        X(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) X(r, i) = w[p + r - i];
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    phi = beta.segment(1, p);
    for (int guard = 0; guard < 50 && max_companion_root(phi) >= 1.0 / kRootMargin; ++guard)
        phi *= 0.95;
    return phi;
}

} // namespace

std::string ArimaOrder::str() const { return order_str(*this); }

ArimaModel fit_arima(std::span<const double> y, ArimaOrder order) {
    if (order.p < 0 || order.q < 0 || order.d < 0 || order.p > 5 || order.q > 5 || order.d > 2)
        throw DataError("fit_arima: order " + order.str() + " outside supported range");
    const int min_len = 10 * (order.p + order.q + 1);
    if (static_cast<int>(y.size()) < min_len)
        throw DataError("fit_arima: need at least " + std::to_string(min_len) + " observations");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("fit_arima: non-finite value");

    std::vector<double> w = difference(y, order.d);
    const bool intercept = order.d == 0;
    CssSpec spec{w, order.p, order.q, intercept};

    std::vector<double> x0;
    if (intercept) {
        double mean = 0.0;
        for (double v : w) mean += v;
        x0.push_back(mean / static_cast<double>(w.size()));
    }
    Eigen::VectorXd phi0 = init_ar(w, order.p);
    for (int i = 0; i < order.p; ++i) x0.push_back(phi0(i));
    for (int j = 0; j < order.q; ++j) x0.push_back(0.0);
    if (intercept && order.p > 0) {
        // AR recursion uses the raw intercept, not the mean.
        x0[0] *= 1.0 - phi0.sum();
    }

    std::vector<double> best = x0;
    double best_ss;
    if (x0.empty()) {
        best_ss = css(spec, x0);
    } else {
        NelderMeadResult nm =
            nelder_mead([&](const std::vector<double>& v) { return penalized_css(spec, v); }, x0,
                        0.05, 1e-12, 4000);
        if (!nm.converged)
            throw NumericError("fit_arima" + order.str() + ": optimizer did not converge after " +
                               std::to_string(nm.iterations) + " iterations (css=" +
                               std::to_string(nm.fx) + ")");
        best = nm.x;
        best_ss = css(spec, best);
    }

    ArimaModel m;
    m.order = order;
    m.has_intercept = intercept;
    const int base = intercept ? 1 : 0;
    m.intercept = intercept ? best[0] : 0.0;
    m.ar.resize(order.p);
    m.ma.resize(order.q);
    for (int i = 0; i < order.p; ++i) m.ar(i) = best[base + i];
    for (int j = 0; j < order.q; ++j) m.ma(j) = best[base + order.p + j];

    const double limit = 1.0 / kRootMargin;
    if (order.p > 0 && max_companion_root(m.ar) > limit)
        throw NumericError("fit_arima" + order.str() + ": explosive AR estimate");
    if (order.q > 0 && max_companion_root(m.ma) > limit)
        throw NumericError("fit_arima" + order.str() + ": non-invertible MA estimate");

    m.nobs = static_cast<int>(w.size()) - order.p;
    if (m.nobs < 1) throw DataError("fit_arima: no usable observations");
    m.sigma2 = best_ss / m.nobs;
    if (m.sigma2 <= 0.0) m.sigma2 = 1e-300;
    m.loglik = -0.5 * m.nobs * (std::log(kTwoPi) + std::log(m.sigma2) + 1.0);
    const int k = order.p + order.q + 1 + (intercept ? 1 : 0);
    m.aic = 2.0 * k - 2.0 * m.loglik;
    return m;
}

ArimaOrder select_arima_aic(std::span<const double> y, int pmax, int dmax, int qmax) {
    bool any = false;
    ArimaOrder best_order;
    double best_aic = std::numeric_limits<double>::infinity();
    std::string last_error = "no candidates";

    // CSS likelihoods are not comparable across differencing orders, so d is
    // pinned first by the unit-root test (smallest d that is stationary at 5%)
    // and AIC then ranks the (p,q) grid at that d on a common sample.
    int d = 0;
    {
        std::vector<double> w(y.begin(), y.end());
        while (d < dmax) {
            bool stationary = false;
            try {
                stationary = adf_test(std::span<const double>(w), 8).p_value < 0.05;
            } catch (const Error&) {
                stationary = true; // degenerate (near-constant) series: stop differencing
            }
            if (stationary) break;
            for (std::size_t i = w.size() - 1; i >= 1; --i) w[i] -= w[i - 1];
            w.erase(w.begin());
            ++d;
        }
    }

    // One-step prediction errors of the undifferenced series over a common
    // sample keep candidates with different p comparable.
    const int t0 = pmax + dmax + 1;
    if (static_cast<int>(y.size()) <= t0 + 10)
        throw DataError("select_arima_aic: series too short for the candidate grid");
    std::vector<double> head(y.begin(), y.begin() + t0);
    std::vector<double> tail(y.begin() + t0, y.end());
    const double n_common = static_cast<double>(tail.size());

    // Total order ascending, then p ascending: on AIC ties the first
    // (most parsimonious) candidate wins.
    for (int total = 0; total <= pmax + qmax; ++total) {
        for (int p = 0; p <= std::min(total, pmax); ++p) {
            int q = total - p;
            if (q > qmax) continue;
            ArimaOrder order{p, d, q};
            try {
                ArimaModel m = fit_arima(y, order);
                std::vector<double> fc = arima_forecast_onestep(m, head, tail);
                double ss = 0.0;
                for (std::size_t i = 0; i < tail.size(); ++i)
                    ss += (tail[i] - fc[i]) * (tail[i] - fc[i]);
                double sigma2 = std::max(ss / n_common, 1e-300);
                double loglik = -0.5 * n_common * (std::log(kTwoPi) + std::log(sigma2) + 1.0);
                int k = p + q + 1 + (m.has_intercept ? 1 : 0);
                double aic = 2.0 * k - 2.0 * loglik;
                if (aic < best_aic) {
                    best_aic = aic;
                    best_order = order;
                    any = true;
                }
            } catch (const Error& e) {
                last_error = e.what();
            }
        }
    }
    if (!any) throw NumericError("select_arima_aic: every candidate failed; last: " + last_error);
    return best_order;
}

std::vector<double> arima_forecast_onestep(const ArimaModel& model,
                                           std::span<const double> history,
                                           std::span<const double> test) {
    const int d = model.order.d;
    if (static_cast<int>(history.size()) < d + model.order.p + 1)
        throw DataError("arima_forecast_onestep: history too short");

    std::vector<double> full(history.begin(), history.end());
    full.insert(full.end(), test.begin(), test.end());
    std::vector<double> w = difference(full, d);

    const int n = static_cast<int>(w.size());
    const int p = model.order.p, q = model.order.q;
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::vector<double> pred_w(static_cast<std::size_t>(n), 0.0);
    for (int t = p; t < n; ++t) {
        double pred = model.intercept;
        for (int i = 1; i <= p; ++i) pred += model.ar(i - 1) * w[t - i];
        for (int j = 1; j <= q; ++j)
            if (t - j >= p) pred += model.ma(j - 1) * e[t - j];
        pred_w[t] = pred;
        e[t] = w[t] - pred;
    }

    // Undo the differencing with realized values (one-step horizon).
    std::vector<double> out;
    const std::size_t h0 = history.size();
    for (std::size_t i = 0; i < test.size(); ++i) {
        std::size_t t_full = h0 + i;          // index into `full`
        std::size_t t_w = t_full - static_cast<std::size_t>(d); // index into `w`
        double pw = static_cast<int>(t_w) >= p ? pred_w[t_w] : model.intercept;
        double yhat;
        if (d == 0) yhat = pw;
        else if (d == 1) yhat = full[t_full - 1] + pw;
        else yhat = 2.0 * full[t_full - 1] - full[t_full - 2] + pw;
        out.push_back(yhat);
    }
    return out;
}

DmResult diebold_mariano(std::span<const double> e1, std::span<const double> e2, int h) {
    if (e1.size() != e2.size())
        throw DataError("diebold_mariano: error series lengths differ");
    const int n = static_cast<int>(e1.size());
    if (n < 10) throw DataError("diebold_mariano: need at least 10 forecasts");
    if (h < 1) throw DataError("diebold_mariano: horizon must be >= 1");

    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) d[i] = e1[i] * e1[i] - e2[i] * e2[i];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;

    // Bartlett long-run variance through lag h-1 (h=1: plain variance).
    double lrv = 0.0;
    for (int k = 0; k < h; ++k) {
        double gamma = 0.0;
        for (int t = k; t < n; ++t) gamma += (d[t] - mean) * (d[t - k] - mean);
        gamma /= n;
        lrv += (k == 0 ? 1.0 : 2.0 * (1.0 - static_cast<double>(k) / h)) * gamma;
    }
    if (lrv <= 0.0)
        throw NumericError("diebold_mariano: zero-variance loss differential (forecasts indistinguishable)");

    double dm = mean / std::sqrt(lrv / n);
    // Harvey-Leybourne-Newbold small-sample correction.
    double adj = std::sqrt((n + 1.0 - 2.0 * h + static_cast<double>(h) * (h - 1.0) / n) / n);
    dm *= adj;

    DmResult r;
    r.statistic = dm;
    r.horizon = h;
    r.n = n;
    boost::math::students_t dist(n - 1);
    r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(dm)));
    if (r.p_value > 1.0) r.p_value = 1.0;
    return r;
}

} // namespace nml
