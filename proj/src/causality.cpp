#include "nml/causality.hpp"

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>

#include "nml/errors.hpp"

namespace nml {

namespace {

VarModel solve_equation(const Eigen::MatrixXd& X, const Eigen::VectorXd& dep, int p, bool has_x) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols())
        throw NumericError("fit_var_ols: rank-deficient design matrix");
    Eigen::VectorXd coef = qr.solve(dep);
    Eigen::VectorXd resid = dep - X * coef;

    VarModel m;
    m.lag = p;
    m.intercept = coef(0);
    m.beta = coef.segment(1, p);
    if (has_x) m.gamma = coef.segment(1 + p, p);
    m.residuals.assign(resid.data(), resid.data() + resid.size());
    m.ssr = resid.squaredNorm();
    m.nobs = static_cast<int>(X.rows());
    return m;
}

void check_inputs(std::span<const double> y, std::span<const double> x, int p, int trim) {
    if (p < 1) throw DataError("VAR lag must be >= 1");
    if (y.size() != x.size()) throw DataError("VAR: series lengths differ");
    if (static_cast<int>(y.size()) - trim <= 2 * p + 5)
        throw DataError("VAR: series too short for lag " + std::to_string(p));
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i]) || !std::isfinite(x[i]))
            throw DataError("VAR: missing or non-finite value");
}

} // namespace

VarModel fit_var_ols(std::span<const double> y, std::span<const double> x, int p, int trim) {
    check_inputs(y, x, p, trim);
    const int n = static_cast<int>(y.size());
    const int start = p + trim;
    const int rows = n - start;
    Eigen::MatrixXd X(rows, 1 + 2 * p);
    Eigen::VectorXd dep(rows);
    for (int r = 0; r < rows; ++r) {
        int t = start + r;
        dep(r) = y[t];
        X(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) {
            X(r, i) = y[t - i];
            X(r, p + i) = x[t - i];
        }
    }
    return solve_equation(X, dep, p, true);
}

VarModel fit_ar_ols(std::span<const double> y, int p, int trim) {
    if (p < 1) throw DataError("VAR lag must be >= 1");
    const int n = static_cast<int>(y.size());
    const int start = p + trim;
    const int rows = n - start;
    if (rows <= p + 3) throw DataError("AR: series too short for lag " + std::to_string(p));
    Eigen::MatrixXd X(rows, 1 + p);
    Eigen::VectorXd dep(rows);
    for (int r = 0; r < rows; ++r) {
        int t = start + r;
        dep(r) = y[t];
        X(r, 0) = 1.0;
        for (int i = 1; i <= p; ++i) X(r, i) = y[t - i];
    }
    return solve_equation(X, dep, p, false);
}

GrangerResult granger_ftest(std::span<const double> y, std::span<const double> x, int p) {
    VarModel unrestricted = fit_var_ols(y, x, p);
    VarModel restricted = fit_ar_ols(y, p);
    // Same effective sample by construction (both drop exactly p rows).
    const int n = unrestricted.nobs;
    const int df_den = n - 2 * p - 1;
    if (unrestricted.ssr <= 0.0)
        throw NumericError("granger_ftest: unrestricted model fits perfectly");

    double f = ((restricted.ssr - unrestricted.ssr) / p) / (unrestricted.ssr / df_den);
    if (f < 0.0 && f > -1e-10) f = 0.0;

    GrangerResult r;
    r.lag = p;
    r.f_stat = f;
    r.df_num = p;
    r.df_den = df_den;
    boost::math::fisher_f dist(p, df_den);
    r.p_value = f <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, f));
    return r;
}

int select_lag_aic(std::span<const double> y, std::span<const double> x, int max_lag) {
    if (max_lag < 1) throw DataError("select_lag_aic: max_lag must be >= 1");
    int best_p = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= max_lag; ++p) {
        VarModel m = fit_var_ols(y, x, p, max_lag - p); // common sample across candidates
        double sigma2 = m.ssr / m.nobs;
        if (sigma2 <= 0) sigma2 = 1e-300;
        double aic = m.nobs * std::log(sigma2) + 2.0 * (1 + 2 * p);
        if (aic < best_aic) {
            best_aic = aic;
            best_p = p;
        }
    }
    return best_p;
}

GrangerLagTable granger_lag_table(const WeeklySeries& target,
                                  const std::vector<WeeklySeries>& predictors, int max_lag) {
    GrangerLagTable table;
    table.max_lag = max_lag;
    for (const auto& pred : predictors) {
        table.predictors.push_back(pred.name());
        std::vector<LagTableCell> row(max_lag);
        std::vector<double> y, x;
        intersect_present(target, pred, y, x);
        for (int p = 1; p <= max_lag; ++p) {
            LagTableCell& cell = row[p - 1];
            try {
                GrangerResult g = granger_ftest(y, x, p);
                cell.ok = true;
                cell.f_stat = g.f_stat;
                cell.p_value = g.p_value;
            } catch (const Error& e) {
                cell.ok = false;
                cell.note = e.what();
            }
        }
        table.cells.push_back(std::move(row));
    }
    return table;
}

} // namespace nml
