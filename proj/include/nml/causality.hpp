#ifndef NML_CAUSALITY_HPP
#define NML_CAUSALITY_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "nml/series.hpp"

namespace nml {

/// One estimated equation of a bivariate VAR(p):
///   y_t = const + sum_i beta_i y_{t-i} + sum_j gamma_j x_{t-j} + e_t
struct VarModel {
    int lag = 0;
    double intercept = 0.0;
    Eigen::VectorXd beta;  // own lags, length p
    Eigen::VectorXd gamma; // cross lags, length p
    std::vector<double> residuals;
    double ssr = 0.0;
    int nobs = 0;
};

struct GrangerResult {
    int lag = 0;
    double f_stat = 0.0;
    double p_value = 1.0;
    int df_num = 0;
    int df_den = 0;
};

/// OLS fit of the tested VAR equation via a rank-revealing QR decomposition.
/// `trim` rows are dropped from the front in addition to the p lags, so that
/// restricted and unrestricted models can share a sample.
VarModel fit_var_ols(std::span<const double> y, std::span<const double> x, int p, int trim = 0);

/// Restricted fit using only own lags of y, on the same trimmed sample.
VarModel fit_ar_ols(std::span<const double> y, int p, int trim = 0);

/// SSR F-test of the joint null gamma_1 = ... = gamma_p = 0. Both models are
/// estimated on the identical effective sample.
GrangerResult granger_ftest(std::span<const double> y, std::span<const double> x, int p);

/// AIC selection of the VAR lag order over 1..max_lag (common trimmed sample).
int select_lag_aic(std::span<const double> y, std::span<const double> x, int max_lag);

struct LagTableCell {
    bool ok = false;
    double f_stat = 0.0;
    double p_value = 1.0;
    std::string note; // reason when degenerate
};

struct GrangerLagTable {
    std::vector<std::string> predictors;
    std::vector<std::vector<LagTableCell>> cells; // [predictor][lag-1]
    int max_lag = 6;
};

/// One row per predictor, one column per lag 1..max_lag, testing whether the
/// predictor Granger-causes the target. Series are aligned on shared
/// non-missing dates; per-cell failures become flagged cells, not errors.
GrangerLagTable granger_lag_table(const WeeklySeries& target,
                                  const std::vector<WeeklySeries>& predictors, int max_lag = 6);

} // namespace nml

#endif
