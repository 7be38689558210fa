#ifndef NML_ARIMA_HPP
#define NML_ARIMA_HPP

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace nml {

struct ArimaOrder {
    int p = 0, d = 0, q = 0;
    std::string str() const;
};

struct ArimaModel {
    ArimaOrder order;
    bool has_intercept = true; // included when d == 0
    double intercept = 0.0;
    Eigen::VectorXd ar;
    Eigen::VectorXd ma;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    int nobs = 0; // after differencing
};

/// Conditional-sum-of-squares Gaussian estimate of an ARIMA(p,d,q) model.
/// The series is differenced d times internally; the CSS objective is refined
/// with a simplex optimizer; estimates whose AR or MA roots fall inside (or on)
/// the unit circle margin are rejected.
ArimaModel fit_arima(std::span<const double> y, ArimaOrder order);

/// Exhaustive AIC grid search over p<=pmax, d<=dmax, q<=qmax. Ties break
/// toward smaller p+q, then smaller p. Candidates that fail to fit are
/// skipped; an error is raised only if every candidate fails.
ArimaOrder select_arima_aic(std::span<const double> y, int pmax = 3, int dmax = 1, int qmax = 3);

/// Sequential one-step-ahead forecasts over `test`, with parameters held fixed
/// and innovations updated from realized values as they arrive.
std::vector<double> arima_forecast_onestep(const ArimaModel& model,
                                           std::span<const double> history,
                                           std::span<const double> test);

struct DmResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int horizon = 1;
    int n = 0;
};

/// Diebold-Mariano test of equal predictive accuracy under squared-error loss,
/// with the Harvey-Leybourne-Newbold small-sample correction and Student-t
/// p-values (n-1 df). Long-run variance uses a Bartlett window through h-1.
DmResult diebold_mariano(std::span<const double> e1, std::span<const double> e2, int h = 1);

} // namespace nml

#endif
