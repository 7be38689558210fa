#ifndef NML_STAT_TESTS_HPP
#define NML_STAT_TESTS_HPP

#include <span>
#include <string>
#include <vector>

#include "nml/regimes.hpp"
#include "nml/series.hpp"

namespace nml {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int order = 0; // df or selected lag order, depending on the method
    std::string method;
};

/// Augmented Dickey-Fuller unit-root test, constant-only deterministic term.
/// The lag order is picked by AIC over 0..max_lag on a common sample, then the
/// final regression is refit at that order. The reported statistic is the
/// t-ratio on the lagged level; the p-value comes from the MacKinnon
/// response-surface approximation.
TestResult adf_test(std::span<const double> y, int max_lag);
TestResult adf_test(const WeeklySeries& s, int max_lag);

/// MacKinnon (1994) approximate asymptotic p-value for the constant-only
/// Dickey-Fuller t distribution.
double mackinnon_p_const(double t_stat);

/// Kruskal-Wallis H with tie correction; p from chi-square(k-1).
TestResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Classic Levene W on absolute deviations from group means; p from F(k-1, n-k).
TestResult levene_test(const std::vector<std::vector<double>>& groups);

struct RegimeTestReport {
    TestResult kruskal;
    TestResult levene;
    double max_tail_q5; // 5th percentile of the regime whose q5 is most negative
    std::vector<std::string> regimes_present;
};

/// Groups the return series by regime label (aligned by date) and runs the
/// distribution tests across regimes.
RegimeTestReport regime_distribution_tests(const WeeklySeries& returns,
                                           const RegimeLabels& labels);

} // namespace nml

#endif
