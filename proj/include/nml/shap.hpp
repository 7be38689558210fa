#ifndef NML_SHAP_HPP
#define NML_SHAP_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nml/dates.hpp"
#include "nml/regimes.hpp"
#include "nml/rng.hpp"

namespace nml {

/// Model under explanation: maps a batch of L x N windows to predictions.
using BatchPredictFn = std::function<Eigen::VectorXd(const std::vector<Eigen::MatrixXd>&)>;

struct ShapExplanation {
    Eigen::MatrixXd phi; // L x N, same layout as the explained window
    double phi0 = 0.0;   // mean prediction over the background set
    int coalitions = 0;  // rows in the weighted regression
};

/// KernelSHAP: Shapley values of the (lag, feature) cells of one window.
/// Coalitions are drawn with Shapley-kernel weights (full enumeration whenever
/// the budget covers a coalition size, so small problems are exact); masked
/// cells take background values averaged over the background set; the weighted
/// least-squares solve enforces the additivity constraint exactly.
ShapExplanation kernel_shap(const BatchPredictFn& predict,
                            const std::vector<Eigen::MatrixXd>& background,
                            const Eigen::MatrixXd& x, int nsamples, Rng& rng);

/// SHAP values indexed by (fold, run, sample, lag, feature).
/// Lag 0 is the current week t; lag L-1 the oldest row of the window.
struct AttributionRecord {
    int fold = 0;
    int run = 0;
    Date sample_date;
    int lag = 0;
    int feature = 0;
    double phi = 0.0;
};

struct AttributionTensor {
    std::vector<std::string> feature_names;
    int max_lookback = 0;
    std::vector<AttributionRecord> records;
    std::map<std::pair<int, int>, double> base_values; // (fold, run) -> phi0
};

enum class AggregationMode { Global, FeatureLag, TemporalProfile };

struct RankedRow {
    std::string key;          // feature or "feature (t-k)"
    int feature = 0;
    int lag = -1;             // -1 for Global rows
    double average = 0.0;     // mean absolute attribution
    double average_sd = 0.0;  // sd across folds
    std::vector<double> fold_mean; // per fold
    std::vector<double> fold_sd;   // across runs within the fold
};

/// Mean-absolute-attribution tables: Global collapses lags; FeatureLag keeps
/// them. Rows are ranked by descending average. Per-fold dispersion is across
/// runs; the headline dispersion is across fold means (sample sd).
std::vector<RankedRow> aggregate_attributions(const AttributionTensor& t, AggregationMode mode);

struct TemporalProfile {
    int feature = 0;
    std::string name;
    std::vector<double> mean_by_lag; // index = lag
    std::vector<double> sd_by_lag;   // across folds
};
std::vector<TemporalProfile> temporal_profiles(const AttributionTensor& t);

struct RegimeSlope {
    Regime regime = Regime::Flat;
    bool is_global = false;
    double slope = 0.0;
    double intercept = 0.0;
    double p_value = 1.0;
    int n = 0;
    bool display = false; // set only when p < 0.01
    bool fitted = false;  // regimes below 3 points are recorded unfitted
};

/// OLS of per-sample attribution on the index level, per rate regime and
/// globally. The display flag follows the 1% significance rule.
std::vector<RegimeSlope> interaction_by_regime(const std::vector<double>& mpe_values,
                                               const std::vector<double>& mpe_phi,
                                               const std::vector<Regime>& regimes);

} // namespace nml

#endif
