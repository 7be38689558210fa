#ifndef NML_SYNTHETIC_HPP
#define NML_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace nml {

struct SyntheticSpec {
    std::uint64_t seed = 42;
    int weeks = 546;
    double messages_per_week = 30.0; // Poisson mean, floored at 1
};

/// Planted structure of the generated system, persisted alongside the data so
/// tests can assert against it.
struct SyntheticTruth {
    std::vector<int> mpe_lags{3, 4, 5};
    std::vector<double> mpe_coefficients{0.5, 0.35, 0.25};
    std::string mid_predictor = "GeopolRisk";
    int mid_lag = 2;
    double mid_coefficient = 0.8;
};

struct SyntheticOutput {
    std::string messages_path;
    std::string macro_dir;
    std::vector<std::string> macro_files;
    std::string fomc_path;
    std::string truth_path;
    int message_count = 0;
};

/// Deterministic desk-scale dataset: a message corpus whose lexicon
/// classification reproduces the planted stances exactly, 18 macro series in
/// their native frequencies, and announcement dates. The target return series
/// is driven by the index at lags 3-5 and by the mid-frequency band of one
/// predictor at lag 2.
SyntheticOutput gen_synthetic(const SyntheticSpec& spec, const std::string& out_dir);

/// Series names in the bundled panel, target first.
const std::vector<std::string>& synthetic_series_names();

} // namespace nml

#endif
