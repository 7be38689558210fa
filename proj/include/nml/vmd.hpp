#ifndef NML_VMD_HPP
#define NML_VMD_HPP

#include <span>
#include <string>
#include <vector>

#include "nml/series.hpp"

namespace nml {

enum class OmegaInit { Uniform, Zero };

struct VmdConfig {
    int modes = 3;           // K
    double alpha = 2000.0;   // bandwidth penalty
    double tau = 0.0;        // dual ascent step (0 disables the constraint update)
    bool dc = false;         // pin the first mode to zero frequency
    OmegaInit init = OmegaInit::Uniform;
    double tol = 1e-7;
    int max_iter = 500;
};

struct VmdResult {
    std::vector<std::vector<double>> modes; // K modes, each input length
    std::vector<double> omegas;             // center frequencies, cycles/sample, ascending
    // Spectral dispersion of each mode about its center: the power-weighted
    // standard deviation of frequency over the solver's half-spectrum.
    std::vector<double> bandwidths;
    int iterations = 0;
    double final_residual = 0.0; // last convergence increment
    // Per-iteration value of the penalized-bandwidth objective plus the
    // constraint violation (spectral domain, dual term excluded).
    std::vector<double> objective_trace;
    VmdConfig config;
};

/// Variational mode decomposition: split a signal into K band-limited modes by
/// ADMM in the half-spectrum frequency domain. The signal is mirror-extended by
/// half its length on each side before transforming and cropped afterwards.
/// Modes are reported sorted by ascending center frequency.
VmdResult vmd_decompose(std::span<const double> signal, const VmdConfig& cfg);

/// Pointwise sum of the modes.
std::vector<double> vmd_reconstruct(const VmdResult& r);

struct VmdScanHit {
    std::string predictor;
    int predictor_imf = 0; // j, 1-based
    int target_imf = 0;    // i, 1-based
    int lag = 0;
    double f_stat = 0.0;
    double p_value = 1.0;
};

struct VmdScanIssue {
    std::string predictor;
    int predictor_imf, target_imf, lag;
    std::string note;
};

struct VmdScanResult {
    std::vector<VmdScanHit> hits; // only cells with p < alpha_level
    std::vector<VmdScanIssue> issues;
};

/// Decompose the target and every predictor with the same configuration, make
/// each IMF stationary (one differencing pass when the ADF test does not
/// reject), then Granger-test every (predictor IMF_j -> target IMF_i, lag)
/// triple, keeping cells significant at alpha_level. Hits are ordered by
/// target IMF, then predictor, then lag.
VmdScanResult vmd_granger_scan(const WeeklySeries& target,
                               const std::vector<WeeklySeries>& predictors,
                               const VmdConfig& cfg, int max_lag = 6,
                               double alpha_level = 0.05);

} // namespace nml

#endif
