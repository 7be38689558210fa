#include "nml/vmd.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "nml/errors.hpp"
#include "nml/stat_tests.hpp"
#include "nml/causality.hpp"

namespace nml {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftWorkspace {
    int n;
    fftw_complex* buf;
    fftw_plan fwd;
    fftw_plan bwd;

    explicit FftWorkspace(int n_) : n(n_) {
        buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(buf);
    }
    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
};

} // namespace

VmdResult vmd_decompose(std::span<const double> signal, const VmdConfig& cfg) {
    const int n = static_cast<int>(signal.size());
    if (n < 16) throw DataError("vmd_decompose: need at least 16 samples");
    if (cfg.modes < 1) throw DataError("vmd_decompose: modes must be >= 1");
    if (cfg.modes > n / 4)
        throw DataError("vmd_decompose: too many modes for signal length");
    if (cfg.alpha <= 0) throw DataError("vmd_decompose: alpha must be > 0");
    if (cfg.tol <= 0) throw DataError("vmd_decompose: tol must be > 0");
    for (double v : signal)
        if (!std::isfinite(v)) throw DataError("vmd_decompose: non-finite input");

    const int K = cfg.modes;
    // Mirror extension: half the signal on each side, padded to even length.
    const int left = n / 2;
    const int right = n / 2 + (n % 2);
    const int ext = n + left + right; // even
    const int half = ext / 2;

    std::vector<double> extended(static_cast<std::size_t>(ext));
    for (int i = 0; i < left; ++i) extended[i] = signal[left - 1 - i];
    for (int i = 0; i < n; ++i) extended[left + i] = signal[i];
    for (int i = 0; i < right; ++i) extended[left + n + i] = signal[n - 1 - i];

    FftWorkspace fft(ext);
    using cd = std::complex<double>;
    auto* buf = reinterpret_cast<cd*>(fft.buf);

    for (int i = 0; i < ext; ++i) buf[i] = cd(extended[i], 0.0);
    fftw_execute(fft.fwd);

    // Keep the nonnegative half-spectrum; bin k is frequency k/ext.
    std::vector<cd> fhat(half);
    for (int k = 0; k < half; ++k) fhat[k] = buf[k];

    std::vector<double> freq(half);
    for (int k = 0; k < half; ++k) freq[k] = static_cast<double>(k) / ext;

    std::vector<std::vector<cd>> u(K, std::vector<cd>(half, cd(0, 0)));
    std::vector<std::vector<cd>> u_prev(K, std::vector<cd>(half, cd(0, 0)));
    std::vector<cd> lambda(half, cd(0, 0));
    std::vector<cd> sum_u(half, cd(0, 0));

    std::vector<double> omega(K, 0.0);
    if (cfg.init == OmegaInit::Uniform) {
        for (int k = 0; k < K; ++k) omega[k] = 0.5 / K * k;
    }
    if (cfg.dc) omega[0] = 0.0;

    int iter = 0;
    double diff = std::numeric_limits<double>::infinity();
    const double eps = 2.220446049250313e-16;
    std::vector<double> objective_trace;

    while (iter < cfg.max_iter && diff > cfg.tol) {
        for (int k = 0; k < K; ++k) {
            // Wiener-style update against the residual of the other modes.
            for (int f = 0; f < half; ++f) {
                sum_u[f] -= u[k][f];
                double w = freq[f] - omega[k];
                cd num = fhat[f] - sum_u[f] + 0.5 * lambda[f];
                u[k][f] = num / (1.0 + 2.0 * cfg.alpha * w * w);
                sum_u[f] += u[k][f];
            }
            if (!(cfg.dc && k == 0)) {
                double num = 0.0, den = 0.0;
                for (int f = 0; f < half; ++f) {
                    double p = std::norm(u[k][f]);
                    num += freq[f] * p;
                    den += p;
                }
                if (den > 0.0) omega[k] = num / den;
            }
        }
        if (cfg.tau > 0.0) {
            for (int f = 0; f < half; ++f)
                lambda[f] += cfg.tau * (fhat[f] - sum_u[f]);
        }

        diff = 0.0;
        for (int k = 0; k < K; ++k) {
            double num = 0.0, den = 0.0;
            for (int f = 0; f < half; ++f) {
                num += std::norm(u[k][f] - u_prev[k][f]);
                den += std::norm(u_prev[k][f]);
            }
            diff += num / (den + eps);
            u_prev[k] = u[k];
        }

        double objective = 0.0;
        for (int k = 0; k < K; ++k) {
            double band = 0.0;
            for (int f = 0; f < half; ++f) {
                double w = freq[f] - omega[k];
                band += w * w * std::norm(u[k][f]);
            }
            objective += 2.0 * cfg.alpha * band;
        }
        for (int f = 0; f < half; ++f) objective += std::norm(fhat[f] - sum_u[f]);
        objective_trace.push_back(objective);
        ++iter;
    }

    // Back to time domain: conjugate-even completion of each half-spectrum.
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return omega[a] < omega[b]; });

    VmdResult result;
    result.config = cfg;
    result.iterations = iter;
    result.final_residual = diff;
    result.objective_trace = std::move(objective_trace);
    result.modes.resize(K);
    result.omegas.resize(K);
    result.bandwidths.resize(K);

    for (int rank = 0; rank < K; ++rank) {
        int k = order[rank];
        result.omegas[rank] = omega[k];
        double spread = 0.0, power = 0.0;
        for (int f = 0; f < half; ++f) {
            double p = std::norm(u[k][f]);
            double w = freq[f] - omega[k];
            spread += w * w * p;
            power += p;
        }
        result.bandwidths[rank] = power > 0.0 ? std::sqrt(spread / power) : 0.0;
        std::fill(buf, buf + ext, cd(0, 0));
        buf[0] = cd(u[k][0].real(), 0.0);
        for (int f = 1; f < half; ++f) {
            buf[f] = u[k][f];
            buf[ext - f] = std::conj(u[k][f]);
        }
        fftw_execute(fft.bwd);
        std::vector<double>& mode = result.modes[rank];
        mode.resize(n);
        for (int i = 0; i < n; ++i) mode[i] = buf[left + i].real() / ext;
    }
    return result;
}

std::vector<double> vmd_reconstruct(const VmdResult& r) {
    if (r.modes.empty()) throw DataError("vmd_reconstruct: empty result");
    std::vector<double> out(r.modes[0].size(), 0.0);
    for (const auto& mode : r.modes)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += mode[i];
    return out;
}

namespace {

// One differencing pass when the ADF test cannot reject a unit root.
std::vector<double> stationary_imf(const std::vector<double>& mode, int adf_max_lag) {
    bool needs_diff = false;
    try {
        TestResult adf = adf_test(std::span<const double>(mode), adf_max_lag);
        needs_diff = adf.p_value >= 0.05;
    } catch (const NumericError&) {
        needs_diff = false; // constant mode: leave as-is, Granger will flag it
    }
    if (!needs_diff) return mode;
    std::vector<double> d(mode.size() - 1);
    for (std::size_t i = 1; i < mode.size(); ++i) d[i - 1] = mode[i] - mode[i - 1];
    return d;
}

} // namespace

VmdScanResult vmd_granger_scan(const WeeklySeries& target,
                               const std::vector<WeeklySeries>& predictors,
                               const VmdConfig& cfg, int max_lag, double alpha_level) {
    auto decompose_series = [&](const WeeklySeries& s) {
        if (s.count_present() != s.size())
            throw DataError("vmd_granger_scan: series '" + s.name() + "' has missing values");
        return vmd_decompose(std::span<const double>(s.values()), cfg);
    };

    const int adf_max_lag = 8;
    VmdResult t_dec = decompose_series(target);
    std::vector<std::vector<double>> t_imfs;
    for (const auto& m : t_dec.modes) t_imfs.push_back(stationary_imf(m, adf_max_lag));

    VmdScanResult out;
    for (const auto& pred : predictors) {
        VmdResult p_dec = decompose_series(pred);
        for (int i = 0; i < cfg.modes; ++i) {
            for (int j = 0; j < cfg.modes; ++j) {
                std::vector<double> p_imf = stationary_imf(p_dec.modes[j], adf_max_lag);
                // Differencing may desynchronize lengths; align on the tail.
                std::size_t len = std::min(t_imfs[i].size(), p_imf.size());
                std::vector<double> y(t_imfs[i].end() - len, t_imfs[i].end());
                std::vector<double> x(p_imf.end() - len, p_imf.end());
                for (int lag = 1; lag <= max_lag; ++lag) {
                    try {
                        GrangerResult g = granger_ftest(y, x, lag);
                        if (g.p_value < alpha_level)
                            out.hits.push_back({pred.name(), j + 1, i + 1, lag, g.f_stat, g.p_value});
                    } catch (const Error& e) {
                        out.issues.push_back({pred.name(), j + 1, i + 1, lag, e.what()});
                    }
                }
            }
        }
    }
    std::stable_sort(out.hits.begin(), out.hits.end(), [](const VmdScanHit& a, const VmdScanHit& b) {
        if (a.target_imf != b.target_imf) return a.target_imf < b.target_imf;
        if (a.predictor != b.predictor) return a.predictor < b.predictor;
        if (a.predictor_imf != b.predictor_imf) return a.predictor_imf < b.predictor_imf;
        return a.lag < b.lag;
    });
    return out;
}

} // namespace nml
