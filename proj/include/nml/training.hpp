#ifndef NML_TRAINING_HPP
#define NML_TRAINING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nml/dates.hpp"
#include "nml/lstm.hpp"
#include "nml/rng.hpp"

namespace nml {

enum class OptimizerKind { Adam, RMSprop };
const char* to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

struct Hyperparams {
    int units = 16;
    double dropout = 0.2;
    int lookback = 8;       // L
    double learning_rate = 5e-4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    int batch_size = 16;
    double clipnorm = 1.0;  // fixed
    int epochs = 0;         // final-fit budget; 0 = not yet determined
};

/// Supervised windows: sample t covers features at rows t-L+1..t and the label
/// is the target at row t+1.
struct Windowed {
    std::vector<Eigen::MatrixXd> x; // each L x N
    std::vector<double> y;
    std::vector<std::size_t> label_rows; // row index of each label in the panel
};

/// Build windows from a feature matrix (rows = weeks, cols = features) and a
/// target vector using rows [begin, end) for labels.
Windowed window_supervised(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                           int lookback, std::size_t label_begin, std::size_t label_end);

/// Per-feature z-score fitted on training rows only.
struct Standardizer {
    Eigen::VectorXd mean, sd;
    double target_mean = 0.0, target_sd = 1.0;

    static Standardizer fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                            std::size_t train_rows);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
    double standardize_target(double y) const { return (y - target_mean) / target_sd; }
    double invert_target(double z) const { return z * target_sd + target_mean; }
};

struct TrainOptions {
    int max_epochs = 50;
    int patience = 10;      // early stopping; <= 0 disables (fixed-epoch fit)
    bool early_stopping = true;
    // Plateau-triggered learning-rate reduction (adaptive rates): after
    // `plateau_patience` epochs without improvement of the monitored loss the
    // rate is halved, floored at `min_lr_fraction` of the initial rate.
    int plateau_patience = 5;
    double plateau_factor = 0.5;
    double min_lr_fraction = 0.01;
};

struct TrainReport {
    int fold = 0, run = 0;
    double rmse = 0.0, mae = 0.0;       // original target scale
    double best_val_loss = 0.0;          // standardized MSE
    int stopped_epoch = 0;               // epochs actually used
    Hyperparams hp;
    std::uint64_t seed = 0;
};

struct TrainResult {
    LstmParams params;
    double best_val_loss = 0.0;
    int stopped_epoch = 0;
    std::vector<double> train_loss_history;
};

/// Mini-batch training with the configured optimizer, global gradient-norm
/// clipping at hp.clipnorm and inverted dropout on the recurrent output.
/// With early stopping enabled the parameters revert to the best validation
/// epoch; with it disabled the fit runs exactly `options.max_epochs` epochs.
/// Deterministic given the seed. Throws NumericError on divergence.
TrainResult train_lstm(const Windowed& train, const Windowed& validation, const Hyperparams& hp,
                       std::uint64_t seed, const TrainOptions& options);

double rmse(const std::vector<double>& truth, const std::vector<double>& pred);
double mae(const std::vector<double>& truth, const std::vector<double>& pred);

/// Checkpoint round-trip (JSON with a shape header).
void save_lstm_checkpoint(const std::string& path, const LstmParams& params,
                          const Hyperparams& hp, const Standardizer& scaler,
                          std::uint64_t seed);
struct LstmCheckpoint {
    LstmParams params;
    Hyperparams hp;
    Standardizer scaler;
    std::uint64_t seed = 0;
};
LstmCheckpoint load_lstm_checkpoint(const std::string& path);

} // namespace nml

#endif
