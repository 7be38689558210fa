#ifndef NML_WALKFORWARD_HPP
#define NML_WALKFORWARD_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nml/folds.hpp"
#include "nml/tpe.hpp"
#include "nml/training.hpp"

namespace nml {

struct WalkForwardConfig {
    int runs = 5;
    TpeOptions tpe;            // trials per fold
    HpSpace space;
    int search_max_epochs = 50;
    int search_patience = 10;
    bool scaled_folds = false;
};

struct RunFailure {
    int run = 0;
    std::string error;
};

struct FoldOutcome {
    FoldSpec fold;
    Hyperparams best_hp; // epochs carry the early-stop budget from the search
    Standardizer scaler;
    std::vector<TrainReport> run_reports;
    std::vector<LstmParams> run_params;
    std::vector<std::size_t> test_label_rows;
    std::vector<double> y_test;                        // original scale
    std::vector<std::vector<double>> run_predictions;  // original scale, per run
    std::vector<double> ensemble_prediction;
    double ensemble_rmse = 0.0;
    double ensemble_mae = 0.0;
    int median_run = 0; // 0-based index of the median-RMSE run
    std::vector<RunFailure> failures;
    std::vector<TpeTrial> search_history;
};

/// Full walk-forward protocol: per fold, fit the scaler on training rows only,
/// run one TPE search on train/validation, then refit on train+validation for
/// the budgeted epochs across `runs` seeds. Test predictions are averaged
/// pointwise for the ensemble metrics; the median-RMSE run is tagged for
/// attribution. Individual run failures are recorded, not fatal.
std::vector<FoldOutcome> walk_forward_ensemble(const Eigen::MatrixXd& features,
                                               const Eigen::VectorXd& target,
                                               const WalkForwardConfig& cfg,
                                               std::uint64_t seed);

} // namespace nml

#endif
