#include "nml/walkforward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nml/errors.hpp"

namespace nml {

namespace {

Eigen::VectorXd standardized_target(const Standardizer& scaler, const Eigen::VectorXd& target) {
    return (target.array() - scaler.target_mean) / scaler.target_sd;
}

} // namespace

std::vector<FoldOutcome> walk_forward_ensemble(const Eigen::MatrixXd& features,
                                               const Eigen::VectorXd& target,
                                               const WalkForwardConfig& cfg,
                                               std::uint64_t seed) {
    if (cfg.runs < 1) throw DataError("walk_forward_ensemble: runs must be >= 1");
    std::vector<FoldSpec> folds =
        make_folds(static_cast<std::size_t>(features.rows()), cfg.scaled_folds);

    std::vector<FoldOutcome> outcomes;
    for (const FoldSpec& fold : folds) {
        FoldOutcome out;
        out.fold = fold;
        out.scaler = Standardizer::fit(features, target, fold.train_end);
        Eigen::MatrixXd xs = out.scaler.apply(features);
        Eigen::VectorXd ys = standardized_target(out.scaler, target);

        // One search per fold; seeds stream per trial so reruns reproduce.
        int trial_counter = 0;
        double best_loss_seen = std::numeric_limits<double>::infinity();
        int best_epochs = cfg.search_max_epochs;
        TrainOptions search_opts;
        search_opts.max_epochs = cfg.search_max_epochs;
        search_opts.patience = cfg.search_patience;
        search_opts.early_stopping = true;

        auto objective = [&](const Hyperparams& hp) {
            Windowed train = window_supervised(xs, ys, hp.lookback, 0, fold.train_end);
            Windowed val = window_supervised(xs, ys, hp.lookback, fold.train_end, fold.val_end);
            std::uint64_t trial_seed =
                Rng::substream(seed, "tpe-trial",
                               static_cast<std::uint64_t>(fold.fold_id) * 1000 +
                                   static_cast<std::uint64_t>(trial_counter++))
                    .next();
            TrainResult r = train_lstm(train, val, hp, trial_seed, search_opts);
            if (r.best_val_loss < best_loss_seen) {
                best_loss_seen = r.best_val_loss;
                best_epochs = r.stopped_epoch;
            }
            return r.best_val_loss;
        };

        Rng tpe_rng = Rng::substream(seed, "tpe", static_cast<std::uint64_t>(fold.fold_id));
        out.best_hp = tpe_search(cfg.space, objective, cfg.tpe, tpe_rng, &out.search_history);
        out.best_hp.epochs = std::max(1, best_epochs);

        // Final fits on train+validation with the budgeted epoch count.
        const int L = out.best_hp.lookback;
        Windowed fit_set = window_supervised(xs, ys, L, 0, fold.val_end);
        Windowed val_set = window_supervised(xs, ys, L, fold.train_end, fold.val_end);
        Windowed test_set = window_supervised(xs, ys, L, fold.val_end, fold.test_end);
        TrainOptions final_opts;
        final_opts.max_epochs = out.best_hp.epochs;
        final_opts.patience = 0;
        final_opts.early_stopping = false;

        out.test_label_rows = test_set.label_rows;
        out.y_test.resize(test_set.y.size());
        for (std::size_t i = 0; i < test_set.y.size(); ++i)
            out.y_test[i] = out.scaler.invert_target(test_set.y[i]);

        for (int run = 0; run < cfg.runs; ++run) {
            std::uint64_t run_seed =
                Rng::substream(seed, "run",
                               static_cast<std::uint64_t>(fold.fold_id) * 100 +
                                   static_cast<std::uint64_t>(run))
                    .next();
            try {
                TrainResult r = train_lstm(fit_set, Windowed{}, out.best_hp, run_seed, final_opts);
                Eigen::VectorXd pred_z = lstm_predict_batch(r.params, test_set.x);
                std::vector<double> pred(test_set.x.size());
                for (std::size_t i = 0; i < pred.size(); ++i)
                    pred[i] = out.scaler.invert_target(pred_z(static_cast<Eigen::Index>(i)));

                TrainReport report;
                report.fold = fold.fold_id;
                report.run = run + 1;
                report.rmse = rmse(out.y_test, pred);
                report.mae = mae(out.y_test, pred);
                report.best_val_loss = val_set.x.empty() ? 0.0 : [&] {
                    Eigen::VectorXd vp = lstm_predict_batch(r.params, val_set.x);
                    double s = 0.0;
                    for (std::size_t i = 0; i < val_set.y.size(); ++i) {
                        double d = vp(static_cast<Eigen::Index>(i)) - val_set.y[i];
                        s += d * d;
                    }
                    return s / static_cast<double>(val_set.y.size());
                }();
                report.stopped_epoch = r.stopped_epoch;
                report.hp = out.best_hp;
                report.seed = run_seed;

                out.run_reports.push_back(report);
                out.run_params.push_back(std::move(r.params));
                out.run_predictions.push_back(std::move(pred));
            } catch (const std::exception& e) {
                out.failures.push_back({run + 1, e.what()});
            }
        }

        if (!out.run_predictions.empty()) {
            const std::size_t nt = out.y_test.size();
            out.ensemble_prediction.assign(nt, 0.0);
            for (const auto& pred : out.run_predictions)
                for (std::size_t i = 0; i < nt; ++i) out.ensemble_prediction[i] += pred[i];
            for (double& v : out.ensemble_prediction)
                v /= static_cast<double>(out.run_predictions.size());
            out.ensemble_rmse = rmse(out.y_test, out.ensemble_prediction);
            out.ensemble_mae = mae(out.y_test, out.ensemble_prediction);

            // Median-RMSE run (lower middle for even counts).
            std::vector<std::size_t> order(out.run_reports.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return out.run_reports[a].rmse < out.run_reports[b].rmse;
            });
            out.median_run = static_cast<int>(order[(order.size() - 1) / 2]);
        }
        outcomes.push_back(std::move(out));
    }
    return outcomes;
}

} // namespace nml
