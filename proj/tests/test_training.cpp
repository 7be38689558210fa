#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nml/errors.hpp"
#include "nml/training.hpp"

using namespace nml;

namespace {

/// y_{t+1} = 0.9 * x_t with mild noise; one feature.
void linear_system(int n, Rng& rng, Eigen::MatrixXd& features, Eigen::VectorXd& target,
                   double noise = 0.05) {
    features.resize(n, 1);
    target.resize(n);
    for (int t = 0; t < n; ++t) features(t, 0) = rng.normal();
    target(0) = 0.0;
    for (int t = 1; t < n; ++t) target(t) = 0.9 * features(t - 1, 0) + noise * rng.normal();
}

} // namespace

TEST_CASE("window counts and label alignment") {
    Eigen::MatrixXd features(10, 2);
    Eigen::VectorXd target(10);
    for (int r = 0; r < 10; ++r) {
        features(r, 0) = r;          // feature equals its row index
        features(r, 1) = 10.0 * r;
        target(r) = 100.0 + r;       // label encodes its row
    }
    Windowed w = window_supervised(features, target, 4, 0, 10);
    CHECK(w.x.size() == 6); // length 10, L=4

    for (std::size_t s = 0; s < w.x.size(); ++s) {
        std::size_t label_row = w.label_rows[s];
        CHECK(w.y[s] == doctest::Approx(100.0 + label_row));
        // The window ends one row before the label: no future data.
        CHECK(w.x[s](3, 0) == doctest::Approx(static_cast<double>(label_row - 1)));
        CHECK(w.x[s](0, 0) == doctest::Approx(static_cast<double>(label_row - 4)));
    }
}

TEST_CASE("constant features produce identical windows") {
    Eigen::MatrixXd features = Eigen::MatrixXd::Constant(12, 3, 2.5);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(12);
    Windowed w = window_supervised(features, target, 5, 0, 12);
    for (const auto& win : w.x) CHECK((win - w.x[0]).norm() == doctest::Approx(0.0));
}

TEST_CASE("window_supervised rejects an oversized lookback") {
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(6, 1);
    Eigen::VectorXd t = Eigen::VectorXd::Zero(6);
    CHECK_THROWS_AS(window_supervised(f, t, 6, 0, 6), DataError);
}

TEST_CASE("standardizer uses training rows only") {
    Rng rng(3);
    Eigen::MatrixXd features(100, 2);
    Eigen::VectorXd target(100);
    for (int r = 0; r < 100; ++r) {
        features(r, 0) = rng.normal(1.0, 2.0);
        features(r, 1) = rng.normal(-4.0, 0.5);
        target(r) = rng.normal();
    }
    Standardizer s = Standardizer::fit(features, target, 60);

    // Corrupting rows at or past the split must not change the statistics.
    Eigen::MatrixXd tampered = features;
    tampered.bottomRows(40).setConstant(1e6);
    Eigen::VectorXd tampered_target = target;
    tampered_target.tail(40).setConstant(-1e6);
    Standardizer s2 = Standardizer::fit(tampered, tampered_target, 60);
    CHECK((s.mean - s2.mean).norm() == doctest::Approx(0.0));
    CHECK((s.sd - s2.sd).norm() == doctest::Approx(0.0));
    CHECK(s.target_mean == s2.target_mean);

    Eigen::MatrixXd z = s.apply(features);
    CHECK(z.topRows(60).colwise().mean()(0) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
}

TEST_CASE("training drives a degenerate zero target to zero predictions") {
    Rng rng(5);
    Eigen::MatrixXd features(60, 2);
    for (int r = 0; r < 60; ++r)
        for (int c = 0; c < 2; ++c) features(r, c) = rng.normal();
    Eigen::VectorXd target = Eigen::VectorXd::Zero(60);

    Windowed train = window_supervised(features, target, 4, 0, 50);
    Hyperparams hp;
    hp.units = 4;
    hp.dropout = 0.0;
    hp.lookback = 4;
    hp.learning_rate = 1e-3;
    hp.optimizer = OptimizerKind::RMSprop;
    hp.batch_size = 64; // full batch keeps the gradient noise floor at zero
    TrainOptions opts;
    opts.max_epochs = 8000;
    opts.early_stopping = false;
    opts.plateau_patience = 20;
    opts.min_lr_fraction = 1e-5; // deep rate decay so the fit can settle
    TrainResult r = train_lstm(train, Windowed{}, hp, 42, opts);
    CHECK(r.train_loss_history.back() < 1e-6);
    Eigen::VectorXd pred = lstm_predict_batch(r.params, train.x);
    for (Eigen::Index i = 0; i < pred.size(); ++i)
        CHECK(std::abs(pred(i)) < 1e-3);
}

TEST_CASE("linear system beats the mean predictor by at least 50%") {
    Rng rng(11);
    Eigen::MatrixXd features;
    Eigen::VectorXd target;
    linear_system(400, rng, features, target);

    Standardizer s = Standardizer::fit(features, target, 300);
    Eigen::MatrixXd xs = s.apply(features);
    Eigen::VectorXd ys = (target.array() - s.target_mean) / s.target_sd;

    Windowed train = window_supervised(xs, ys, 4, 0, 260);
    Windowed val = window_supervised(xs, ys, 4, 260, 300);
    Windowed test = window_supervised(xs, ys, 4, 300, 400);

    Hyperparams hp;
    hp.units = 16;
    hp.dropout = 0.1;
    hp.lookback = 4;
    hp.learning_rate = 8e-3;
    hp.optimizer = OptimizerKind::Adam;
    hp.batch_size = 16;
    TrainOptions opts;
    opts.max_epochs = 80;
    opts.patience = 15;
    TrainResult r = train_lstm(train, val, hp, 7, opts);

    Eigen::VectorXd pred_z = lstm_predict_batch(r.params, test.x);
    std::vector<double> truth, pred, mean_pred;
    double train_mean = s.target_mean;
    for (std::size_t i = 0; i < test.y.size(); ++i) {
        truth.push_back(s.invert_target(test.y[i]));
        pred.push_back(s.invert_target(pred_z(static_cast<Eigen::Index>(i))));
        mean_pred.push_back(train_mean);
    }
    double model_rmse = rmse(truth, pred);
    double mean_rmse = rmse(truth, mean_pred);
    CHECK(model_rmse <= 0.5 * mean_rmse);

    // Loss history decreases after light smoothing.
    const auto& hist = r.train_loss_history;
    REQUIRE(hist.size() >= 10);
    auto smooth = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t k = i; k < i + 5; ++k) acc += hist[k];
        return acc / 5.0;
    };
    double early = smooth(0);
    double late = smooth(hist.size() - 5);
    CHECK(late < early);
}

TEST_CASE("training is deterministic for a fixed seed") {
    Rng rng(13);
    Eigen::MatrixXd features;
    Eigen::VectorXd target;
    linear_system(120, rng, features, target);
    Windowed train = window_supervised(features, target, 4, 0, 100);
    Windowed val = window_supervised(features, target, 4, 100, 120);
    Hyperparams hp;
    hp.units = 8;
    hp.lookback = 4;
    hp.dropout = 0.25;
    hp.learning_rate = 1e-3;
    hp.batch_size = 8;
    TrainOptions opts;
    opts.max_epochs = 10;
    TrainResult a = train_lstm(train, val, hp, 99, opts);
    TrainResult b = train_lstm(train, val, hp, 99, opts);
    CHECK((a.params.flatten() - b.params.flatten()).norm() == doctest::Approx(0.0));
    CHECK(a.best_val_loss == b.best_val_loss);

    TrainResult c = train_lstm(train, val, hp, 100, opts);
    CHECK((a.params.flatten() - c.params.flatten()).norm() > 0.0);
}

TEST_CASE("divergent loss raises with the last finite epoch") {
    Eigen::MatrixXd features = Eigen::MatrixXd::Constant(40, 1, 1.0);
    Eigen::VectorXd target = Eigen::VectorXd::Constant(40, 1e308);
    Windowed train = window_supervised(features, target, 4, 0, 40);
    Hyperparams hp;
    hp.units = 4;
    hp.lookback = 4;
    TrainOptions opts;
    opts.max_epochs = 3;
    opts.early_stopping = false;
    CHECK_THROWS_AS(train_lstm(train, Windowed{}, hp, 1, opts), NumericError);
}

TEST_CASE("checkpoint round trip") {
    namespace fs = std::filesystem;
    Rng rng(17);
    LstmParams p = LstmParams::init(3, 4, rng);
    Hyperparams hp;
    hp.units = 4;
    hp.lookback = 5;
    hp.optimizer = OptimizerKind::RMSprop;
    hp.epochs = 23;
    Standardizer s;
    s.mean = Eigen::VectorXd::Constant(3, 1.5);
    s.sd = Eigen::VectorXd::Constant(3, 2.0);
    s.target_mean = 0.01;
    s.target_sd = 0.1;

    fs::path path = fs::temp_directory_path() / "nml_ckpt_test.json";
    save_lstm_checkpoint(path.string(), p, hp, s, 777);
    LstmCheckpoint ck = load_lstm_checkpoint(path.string());
    CHECK((ck.params.flatten() - p.flatten()).norm() == doctest::Approx(0.0));
    CHECK(ck.hp.optimizer == OptimizerKind::RMSprop);
    CHECK(ck.hp.epochs == 23);
    CHECK(ck.scaler.target_sd == doctest::Approx(0.1));
    CHECK(ck.seed == 777);
    fs::remove(path);
}
