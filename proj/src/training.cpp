#include "nml/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "nml/errors.hpp"

namespace nml {

using json = nlohmann::json;

const char* to_string(OptimizerKind k) {
    return k == OptimizerKind::Adam ? "Adam" : "RMSprop";
}

OptimizerKind optimizer_from_string(const std::string& s) {
    if (s == "Adam" || s == "adam") return OptimizerKind::Adam;
    if (s == "RMSprop" || s == "rmsprop") return OptimizerKind::RMSprop;
    throw DataError("unknown optimizer: " + s);
}

Windowed window_supervised(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                           int lookback, std::size_t label_begin, std::size_t label_end) {
    if (lookback < 1) throw DataError("window_supervised: lookback must be >= 1");
    if (features.rows() != target.size())
        throw DataError("window_supervised: feature/target row mismatch");
    if (lookback >= features.rows())
        throw DataError("window_supervised: lookback exceeds series length");
    if (label_end > static_cast<std::size_t>(features.rows()))
        throw DataError("window_supervised: label range exceeds panel");

    Windowed out;
    const std::size_t lb = static_cast<std::size_t>(lookback);
    for (std::size_t r = std::max(label_begin, lb); r < label_end; ++r) {
        // Label at row r; the window covers rows [r-L, r).
        out.x.push_back(features.middleRows(static_cast<Eigen::Index>(r - lb), lookback));
        out.y.push_back(target(static_cast<Eigen::Index>(r)));
        out.label_rows.push_back(r);
    }
    return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                               std::size_t train_rows) {
    if (train_rows < 2 || train_rows > static_cast<std::size_t>(features.rows()))
        throw DataError("Standardizer: bad training row count");
    const auto block = features.topRows(static_cast<Eigen::Index>(train_rows));
    Standardizer s;
    s.mean = block.colwise().mean();
    Eigen::MatrixXd centered = block.rowwise() - s.mean.transpose();
    s.sd = (centered.array().square().colwise().mean()).sqrt();
    for (Eigen::Index i = 0; i < s.sd.size(); ++i)
        if (s.sd(i) <= 0.0) s.sd(i) = 1.0; // constant columns pass through

    const auto t = target.head(static_cast<Eigen::Index>(train_rows));
    s.target_mean = t.mean();
    double var = (t.array() - s.target_mean).square().mean();
    s.target_sd = var > 0.0 ? std::sqrt(var) : 1.0;
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
    Eigen::MatrixXd out = features.rowwise() - mean.transpose();
    out.array().rowwise() /= sd.transpose().array();
    return out;
}

namespace {

struct OptimizerState {
    Eigen::VectorXd m, v;
    int step = 0;
};

void apply_update(Eigen::VectorXd& params, const Eigen::VectorXd& grads, OptimizerState& state,
                  OptimizerKind kind, double lr) {
    constexpr double eps = 1e-8;
    state.step += 1;
    if (kind == OptimizerKind::Adam) {
        constexpr double b1 = 0.9, b2 = 0.999;
        state.m = b1 * state.m + (1.0 - b1) * grads;
        state.v = b2 * state.v.array() + (1.0 - b2) * grads.array().square();
        double corr1 = 1.0 - std::pow(b1, state.step);
        double corr2 = 1.0 - std::pow(b2, state.step);
        params.array() -=
            lr * (state.m.array() / corr1) / ((state.v.array() / corr2).sqrt() + eps);
    } else {
        constexpr double rho = 0.9;
        state.v = rho * state.v.array() + (1.0 - rho) * grads.array().square();
        params.array() -= lr * grads.array() / (state.v.array().sqrt() + eps);
    }
}

std::vector<Eigen::MatrixXd> gather_steps(const Windowed& data,
                                          const std::vector<std::size_t>& order,
                                          std::size_t begin, std::size_t end, int lookback,
                                          int input_size) {
    std::vector<Eigen::MatrixXd> steps(static_cast<std::size_t>(lookback));
    const Eigen::Index bsz = static_cast<Eigen::Index>(end - begin);
    for (int t = 0; t < lookback; ++t) steps[t].resize(bsz, input_size);
    for (std::size_t k = begin; k < end; ++k) {
        const Eigen::MatrixXd& w = data.x[order[k]];
        for (int t = 0; t < lookback; ++t)
            steps[t].row(static_cast<Eigen::Index>(k - begin)) = w.row(t);
    }
    return steps;
}

double evaluate_mse(const LstmParams& params, const Windowed& data) {
    if (data.x.empty()) return 0.0;
    Eigen::VectorXd pred = lstm_predict_batch(params, data.x);
    double mse = 0.0;
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        double d = pred(static_cast<Eigen::Index>(i)) - data.y[i];
        mse += d * d;
    }
    return mse / static_cast<double>(data.y.size());
}

} // namespace

TrainResult train_lstm(const Windowed& train, const Windowed& validation, const Hyperparams& hp,
                       std::uint64_t seed, const TrainOptions& options) {
    if (train.x.empty()) throw DataError("train_lstm: empty training set");
    const int lookback = static_cast<int>(train.x[0].rows());
    const int input_size = static_cast<int>(train.x[0].cols());
    const bool use_early = options.early_stopping && !validation.x.empty();

    Rng rng = Rng::substream(seed, "lstm-train");
    LstmParams params = LstmParams::init(input_size, hp.units, rng);

    Eigen::VectorXd pvec = params.flatten();
    OptimizerState state;
    state.m = Eigen::VectorXd::Zero(pvec.size());
    state.v = Eigen::VectorXd::Zero(pvec.size());

    std::vector<std::size_t> order(train.x.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    double best_val = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_vec = pvec;
    int best_epoch = 0;
    int since_best = 0;

    double lr = hp.learning_rate;
    const double min_lr = hp.learning_rate * options.min_lr_fraction;
    double plateau_best = std::numeric_limits<double>::infinity();
    int since_plateau = 0;

    const int max_epochs = std::max(1, options.max_epochs);
    for (int epoch = 1; epoch <= max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += hp.batch_size) {
            std::size_t end = std::min(order.size(), begin + hp.batch_size);
            auto steps = gather_steps(train, order, begin, end, lookback, input_size);
            Eigen::VectorXd targets(static_cast<Eigen::Index>(end - begin));
            for (std::size_t k = begin; k < end; ++k)
                targets(static_cast<Eigen::Index>(k - begin)) = train.y[order[k]];

            Eigen::MatrixXd mask;
            const Eigen::MatrixXd* mask_ptr = nullptr;
            if (hp.dropout > 0.0) {
                mask.resize(targets.size(), hp.units);
                const double keep = 1.0 - hp.dropout;
                for (Eigen::Index r = 0; r < mask.rows(); ++r)
                    for (Eigen::Index c = 0; c < mask.cols(); ++c)
                        mask(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
                mask_ptr = &mask;
            }

            LstmCache cache;
            lstm_forward(params, steps, &cache, mask_ptr);
            LstmGrads grads;
            double loss = lstm_backward(params, steps, targets, cache, mask_ptr, grads);
            if (!std::isfinite(loss))
                throw NumericError("train_lstm: loss diverged at epoch " + std::to_string(epoch) +
                                   " (last finite epoch " + std::to_string(epoch - 1) + ")");
            epoch_loss += loss;
            ++batches;

            clip_global_norm(grads, hp.clipnorm);

            Eigen::VectorXd gvec = grads.flatten();
            apply_update(pvec, gvec, state, hp.optimizer, lr);
            params = LstmParams::unflatten(pvec, input_size, hp.units);
        }
        double train_loss = epoch_loss / static_cast<double>(batches);
        result.train_loss_history.push_back(train_loss);

        double monitored = train_loss;
        if (use_early) {
            double val_loss = evaluate_mse(params, validation);
            if (!std::isfinite(val_loss))
                throw NumericError("train_lstm: validation loss diverged at epoch " +
                                   std::to_string(epoch));
            monitored = val_loss;
            if (val_loss < best_val) {
                best_val = val_loss;
                best_vec = pvec;
                best_epoch = epoch;
                since_best = 0;
            } else if (++since_best >= options.patience) {
                break;
            }
        } else {
            best_vec = pvec;
            best_epoch = epoch;
        }

        // Adaptive learning rate: halve when the monitored loss stops
        // improving by a meaningful (0.1% relative) margin.
        if (monitored < plateau_best * (1.0 - 1e-3)) {
            plateau_best = monitored;
            since_plateau = 0;
        } else if (++since_plateau >= options.plateau_patience) {
            lr = std::max(min_lr, lr * options.plateau_factor);
            plateau_best = std::min(plateau_best, monitored);
            since_plateau = 0;
        }
    }

    result.params = LstmParams::unflatten(best_vec, input_size, hp.units);
    result.stopped_epoch = best_epoch;
    result.best_val_loss = use_early ? best_val
                                     : (validation.x.empty() ? result.train_loss_history.back()
                                                             : evaluate_mse(result.params, validation));
    return result;
}

double rmse(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw DataError("rmse: length mismatch or empty");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        s += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    return std::sqrt(s / static_cast<double>(truth.size()));
}

double mae(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw DataError("mae: length mismatch or empty");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) s += std::abs(truth[i] - pred[i]);
    return s / static_cast<double>(truth.size());
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

} // namespace

void save_lstm_checkpoint(const std::string& path, const LstmParams& params,
                          const Hyperparams& hp, const Standardizer& scaler,
                          std::uint64_t seed) {
    json j;
    j["format"] = "nml-lstm-v1";
    j["shape"] = {{"input_size", params.input_size}, {"units", params.units},
                  {"lookback", hp.lookback}};
    j["hyperparams"] = {{"units", hp.units},
                        {"dropout", hp.dropout},
                        {"lookback", hp.lookback},
                        {"learning_rate", hp.learning_rate},
                        {"optimizer", to_string(hp.optimizer)},
                        {"batch_size", hp.batch_size},
                        {"clipnorm", hp.clipnorm},
                        {"epochs", hp.epochs}};
    j["weights"] = vec_to_json(params.flatten());
    j["scaler"] = {{"mean", vec_to_json(scaler.mean)},
                   {"sd", vec_to_json(scaler.sd)},
                   {"target_mean", scaler.target_mean},
                   {"target_sd", scaler.target_sd}};
    j["seed"] = seed;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write checkpoint " + path);
    out << j.dump(2) << '\n';
}

LstmCheckpoint load_lstm_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != "nml-lstm-v1")
        throw DataError("bad checkpoint format: " + path);
    LstmCheckpoint ck;
    const auto& hp = j.at("hyperparams");
    ck.hp.units = hp.at("units").get<int>();
    ck.hp.dropout = hp.at("dropout").get<double>();
    ck.hp.lookback = hp.at("lookback").get<int>();
    ck.hp.learning_rate = hp.at("learning_rate").get<double>();
    ck.hp.optimizer = optimizer_from_string(hp.at("optimizer").get<std::string>());
    ck.hp.batch_size = hp.at("batch_size").get<int>();
    ck.hp.clipnorm = hp.at("clipnorm").get<double>();
    ck.hp.epochs = hp.at("epochs").get<int>();
    int input_size = j.at("shape").at("input_size").get<int>();
    int units = j.at("shape").at("units").get<int>();
    ck.params = LstmParams::unflatten(vec_from_json(j.at("weights")), input_size, units);
    ck.scaler.mean = vec_from_json(j.at("scaler").at("mean"));
    ck.scaler.sd = vec_from_json(j.at("scaler").at("sd"));
    ck.scaler.target_mean = j.at("scaler").at("target_mean").get<double>();
    ck.scaler.target_sd = j.at("scaler").at("target_sd").get<double>();
    ck.seed = j.at("seed").get<std::uint64_t>();
    return ck;
}

} // namespace nml
