#include "nml/lstm.hpp"

#include <cmath>

#include "nml/errors.hpp"

namespace nml {

namespace {

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& x) {
    return ((-x.array()).exp() + 1.0).inverse().matrix();
}

} // namespace

LstmParams LstmParams::zeros(int input_size, int units) {
    LstmParams p;
    p.input_size = input_size;
    p.units = units;
    p.w_ih = Eigen::MatrixXd::Zero(4 * units, input_size);
    p.w_hh = Eigen::MatrixXd::Zero(4 * units, units);
    p.bias = Eigen::VectorXd::Zero(4 * units);
    p.head_w = Eigen::VectorXd::Zero(units);
    p.head_b = 0.0;
    return p;
}

LstmParams LstmParams::init(int input_size, int units, Rng& rng) {
    LstmParams p = zeros(input_size, units);
    auto glorot = [&](Eigen::MatrixXd& m, int fan_in, int fan_out) {
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (int r = 0; r < m.rows(); ++r)
            for (int c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-limit, limit);
    };
    glorot(p.w_ih, input_size, units);
    glorot(p.w_hh, units, units);
    // Forget-gate bias at 1 keeps early memory open.
    p.bias.segment(units, units).setOnes();
    double limit = std::sqrt(6.0 / (units + 1));
    for (int i = 0; i < units; ++i) p.head_w(i) = rng.uniform(-limit, limit);
    return p;
}

std::size_t LstmParams::parameter_count() const {
    return static_cast<std::size_t>(w_ih.size() + w_hh.size() + bias.size() + head_w.size() + 1);
}

Eigen::VectorXd LstmParams::flatten() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index o = 0;
    v.segment(o, w_ih.size()) = Eigen::Map<const Eigen::VectorXd>(w_ih.data(), w_ih.size());
    o += w_ih.size();
    v.segment(o, w_hh.size()) = Eigen::Map<const Eigen::VectorXd>(w_hh.data(), w_hh.size());
    o += w_hh.size();
    v.segment(o, bias.size()) = bias;
    o += bias.size();
    v.segment(o, head_w.size()) = head_w;
    o += head_w.size();
    v(o) = head_b;
    return v;
}

LstmParams LstmParams::unflatten(const Eigen::VectorXd& v, int input_size, int units) {
    LstmParams p = zeros(input_size, units);
    if (v.size() != static_cast<Eigen::Index>(p.parameter_count()))
        throw DataError("LstmParams::unflatten: size mismatch");
    Eigen::Index o = 0;
    Eigen::Map<Eigen::VectorXd>(p.w_ih.data(), p.w_ih.size()) = v.segment(o, p.w_ih.size());
    o += p.w_ih.size();
    Eigen::Map<Eigen::VectorXd>(p.w_hh.data(), p.w_hh.size()) = v.segment(o, p.w_hh.size());
    o += p.w_hh.size();
    p.bias = v.segment(o, p.bias.size());
    o += p.bias.size();
    p.head_w = v.segment(o, p.head_w.size());
    o += p.head_w.size();
    p.head_b = v(o);
    return p;
}

LstmGrads LstmGrads::zeros(const LstmParams& p) {
    LstmGrads g;
    g.w_ih = Eigen::MatrixXd::Zero(p.w_ih.rows(), p.w_ih.cols());
    g.w_hh = Eigen::MatrixXd::Zero(p.w_hh.rows(), p.w_hh.cols());
    g.bias = Eigen::VectorXd::Zero(p.bias.size());
    g.head_w = Eigen::VectorXd::Zero(p.head_w.size());
    g.head_b = 0.0;
    return g;
}

Eigen::VectorXd LstmGrads::flatten() const {
    Eigen::VectorXd v(w_ih.size() + w_hh.size() + bias.size() + head_w.size() + 1);
    Eigen::Index o = 0;
    v.segment(o, w_ih.size()) = Eigen::Map<const Eigen::VectorXd>(w_ih.data(), w_ih.size());
    o += w_ih.size();
    v.segment(o, w_hh.size()) = Eigen::Map<const Eigen::VectorXd>(w_hh.data(), w_hh.size());
    o += w_hh.size();
    v.segment(o, bias.size()) = bias;
    o += bias.size();
    v.segment(o, head_w.size()) = head_w;
    o += head_w.size();
    v(o) = head_b;
    return v;
}

double LstmGrads::global_norm() const {
    double sq = w_ih.squaredNorm() + w_hh.squaredNorm() + bias.squaredNorm() +
                head_w.squaredNorm() + head_b * head_b;
    return std::sqrt(sq);
}

void LstmGrads::scale(double s) {
    w_ih *= s;
    w_hh *= s;
    bias *= s;
    head_w *= s;
    head_b *= s;
}

double clip_global_norm(LstmGrads& grads, double max_norm) {
    double norm = grads.global_norm();
    if (norm > max_norm && norm > 0.0) {
        grads.scale(max_norm / norm);
        return max_norm;
    }
    return norm;
}

Eigen::VectorXd lstm_forward(const LstmParams& p, const std::vector<Eigen::MatrixXd>& steps,
                             LstmCache* cache, const Eigen::MatrixXd* dropout_mask) {
    if (steps.empty()) throw DataError("lstm_forward: no time steps");
    const int u = p.units;
    const Eigen::Index batch = steps[0].rows();
    for (const auto& s : steps)
        if (s.rows() != batch || s.cols() != p.input_size)
            throw DataError("lstm_forward: step shape mismatch");

    if (cache) {
        cache->gate_i.clear();
        cache->gate_f.clear();
        cache->gate_g.clear();
        cache->gate_o.clear();
        cache->cell.clear();
        cache->tanh_cell.clear();
        cache->hidden.clear();
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(batch, u);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(batch, u);
    for (const auto& x : steps) {
        Eigen::MatrixXd z = x * p.w_ih.transpose() + h * p.w_hh.transpose();
        z.rowwise() += p.bias.transpose();
        Eigen::MatrixXd gi = sigmoid(z.leftCols(u));
        Eigen::MatrixXd gf = sigmoid(z.middleCols(u, u));
        Eigen::MatrixXd gg = z.middleCols(2 * u, u).array().tanh().matrix();
        Eigen::MatrixXd go = sigmoid(z.rightCols(u));
        c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
        Eigen::MatrixXd tc = c.array().tanh().matrix();
        h = go.cwiseProduct(tc);
        if (cache) {
            cache->gate_i.push_back(gi);
            cache->gate_f.push_back(gf);
            cache->gate_g.push_back(gg);
            cache->gate_o.push_back(go);
            cache->cell.push_back(c);
            cache->tanh_cell.push_back(tc);
            cache->hidden.push_back(h);
        }
    }

    Eigen::MatrixXd h_out = dropout_mask ? h.cwiseProduct(*dropout_mask) : h;
    Eigen::VectorXd pred = h_out * p.head_w;
    pred.array() += p.head_b;
    if (cache) {
        cache->dropped_hidden = h_out;
        cache->prediction = pred;
    }
    return pred;
}

double lstm_backward(const LstmParams& p, const std::vector<Eigen::MatrixXd>& steps,
                     const Eigen::VectorXd& targets, const LstmCache& cache,
                     const Eigen::MatrixXd* dropout_mask, LstmGrads& grads) {
    const int u = p.units;
    const int L = static_cast<int>(steps.size());
    const Eigen::Index batch = steps[0].rows();
    if (targets.size() != batch) throw DataError("lstm_backward: target size mismatch");

    grads = LstmGrads::zeros(p);

    Eigen::VectorXd err = cache.prediction - targets;
    const double mse = err.squaredNorm() / static_cast<double>(batch);
    Eigen::VectorXd dpred = 2.0 * err / static_cast<double>(batch);

    grads.head_w = cache.dropped_hidden.transpose() * dpred;
    grads.head_b = dpred.sum();

    Eigen::MatrixXd dh = dpred * p.head_w.transpose(); // B x u
    if (dropout_mask) dh = dh.cwiseProduct(*dropout_mask);
    Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(batch, u);

    for (int t = L - 1; t >= 0; --t) {
        const auto& gi = cache.gate_i[t];
        const auto& gf = cache.gate_f[t];
        const auto& gg = cache.gate_g[t];
        const auto& go = cache.gate_o[t];
        const auto& tc = cache.tanh_cell[t];
        const Eigen::MatrixXd c_prev =
            t > 0 ? cache.cell[t - 1] : Eigen::MatrixXd::Zero(batch, u);
        const Eigen::MatrixXd h_prev =
            t > 0 ? cache.hidden[t - 1] : Eigen::MatrixXd::Zero(batch, u);

        Eigen::MatrixXd dgo = dh.cwiseProduct(tc);
        dc += dh.cwiseProduct(go).cwiseProduct(
            (1.0 - tc.array().square()).matrix());

        Eigen::MatrixXd dgi = dc.cwiseProduct(gg);
        Eigen::MatrixXd dgg = dc.cwiseProduct(gi);
        Eigen::MatrixXd dgf = dc.cwiseProduct(c_prev);

        Eigen::MatrixXd dz(batch, 4 * u);
        dz.leftCols(u) = dgi.cwiseProduct(gi).cwiseProduct((1.0 - gi.array()).matrix());
        dz.middleCols(u, u) = dgf.cwiseProduct(gf).cwiseProduct((1.0 - gf.array()).matrix());
        dz.middleCols(2 * u, u) = dgg.cwiseProduct((1.0 - gg.array().square()).matrix());
        dz.rightCols(u) = dgo.cwiseProduct(go).cwiseProduct((1.0 - go.array()).matrix());

        grads.w_ih.noalias() += dz.transpose() * steps[t];
        grads.w_hh.noalias() += dz.transpose() * h_prev;
        grads.bias += dz.colwise().sum().transpose();

        dh.noalias() = dz * p.w_hh;
        dc = dc.cwiseProduct(gf);
    }
    return mse;
}

double lstm_predict(const LstmParams& p, const Eigen::MatrixXd& window) {
    if (window.cols() != p.input_size)
        throw DataError("lstm_predict: window feature count mismatch");
    std::vector<Eigen::MatrixXd> steps;
    steps.reserve(static_cast<std::size_t>(window.rows()));
    for (Eigen::Index t = 0; t < window.rows(); ++t) steps.push_back(window.row(t));
    return lstm_forward(p, steps)(0);
}

Eigen::VectorXd lstm_predict_batch(const LstmParams& p,
                                   const std::vector<Eigen::MatrixXd>& windows) {
    if (windows.empty()) return Eigen::VectorXd();
    const Eigen::Index L = windows[0].rows();
    std::vector<Eigen::MatrixXd> steps(static_cast<std::size_t>(L));
    for (Eigen::Index t = 0; t < L; ++t) {
        steps[t].resize(static_cast<Eigen::Index>(windows.size()), p.input_size);
        for (std::size_t b = 0; b < windows.size(); ++b) {
            if (windows[b].rows() != L || windows[b].cols() != p.input_size)
                throw DataError("lstm_predict_batch: window shape mismatch");
            steps[t].row(static_cast<Eigen::Index>(b)) = windows[b].row(t);
        }
    }
    return lstm_forward(p, steps);
}

} // namespace nml
