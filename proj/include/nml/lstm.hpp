#ifndef NML_LSTM_HPP
#define NML_LSTM_HPP

#include <Eigen/Dense>
#include <vector>

#include "nml/rng.hpp"

namespace nml {

/// Single-layer LSTM regressor: one recurrent layer of `units` cells followed
/// by a linear head. Gate rows in the stacked matrices are ordered
/// [input; forget; cell; output].
struct LstmParams {
    int input_size = 0;
    int units = 0;
    Eigen::MatrixXd w_ih;   // 4u x N
    Eigen::MatrixXd w_hh;   // 4u x u
    Eigen::VectorXd bias;   // 4u
    Eigen::VectorXd head_w; // u
    double head_b = 0.0;

    static LstmParams zeros(int input_size, int units);
    /// Glorot-uniform weights, forget-gate bias 1.
    static LstmParams init(int input_size, int units, Rng& rng);

    std::size_t parameter_count() const;
    /// Flatten/restore for generic optimizers and checkpoints.
    Eigen::VectorXd flatten() const;
    static LstmParams unflatten(const Eigen::VectorXd& v, int input_size, int units);
};

struct LstmGrads {
    Eigen::MatrixXd w_ih, w_hh;
    Eigen::VectorXd bias, head_w;
    double head_b = 0.0;

    static LstmGrads zeros(const LstmParams& p);
    Eigen::VectorXd flatten() const;
    double global_norm() const;
    void scale(double s);
};

/// Scale gradients so the global norm does not exceed `max_norm`.
/// Returns the post-clip norm.
double clip_global_norm(LstmGrads& grads, double max_norm);

/// Forward-pass activations kept for backpropagation through time.
struct LstmCache {
    std::vector<Eigen::MatrixXd> gate_i, gate_f, gate_g, gate_o; // B x u per step
    std::vector<Eigen::MatrixXd> cell, tanh_cell, hidden;        // B x u per step
    Eigen::MatrixXd dropped_hidden;                              // B x u, after mask
    Eigen::VectorXd prediction;                                  // B
};

/// Batched forward pass. `steps` holds L matrices of shape B x N (batch rows).
/// `dropout_mask` (B x u, nullable) is applied to the last hidden state only —
/// inverted dropout, so inference passes nullptr.
Eigen::VectorXd lstm_forward(const LstmParams& p, const std::vector<Eigen::MatrixXd>& steps,
                             LstmCache* cache = nullptr,
                             const Eigen::MatrixXd* dropout_mask = nullptr);

/// Mean-squared-error loss and full BPTT gradients for a batch.
/// Returns the batch MSE.
double lstm_backward(const LstmParams& p, const std::vector<Eigen::MatrixXd>& steps,
                     const Eigen::VectorXd& targets, const LstmCache& cache,
                     const Eigen::MatrixXd* dropout_mask, LstmGrads& grads);

/// Deterministic single-window prediction with dropout off.
double lstm_predict(const LstmParams& p, const Eigen::MatrixXd& window);

/// Batch of single windows (rows of each step gathered from the list).
Eigen::VectorXd lstm_predict_batch(const LstmParams& p,
                                   const std::vector<Eigen::MatrixXd>& windows);

} // namespace nml

#endif
