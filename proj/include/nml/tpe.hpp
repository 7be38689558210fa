#ifndef NML_TPE_HPP
#define NML_TPE_HPP

#include <functional>
#include <vector>

#include "nml/rng.hpp"
#include "nml/training.hpp"

namespace nml {

/// Hyperparameter search domains.
struct HpSpace {
    std::vector<int> units{8, 16, 32, 64};
    std::pair<double, double> dropout{0.1, 0.45};
    std::vector<int> lookback{4, 8, 13};
    std::pair<double, double> learning_rate{1e-4, 1e-3}; // sampled log-uniform
    std::vector<OptimizerKind> optimizers{OptimizerKind::Adam, OptimizerKind::RMSprop};
    std::vector<int> batch_sizes{8, 16};
};

struct TpeTrial {
    Hyperparams hp;
    double loss = 0.0;
    bool ok = false;
    std::string error;
};

struct TpeOptions {
    int trials = 75;
    int warmup = 15;     // random trials before the density model kicks in
    double gamma = 0.25; // loss quantile separating good from bad trials
    int candidates = 24; // draws scored by the good/bad density ratio
};

/// Tree-structured Parzen estimator search. Continuous dimensions use Gaussian
/// kernel densities (learning rate in log space); discrete dimensions use
/// add-one-smoothed category frequencies. Returns the argmin-loss trial.
/// Objective exceptions mark the trial failed; throws only if every trial fails.
Hyperparams tpe_search(const HpSpace& space,
                       const std::function<double(const Hyperparams&)>& objective,
                       const TpeOptions& options, Rng& rng,
                       std::vector<TpeTrial>* history = nullptr);

} // namespace nml

#endif
