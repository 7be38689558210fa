#ifndef NML_OPTIM_HPP
#define NML_OPTIM_HPP

#include <functional>
#include <vector>

namespace nml {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimizer (standard reflection/expansion/
/// contraction/shrink coefficients). The objective may return +inf to mark
/// infeasible points.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step = 0.1, double ftol = 1e-10,
                             int max_iter = 2000);

} // namespace nml

#endif
