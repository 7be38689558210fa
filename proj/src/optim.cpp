#include "nml/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nml {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> x0, double step, double ftol, int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (x0[i] != 0.0 ? 0.05 * std::abs(x0[i]) + step : step);

    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

    NelderMeadResult result;
    int iter = 0;
    while (iter < max_iter) {
        // Order best..worst.
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::size_t best = idx[0], worst = idx[n], second_worst = idx[n - 1];

        if (std::isfinite(fx[best]) && std::isfinite(fx[worst]) &&
            std::abs(fx[worst] - fx[best]) <= ftol * (std::abs(fx[best]) + ftol)) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t d = 0; d < n; ++d)
                p[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
            return p;
        };

        std::vector<double> reflected = blend(-1.0);
        double f_ref = f(reflected);
        if (f_ref < fx[best]) {
            std::vector<double> expanded = blend(-2.0);
            double f_exp = f(expanded);
            if (f_exp < f_ref) {
                simplex[worst] = std::move(expanded);
                fx[worst] = f_exp;
            } else {
                simplex[worst] = std::move(reflected);
                fx[worst] = f_ref;
            }
        } else if (f_ref < fx[second_worst]) {
            simplex[worst] = std::move(reflected);
            fx[worst] = f_ref;
        } else {
            std::vector<double> contracted = blend(0.5);
            double f_con = f(contracted);
            if (f_con < fx[worst]) {
                simplex[worst] = std::move(contracted);
                fx[worst] = f_con;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    fx[i] = f(simplex[i]);
                }
            }
        }
        ++iter;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;
    result.x = simplex[best];
    result.fx = fx[best];
    result.iterations = iter;
    return result;
}

} // namespace nml
