#pragma once

#include <functional>
#include <vector>

namespace mrfut {

struct SimplexResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free Nelder-Mead minimization. Stops when the simplex
// diameter falls below tol relative to the centroid scale, or after
// max_iter iterations.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double step, double tol, int max_iter);

}  // namespace mrfut
