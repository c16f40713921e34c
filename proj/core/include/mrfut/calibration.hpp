#pragma once

#include <optional>

#include "mrfut/pricing.hpp"

namespace mrfut {

struct CalibrationResult {
    SpotModel params;      // risk-neutral fields populated; historical mirrors them
    double sse = 0.0;      // sum of squared price errors
    int iterations = 0;
    bool converged = false;
};

// Least-squares fit of the risk-neutral parameters to an observed term
// structure. OU/CIR fit (mu_q, theta_q); XOU fits (mu_q, theta_q, sigma)
// unless sigma_fixed is given. Multi-start Nelder-Mead on a log/exp
// reparameterization keeping mu_q (and theta_q for CIR/XOU) positive.
CalibrationResult calibrate(ModelKind kind, double s0, const FuturesCurve& curve,
                            std::optional<double> sigma_fixed = std::nullopt);

}  // namespace mrfut
