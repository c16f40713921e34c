#pragma once

#include "mrfut/vi_solver.hpp"

namespace mrfut {

enum class LiquidationVerdict { HoldToMaturity, LiquidateNow, Indeterminate };

const char* to_string(LiquidationVerdict v);

struct SignBox {
    double s_lo = 0.0, s_hi = 0.0;
    int n_u = 201, n_s = 201;
};

// default sampling box: [0, 3 max(s0, theta_q)] for OU/CIR, the log-analogue
// for XOU (lower edge kept positive)
SignBox default_sign_box(const SpotModel& model, double s0);

struct LiquidationAdvice {
    LiquidationVerdict verdict = LiquidationVerdict::Indeterminate;
    SignBox box;
    long n_negative = 0, n_positive = 0, n_zero = 0;
};

// Integrand of the delayed liquidation premium: G(u,s) for OU/CIR, the XOU
// analogue otherwise. t is the analysis time, u in [t, T].
double premium_integrand(const SpotModel& model, const ContractSpec& contract,
                         double t, double u, double s);

// Exhaustive sign check of the integrand on the sampled (u, s) box. The
// verdict applies to the sampled box only.
LiquidationAdvice classify_liquidation(const SpotModel& model, const ContractSpec& contract,
                                       double t, const SignBox& box);

// L(t,s) = V(t,s) - (f(t,s;T) - c) with the solver run to deadline T.
double delayed_liquidation_premium(const SpotModel& model, const ContractSpec& contract,
                                   const GridSpec& grid, double t, double s,
                                   const GeneratorConfig& gen = GeneratorConfig::historical());

// Full premium surface on the grid (same V-solve, all nodes).
ValueSurface liquidation_value_surface(const SpotModel& model, const ContractSpec& contract,
                                       const GridSpec& grid,
                                       const GeneratorConfig& gen = GeneratorConfig::historical());

}  // namespace mrfut
