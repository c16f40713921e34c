#include "mrfut/premium.hpp"

#include <cmath>

namespace mrfut {

const char* to_string(LiquidationVerdict v) {
    switch (v) {
        case LiquidationVerdict::HoldToMaturity: return "HoldToMaturity";
        case LiquidationVerdict::LiquidateNow: return "LiquidateNow";
        case LiquidationVerdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

SignBox default_sign_box(const SpotModel& m, double s0) {
    SignBox box;
    box.s_hi = 3.0 * std::max(s0, m.kind == ModelKind::XOU ? std::exp(m.theta_q) : m.theta_q);
    box.s_lo = m.kind == ModelKind::XOU ? box.s_hi / 1000.0 : 0.0;
    return box;
}

double premium_integrand(const SpotModel& m, const ContractSpec& contract,
                         double t, double u, double s) {
    if (!(t <= u && u <= contract.maturity_T))
        throw std::invalid_argument("premium_integrand: need t <= u <= T");
    const double r = contract.rate_r;
    const double e = std::exp(-m.mu_q * (u - t));
    if (m.kind != ModelKind::XOU) {
        if (m.kind == ModelKind::CIR && s < 0.0)
            throw std::domain_error("CIR spot must be >= 0");
        return e * (m.mu * (m.theta - s) + (r - m.mu_q) * (m.theta_q - s)) +
               r * (contract.cost_c - m.theta_q);
    }
    if (!(s > 0.0)) throw std::domain_error("XOU spot must be > 0");
    const double x = std::log(s);
    const double sig2 = m.sigma * m.sigma;
    const double fwd = std::exp(e * x + (1.0 - e) * (m.theta_q - sig2 / (2.0 * m.mu_q)) +
                                sig2 / (4.0 * m.mu_q) * (1.0 - e * e));
    return (r + (m.mu * (m.theta - x) - m.mu_q * (m.theta_q - x)) * e) * fwd -
           r * contract.cost_c;
}

LiquidationAdvice classify_liquidation(const SpotModel& m, const ContractSpec& contract,
                                       double t, const SignBox& box) {
    if (box.n_u < 2 || box.n_s < 2)
        throw std::invalid_argument("classify_liquidation: need >= 2 samples per axis");
    LiquidationAdvice adv;
    adv.box = box;
    const double du = (contract.maturity_T - t) / (box.n_u - 1);
    const double dsv = (box.s_hi - box.s_lo) / (box.n_s - 1);
    for (int iu = 0; iu < box.n_u; ++iu) {
        const double u = t + iu * du;
        for (int is = 0; is < box.n_s; ++is) {
            double s = box.s_lo + is * dsv;
            if (m.kind == ModelKind::XOU && s <= 0.0) s = dsv * 1e-6;
            const double g = premium_integrand(m, contract, t, u, s);
            if (g > 0.0) ++adv.n_positive;
            else if (g < 0.0) ++adv.n_negative;
            else ++adv.n_zero;
        }
    }
    if (adv.n_negative == 0) adv.verdict = LiquidationVerdict::HoldToMaturity;
    else if (adv.n_positive == 0) adv.verdict = LiquidationVerdict::LiquidateNow;
    else adv.verdict = LiquidationVerdict::Indeterminate;
    return adv;
}

ValueSurface liquidation_value_surface(const SpotModel& m, const ContractSpec& contract,
                                       const GridSpec& grid, const GeneratorConfig& gen) {
    ContractSpec c = contract;
    c.deadline_That = contract.maturity_T;  // liquidation runs to maturity
    return solve_vi(
        m, gen, c, grid,
        [&](double t, double s) { return futures_price(m, t, s, c.maturity_T) - c.cost_c; },
        Sense::Max, ProblemTag::V);
}

double delayed_liquidation_premium(const SpotModel& m, const ContractSpec& contract,
                                   const GridSpec& grid, double t, double s,
                                   const GeneratorConfig& gen) {
    const ValueSurface v = liquidation_value_surface(m, contract, grid, gen);
    return v.value_at(t, s) - (futures_price(m, t, s, contract.maturity_T) - contract.cost_c);
}

}  // namespace mrfut
