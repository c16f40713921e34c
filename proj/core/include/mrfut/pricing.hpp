#pragma once

#include <string>
#include <vector>

#include "mrfut/model.hpp"

namespace mrfut {

struct ContractSpec {
    double maturity_T = 0.0;    // years
    double deadline_That = 0.0; // trading deadline, 0 < That <= T
    double rate_r = 0.0;        // discount rate, per year
    double cost_c = 0.0;        // transaction cost (exit leg)
    double cost_chat = 0.0;     // transaction cost (entry leg)
};

std::vector<std::string> validate(const ContractSpec& contract);

enum class Slope { Up, Down, Flat };
enum class Curvature { Convex, Concave, Flat };

struct TermStructureRegime {
    Slope slope = Slope::Flat;
    Curvature curvature = Curvature::Flat;
};

const char* to_string(Slope s);
const char* to_string(Curvature c);

struct FuturesCurve {
    std::vector<double> maturities;  // years, strictly increasing
    std::vector<double> prices;
    double s0 = 0.0;
};

// f(t,s;T) = E^Q{S_T | S_t = s}.
// OU/CIR: (s - theta_q) e^{-mu_q (T-t)} + theta_q.
// XOU: lognormal mean of the risk-neutral log-price.
double futures_price(const SpotModel& model, double t, double s, double T);

// Drift of the futures price SDE under the historical measure, as a
// function of the current spot. OU/CIR: e^{-mu_q(T-t)} (mu(theta-s) - mu_q(theta_q-s)).
double futures_drift_p(const SpotModel& model, double t, double s, double T);

// Slope/curvature of the futures curve at maturity T for spot s0.
// Threshold equality (1e-12 relative) reports Flat components.
TermStructureRegime classify_term_structure(const SpotModel& model, double s0, double T);

FuturesCurve term_structure(const SpotModel& model, double s0, std::vector<double> maturities);

}  // namespace mrfut
