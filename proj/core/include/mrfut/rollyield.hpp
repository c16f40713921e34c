#pragma once

#include <optional>

#include "mrfut/pricing.hpp"

namespace mrfut {

// Futures maturities T_1 < T_2 < ... used by the rolling strategy.
// The contract held on (T_{j-1}, T_j] expires at T_j.
struct RollSchedule {
    std::vector<double> maturities;

    // zero-based index of the contract active at time t, i.e. the smallest
    // j with T_{j-1} < t <= T_j (t = 0 maps to the first contract)
    int contract_index(double t) const;
    double active_maturity(double t) const { return maturities.at(contract_index(t)); }
};

std::vector<std::string> validate(const RollSchedule& schedule);

struct RollDecomposition {
    double basis_return = 0.0;
    double roll_adjustment = 0.0;
    double total = 0.0;  // = basis_return + roll_adjustment
};

// R(t1,t2,T) = (f_{t2} - f_{t1}) - (S_{t2} - S_{t1}) on one simulated path;
// times snap down to the path grid.
double roll_yield(const SpotModel& model, const PathSet& paths, int path,
                  double t1, double t2, double T);

// Cumulative roll yield R(0,t) across rollovers, split into basis return
// and cumulative roll adjustment. For t <= T_1 the adjustment is zero.
RollDecomposition cumulative_roll_yield(const SpotModel& model, const PathSet& paths, int path,
                                        const RollSchedule& schedule, double t);

// Closed-form E{R(0,t)} under the historical measure.
double expected_roll_yield(const SpotModel& model, double s0,
                           const RollSchedule& schedule, double t);

// Drift of dR(0,t) expressed in terms of the current spot.
double roll_yield_drift(const SpotModel& model, double t, double s,
                        const RollSchedule& schedule);

// Instantaneous covariation rate dR(0,t) dS_t / dt for the contract with
// maturity T. OU: sigma^2 (e^{-mu_q(T-t)} - 1); CIR: the same times s;
// XOU: sigma^2 (e^{-mu_q(T-t)} f - s) s.
double covariation_rate(const SpotModel& model, double t, double s, double T);

// Spot level at which the OU/CIR roll-yield drift changes sign. Returns
// nullopt when mu == mu_q scales the formula degenerate (the threshold is
// theta when theta == theta_q, indeterminate otherwise).
std::optional<double> roll_drift_threshold(const SpotModel& model, double t,
                                           const RollSchedule& schedule);

}  // namespace mrfut
