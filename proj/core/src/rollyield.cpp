#include "mrfut/rollyield.hpp"

#include <cmath>
#include <stdexcept>

namespace mrfut {

int RollSchedule::contract_index(double t) const {
    if (maturities.empty()) throw std::invalid_argument("empty roll schedule");
    for (std::size_t j = 0; j < maturities.size(); ++j)
        if (t <= maturities[j] + 1e-12) return static_cast<int>(j);
    throw std::out_of_range("roll schedule exhausted before t");
}

std::vector<std::string> validate(const RollSchedule& schedule) {
    std::vector<std::string> v;
    if (schedule.maturities.empty()) v.push_back("schedule must have >= 1 maturity");
    for (std::size_t j = 0; j < schedule.maturities.size(); ++j) {
        if (!(schedule.maturities[j] > 0.0)) v.push_back("maturities must be positive");
        if (j > 0 && !(schedule.maturities[j] > schedule.maturities[j - 1]))
            v.push_back("maturities must be strictly increasing");
    }
    return v;
}

namespace {

// spot at the largest grid time <= t
double spot_at(const PathSet& paths, int path, double t, double* grid_time) {
    const int i = paths.step_at(t);
    if (t > paths.time_of(paths.n_steps) + 1e-12)
        throw std::out_of_range("time outside path coverage");
    if (grid_time) *grid_time = paths.time_of(i);
    return paths.at(path, i);
}

}  // namespace

double roll_yield(const SpotModel& model, const PathSet& paths, int path,
                  double t1, double t2, double T) {
    if (!(t1 < t2) || t2 > T + 1e-12)
        throw std::invalid_argument("roll_yield: need t1 < t2 <= T");
    double g1, g2;
    const double s1 = spot_at(paths, path, t1, &g1);
    const double s2 = spot_at(paths, path, t2, &g2);
    return (futures_price(model, g2, s2, T) - futures_price(model, g1, s1, T)) - (s2 - s1);
}

RollDecomposition cumulative_roll_yield(const SpotModel& model, const PathSet& paths, int path,
                                        const RollSchedule& schedule, double t) {
    const int i = schedule.contract_index(t);
    RollDecomposition d;
    double gt;
    const double st = spot_at(paths, path, t, &gt);
    const double s0 = paths.at(path, 0);
    const double T1 = schedule.maturities[0];
    d.basis_return = (futures_price(model, gt, st, schedule.maturities[i]) - st) -
                     (futures_price(model, 0.0, s0, T1) - s0);
    d.roll_adjustment = 0.0;
    for (int j = 0; j < i; ++j) {
        double gj;
        const double sj = spot_at(paths, path, schedule.maturities[j], &gj);
        d.roll_adjustment += sj - futures_price(model, gj, sj, schedule.maturities[j + 1]);
    }
    d.total = d.basis_return + d.roll_adjustment;
    return d;
}

namespace {

// E^P{f(t, S_t; T)} under the XOU model: the log-price is Gaussian, so the
// futures price is lognormal with a scaled mean and variance.
double expected_futures_xou(const SpotModel& m, double s0, double t, double T) {
    const double sig2 = m.sigma * m.sigma;
    const double ep = std::exp(-m.mu * t);
    const double mean_log = ep * std::log(s0) + (1.0 - ep) * (m.theta - sig2 / (2.0 * m.mu));
    const double var_log = sig2 * (1.0 - ep * ep) / (2.0 * m.mu);
    const double eq = std::exp(-m.mu_q * (T - t));
    return std::exp(eq * mean_log + 0.5 * eq * eq * var_log +
                    (1.0 - eq) * (m.theta_q - sig2 / (2.0 * m.mu_q)) +
                    sig2 / (4.0 * m.mu_q) * (1.0 - eq * eq));
}

}  // namespace

double expected_roll_yield(const SpotModel& m, double s0,
                           const RollSchedule& schedule, double t) {
    const int i = schedule.contract_index(t);
    const auto& Ts = schedule.maturities;

    if (m.kind != ModelKind::XOU) {
        double r = ((s0 - m.theta) * std::exp(-m.mu * t) + m.theta - m.theta_q) *
                       (std::exp(-m.mu_q * (Ts[i] - t)) - 1.0) -
                   (s0 - m.theta_q) * (std::exp(-m.mu_q * Ts[0]) - 1.0);
        for (int j = 0; j < i; ++j)
            r += ((s0 - m.theta) * std::exp(-m.mu * Ts[j]) + m.theta - m.theta_q) *
                 (1.0 - std::exp(-m.mu_q * (Ts[j + 1] - Ts[j])));
        return r;
    }

    const double y1 = expected_futures_xou(m, s0, t, Ts[i]) -
                      conditional_mean(m, Measure::Historical, s0, t);
    double y2 = 0.0;
    for (int j = 0; j < i; ++j)
        y2 += conditional_mean(m, Measure::Historical, s0, Ts[j]) -
              expected_futures_xou(m, s0, Ts[j], Ts[j + 1]);
    return y1 + y2 - (futures_price(m, 0.0, s0, Ts[0]) - s0);
}

double roll_yield_drift(const SpotModel& m, double t, double s,
                        const RollSchedule& schedule) {
    const double Ti = schedule.active_maturity(t);
    const double e = std::exp(-m.mu_q * (Ti - t));
    if (m.kind != ModelKind::XOU)
        return e * (m.mu * (m.theta - s) - m.mu_q * (m.theta_q - s)) - m.mu * (m.theta - s);
    if (!(s > 0.0)) throw std::domain_error("XOU spot must be > 0");
    const double x = std::log(s);
    return (x * (m.mu_q - m.mu) + (m.mu * m.theta - m.mu_q * m.theta_q)) *
               futures_price(m, t, s, Ti) * e -
           m.mu * (m.theta - x) * s;
}

double covariation_rate(const SpotModel& m, double t, double s, double T) {
    if (t > T) throw std::invalid_argument("covariation_rate: t > T");
    const double sig2 = m.sigma * m.sigma;
    const double e = std::exp(-m.mu_q * (T - t));
    switch (m.kind) {
        case ModelKind::OU: return sig2 * (e - 1.0);
        case ModelKind::CIR:
            if (s < 0.0) throw std::domain_error("CIR spot must be >= 0");
            return sig2 * (e - 1.0) * s;
        case ModelKind::XOU:
            if (!(s > 0.0)) throw std::domain_error("XOU spot must be > 0");
            return sig2 * (e * futures_price(m, t, s, T) - s) * s;
    }
    return 0.0;
}

std::optional<double> roll_drift_threshold(const SpotModel& m, double t,
                                           const RollSchedule& schedule) {
    const double Ti = schedule.active_maturity(t);
    const double e = std::exp(-m.mu_q * (Ti - t));
    const double denom = e * (m.mu_q - m.mu) + m.mu;
    if (std::fabs(denom) < 1e-14 * (m.mu + m.mu_q)) {
        if (std::fabs(m.theta - m.theta_q) < 1e-14 * (1.0 + std::fabs(m.theta)))
            return m.theta;
        return std::nullopt;
    }
    return (e * (m.mu_q * m.theta_q - m.mu * m.theta) + m.mu * m.theta) / denom;
}

}  // namespace mrfut
