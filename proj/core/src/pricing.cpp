#include "mrfut/pricing.hpp"

#include <cmath>
#include <stdexcept>

namespace mrfut {

std::vector<std::string> validate(const ContractSpec& c) {
    std::vector<std::string> v;
    if (!(c.deadline_That > 0.0)) v.push_back("deadline_That must be > 0");
    if (!(c.deadline_That <= c.maturity_T)) v.push_back("deadline_That must be <= maturity_T");
    if (!(c.rate_r > 0.0)) v.push_back("rate_r must be > 0");
    if (c.cost_c < 0.0) v.push_back("cost_c must be >= 0");
    if (c.cost_chat < 0.0) v.push_back("cost_chat must be >= 0");
    return v;
}

const char* to_string(Slope s) {
    switch (s) {
        case Slope::Up: return "Up";
        case Slope::Down: return "Down";
        case Slope::Flat: return "Flat";
    }
    return "?";
}

const char* to_string(Curvature c) {
    switch (c) {
        case Curvature::Convex: return "Convex";
        case Curvature::Concave: return "Concave";
        case Curvature::Flat: return "Flat";
    }
    return "?";
}

static void check_spot(const SpotModel& m, double s) {
    if (m.kind == ModelKind::CIR && s < 0.0)
        throw std::domain_error("CIR spot must be >= 0");
    if (m.kind == ModelKind::XOU && s <= 0.0)
        throw std::domain_error("XOU spot must be > 0");
}

double futures_price(const SpotModel& m, double t, double s, double T) {
    if (t > T) throw std::invalid_argument("futures_price: t > T");
    check_spot(m, s);
    const double tau = T - t;
    if (m.kind == ModelKind::XOU) {
        const double e = std::exp(-m.mu_q * tau);
        return std::exp(e * std::log(s) +
                        (1.0 - e) * (m.theta_q - m.sigma * m.sigma / (2.0 * m.mu_q)) +
                        m.sigma * m.sigma / (4.0 * m.mu_q) * (1.0 - e * e));
    }
    return (s - m.theta_q) * std::exp(-m.mu_q * tau) + m.theta_q;
}

double futures_drift_p(const SpotModel& m, double t, double s, double T) {
    if (t > T) throw std::invalid_argument("futures_drift_p: t > T");
    check_spot(m, s);
    const double e = std::exp(-m.mu_q * (T - t));
    if (m.kind == ModelKind::XOU) {
        const double x = std::log(s);
        return e * (m.mu * (m.theta - x) - m.mu_q * (m.theta_q - x)) * futures_price(m, t, s, T);
    }
    return e * (m.mu * (m.theta - s) - m.mu_q * (m.theta_q - s));
}

TermStructureRegime classify_term_structure(const SpotModel& m, double s0, double T) {
    check_spot(m, s0);
    if (!(T > 0.0)) throw std::invalid_argument("T must be > 0");

    auto near = [](double a, double b) {
        return std::fabs(a - b) <= 1e-12 * (1.0 + std::fabs(a) + std::fabs(b));
    };

    if (m.kind != ModelKind::XOU) {
        if (near(s0, m.theta_q)) return {Slope::Flat, Curvature::Flat};
        if (s0 < m.theta_q) return {Slope::Up, Curvature::Concave};
        return {Slope::Down, Curvature::Convex};
    }

    // Thresholds in ln s0 for the XOU curve at maturity T.
    const double x = std::log(s0);
    const double sig2 = m.sigma * m.sigma;
    const double slope_thr = m.theta_q - sig2 / (2.0 * m.mu_q) * (1.0 - std::exp(-m.mu_q * T));
    const double root = std::sqrt(std::exp(2.0 * m.mu_q * T) / 4.0 + sig2 / (2.0 * m.mu_q));
    const double half_exp = std::exp(m.mu_q * T) / 2.0;
    const double upper = slope_thr + root - half_exp;
    const double lower = slope_thr - root - half_exp;

    if (near(x, slope_thr)) return {Slope::Flat, Curvature::Flat};
    TermStructureRegime r;
    r.slope = x > slope_thr ? Slope::Down : Slope::Up;
    if (near(x, upper) || near(x, lower)) {
        r.curvature = Curvature::Flat;
    } else if (x > upper || x < lower) {
        r.curvature = Curvature::Convex;
    } else {
        r.curvature = Curvature::Concave;
    }
    return r;
}

FuturesCurve term_structure(const SpotModel& m, double s0, std::vector<double> maturities) {
    FuturesCurve curve;
    curve.s0 = s0;
    curve.maturities = std::move(maturities);
    curve.prices.reserve(curve.maturities.size());
    for (double T : curve.maturities) {
        if (!(T > 0.0)) throw std::invalid_argument("maturities must be positive");
        curve.prices.push_back(futures_price(m, 0.0, s0, T));
    }
    return curve;
}

}  // namespace mrfut
