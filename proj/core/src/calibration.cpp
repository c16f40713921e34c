#include "mrfut/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mrfut/optim.hpp"

namespace mrfut {

namespace {

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
    }
    return r;
}

SpotModel make_model(ModelKind kind, double mu_q, double theta_q, double sigma) {
    SpotModel m;
    m.kind = kind;
    m.mu = m.mu_q = mu_q;
    m.theta = m.theta_q = theta_q;
    m.sigma = sigma;
    return m;
}

}  // namespace

CalibrationResult calibrate(ModelKind kind, double s0, const FuturesCurve& curve,
                            std::optional<double> sigma_fixed) {
    const std::size_t n = curve.maturities.size();
    if (n < 2 || curve.prices.size() != n)
        throw std::invalid_argument("calibrate: need >= 2 curve points");
    const auto [lo, hi] = std::minmax_element(curve.maturities.begin(), curve.maturities.end());
    if (!(*hi > *lo))
        throw std::invalid_argument("calibrate: degenerate curve (all maturities equal)");
    if ((kind == ModelKind::CIR || kind == ModelKind::XOU) && !(s0 > 0.0))
        throw std::invalid_argument("calibrate: s0 must be > 0 for CIR/XOU");

    const bool fit_sigma = (kind == ModelKind::XOU) && !sigma_fixed.has_value();
    const bool log_theta = (kind != ModelKind::OU);
    const double sigma_xou = sigma_fixed.value_or(0.5);

    // parameters in the optimizer: x[0]=log mu_q, x[1]=theta_q (or log),
    // x[2]=log sigma when fitted
    auto unpack = [&](const std::vector<double>& x) {
        const double mu_q = std::exp(x[0]);
        const double theta_q = log_theta ? std::exp(x[1]) : x[1];
        const double sigma = fit_sigma ? std::exp(x[2]) : sigma_xou;
        return make_model(kind, mu_q, theta_q, sigma);
    };

    auto objective = [&](const std::vector<double>& x) {
        const SpotModel m = unpack(x);
        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err = futures_price(m, 0.0, s0, curve.maturities[i]) - curve.prices[i];
            sse += err * err;
        }
        return sse;
    };

    const double pmin = *std::min_element(curve.prices.begin(), curve.prices.end());
    const double pmax = *std::max_element(curve.prices.begin(), curve.prices.end());
    double th_lo = pmin, th_hi = pmax;
    if (kind == ModelKind::XOU) {
        th_lo = std::log(std::max(pmin, 1e-8));
        th_hi = std::log(std::max(pmax, th_lo == 0.0 ? 1e-6 : pmax));
    }
    if (!(th_hi > th_lo)) th_hi = th_lo + 1.0;

    CalibrationResult best;
    best.sse = std::numeric_limits<double>::infinity();
    int total_iter = 0;

    const int n_starts = 8;
    for (int k = 0; k < n_starts; ++k) {
        const double u0 = halton(k + 1, 2);
        const double u1 = halton(k + 1, 3);
        const double u2 = halton(k + 1, 5);
        std::vector<double> x0;
        x0.push_back(std::log(0.1) + u0 * (std::log(20.0) - std::log(0.1)));
        double th = th_lo + u1 * (th_hi - th_lo);
        x0.push_back(log_theta ? std::log(std::max(th, 1e-8)) : th);
        if (fit_sigma)
            x0.push_back(std::log(0.05) + u2 * (std::log(2.0) - std::log(0.05)));

        SimplexResult r = nelder_mead(objective, x0, 0.5, 1e-10, 2000);
        total_iter += r.iterations;
        if (r.fx < best.sse) {
            best.params = unpack(r.x);
            best.sse = r.fx;
            best.converged = r.converged;
        }
    }
    best.iterations = total_iter;

    // polish the winner from its own point
    {
        std::vector<double> x0;
        x0.push_back(std::log(best.params.mu_q));
        x0.push_back(log_theta ? std::log(best.params.theta_q) : best.params.theta_q);
        if (fit_sigma) x0.push_back(std::log(best.params.sigma));
        SimplexResult r = nelder_mead(objective, x0, 1e-3, 1e-12, 2000);
        best.iterations += r.iterations;
        if (r.fx <= best.sse) {
            best.params = unpack(r.x);
            best.sse = r.fx;
            best.converged = best.converged || r.converged;
        }
    }

    // OU/CIR prices carry no sigma dependence; fill a value that keeps
    // the returned model valid (Feller bound for CIR)
    if (kind != ModelKind::XOU) {
        best.params.sigma = sigma_fixed.value_or(
            kind == ModelKind::CIR
                ? std::sqrt(best.params.mu_q * best.params.theta_q)
                : 1.0);
    }
    return best;
}

}  // namespace mrfut
