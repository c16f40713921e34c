#include "mrfut/model.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace mrfut {

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::OU: return "OU";
        case ModelKind::CIR: return "CIR";
        case ModelKind::XOU: return "XOU";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "OU" || name == "ou") return ModelKind::OU;
    if (name == "CIR" || name == "cir") return ModelKind::CIR;
    if (name == "XOU" || name == "xou") return ModelKind::XOU;
    throw std::invalid_argument("unknown model kind: " + name);
}

std::vector<std::string> validate(const SpotModel& m) {
    std::vector<std::string> v;
    if (!(m.mu > 0.0)) v.push_back("mu must be > 0");
    if (!(m.mu_q > 0.0)) v.push_back("mu_q must be > 0");
    if (!(m.sigma > 0.0)) v.push_back("sigma must be > 0");
    if (m.kind == ModelKind::CIR || m.kind == ModelKind::XOU) {
        if (!(m.theta > 0.0)) v.push_back("theta must be > 0 for CIR/XOU");
        if (!(m.theta_q > 0.0)) v.push_back("theta_q must be > 0 for CIR/XOU");
    }
    if (m.kind == ModelKind::CIR) {
        const double s2 = m.sigma * m.sigma;
        if (!(2.0 * m.mu * m.theta >= s2))
            v.push_back("Feller condition 2*mu*theta >= sigma^2 violated (historical)");
        if (!(2.0 * m.mu_q * m.theta_q >= s2))
            v.push_back("Feller condition 2*mu_q*theta_q >= sigma^2 violated (risk-neutral)");
    }
    return v;
}

static void check_domain(const SpotModel& m, double s) {
    if (m.kind == ModelKind::CIR && s < 0.0)
        throw std::domain_error("CIR spot must be >= 0");
    if (m.kind == ModelKind::XOU && s <= 0.0)
        throw std::domain_error("XOU spot must be > 0");
}

double drift(const SpotModel& m, Measure measure, double s) {
    if (m.kind != ModelKind::OU && s <= 0.0)
        throw std::domain_error("spot must be > 0 for CIR/XOU drift");
    const double sp = m.speed(measure);
    const double lv = m.level(measure);
    if (m.kind == ModelKind::XOU) return sp * (lv - std::log(s)) * s;
    return sp * (lv - s);
}

double diffusion(const SpotModel& m, double s) {
    check_domain(m, s);
    switch (m.kind) {
        case ModelKind::OU: return m.sigma;
        case ModelKind::CIR: return m.sigma * std::sqrt(s);
        case ModelKind::XOU: return m.sigma * s;
    }
    return 0.0;
}

double conditional_mean(const SpotModel& m, Measure measure, double s0, double t) {
    check_domain(m, s0);
    const double sp = m.speed(measure);
    const double lv = m.level(measure);
    if (m.kind == ModelKind::XOU) {
        // log-price is OU around lv - sigma^2/(2 sp)
        const double e = std::exp(-sp * t);
        const double mean_log = e * std::log(s0) + (1.0 - e) * (lv - m.sigma * m.sigma / (2.0 * sp));
        const double var_log = m.sigma * m.sigma * (1.0 - e * e) / (2.0 * sp);
        return std::exp(mean_log + 0.5 * var_log);
    }
    return lv + (s0 - lv) * std::exp(-sp * t);
}

int PathSet::step_at(double t) const {
    int i = static_cast<int>(std::floor(t / dt + 1e-9));
    if (i < 0) i = 0;
    if (i > n_steps) i = n_steps;
    return i;
}

PathSet simulate(const SpotModel& m, Measure measure, const PathSpec& spec) {
    if (!(spec.dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (spec.n_steps < 1 || spec.n_paths < 1)
        throw std::invalid_argument("n_steps and n_paths must be >= 1");
    check_domain(m, spec.s0);

    const double sp = m.speed(measure);
    const double lv = m.level(measure);
    const double dt = spec.dt;
    const double e = std::exp(-sp * dt);

    PathSet out;
    out.s0 = spec.s0;
    out.dt = dt;
    out.n_steps = spec.n_steps;
    out.n_paths = spec.n_paths;
    out.seed = spec.seed;
    out.values.resize(static_cast<std::size_t>(spec.n_paths) * (spec.n_steps + 1));

    // OU transition stdev over one step; reused for the XOU log-price.
    const double ou_sd = m.sigma * std::sqrt((1.0 - e * e) / (2.0 * sp));
    const double sqrt_dt = std::sqrt(dt);

    for (int p = 0; p < spec.n_paths; ++p) {
        std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(p)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> gauss(0.0, 1.0);
        double* row = &out.values[static_cast<std::size_t>(p) * (spec.n_steps + 1)];
        row[0] = spec.s0;
        switch (m.kind) {
            case ModelKind::OU: {
                double s = spec.s0;
                for (int k = 1; k <= spec.n_steps; ++k) {
                    s = lv + (s - lv) * e + ou_sd * gauss(rng);
                    row[k] = s;
                }
                break;
            }
            case ModelKind::CIR: {
                // full-truncation Euler: auxiliary state may dip below zero,
                // drift/diffusion see the clamped value
                double x = spec.s0;
                for (int k = 1; k <= spec.n_steps; ++k) {
                    const double xp = x > 0.0 ? x : 0.0;
                    x += sp * (lv - xp) * dt + m.sigma * std::sqrt(xp) * sqrt_dt * gauss(rng);
                    row[k] = x > 0.0 ? x : 0.0;
                }
                break;
            }
            case ModelKind::XOU: {
                const double mean_level = lv - m.sigma * m.sigma / (2.0 * sp);
                double x = std::log(spec.s0);
                for (int k = 1; k <= spec.n_steps; ++k) {
                    x = mean_level + (x - mean_level) * e + ou_sd * gauss(rng);
                    row[k] = std::exp(x);
                }
                break;
            }
        }
    }
    return out;
}

void write_paths_csv(std::ostream& out, const PathSet& paths) {
    out << "path_id,step,time,spot\n";
    char buf[96];
    for (int p = 0; p < paths.n_paths; ++p) {
        for (int k = 0; k <= paths.n_steps; ++k) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.12g,%.12g\n", p, k, paths.time_of(k), paths.at(p, k));
            out << buf;
        }
    }
}

}  // namespace mrfut
