#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mrfut {

enum class ModelKind { OU, CIR, XOU };

// Parameter set selector: (mu, theta) under the historical measure,
// (mu_q, theta_q) under the risk-neutral one. sigma is shared.
enum class Measure { Historical, RiskNeutral };

struct SpotModel {
    ModelKind kind = ModelKind::OU;
    double mu = 0.0;       // historical mean-reversion speed, per year
    double theta = 0.0;    // historical long-run level (log-price level for XOU)
    double mu_q = 0.0;     // risk-neutral speed
    double theta_q = 0.0;  // risk-neutral level
    double sigma = 0.0;    // volatility, per year

    double speed(Measure m) const { return m == Measure::Historical ? mu : mu_q; }
    double level(Measure m) const { return m == Measure::Historical ? theta : theta_q; }
};

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Empty iff all parameter invariants hold; each entry names the failed condition.
std::vector<std::string> validate(const SpotModel& model);

// Instantaneous drift of the spot SDE under the chosen measure.
// OU/CIR: m*(th - s); XOU: m*(th - ln s)*s.
double drift(const SpotModel& model, Measure measure, double s);

// Diffusion coefficient. OU: sigma; CIR: sigma*sqrt(s); XOU: sigma*s.
double diffusion(const SpotModel& model, double s);

// E{S_t | S_0 = s0} under the chosen measure.
// OU/CIR: th + (s0 - th) e^{-m t}.
// XOU: lognormal mean of the OU log-price.
double conditional_mean(const SpotModel& model, Measure measure, double s0, double t);

struct PathSpec {
    double s0 = 0.0;
    double dt = 0.0;       // years
    int n_steps = 0;
    int n_paths = 0;
    std::uint64_t seed = 0;
};

// Simulated spot paths, values[path][step] with step 0 = s0.
struct PathSet {
    double s0 = 0.0;
    double dt = 0.0;
    int n_steps = 0;
    int n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> values;  // (n_steps+1) per path, row-major by path

    double at(int path, int step) const { return values[static_cast<std::size_t>(path) * (n_steps + 1) + step]; }
    double time_of(int step) const { return step * dt; }
    // Largest grid index with time <= t (snap-down convention).
    int step_at(double t) const;
};

// OU: exact Gaussian transition. CIR: full-truncation Euler (negative
// excursions clamped at 0 inside drift/diffusion; reported path clamped).
// XOU: exact OU transition in log-space. Deterministic given the seed,
// with per-path substreams so path p is the same for any n_paths >= p.
PathSet simulate(const SpotModel& model, Measure measure, const PathSpec& spec);

// CSV columns: path_id, step, time, spot.
void write_paths_csv(std::ostream& out, const PathSet& paths);

}  // namespace mrfut
