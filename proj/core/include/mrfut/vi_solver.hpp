#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "mrfut/pricing.hpp"

namespace mrfut {

struct GridSpec {
    int n_time = 500;    // N: number of time steps, grid spans [0, That]
    int n_space = 500;   // M: number of space intervals
    double s_min = 0.0;  // 0 for OU/CIR, > 0 for XOU
    double s_max = 0.0;
    double omega = 1.2;      // PSOR relaxation, in (0, 2)
    double epsilon = 1e-8;   // PSOR convergence tolerance
    int max_iter = 10000;    // PSOR iteration cap per step
};

std::vector<std::string> validate(const GridSpec& grid);

// s_max per model: theta_q + 6 sigma/sqrt(2 mu_q) for OU, 4 theta_q for CIR,
// exp(theta_q + 6 sigma/sqrt(2 mu_q)) for XOU; s_min = 0 (OU/CIR) or one
// grid cell (XOU).
GridSpec default_grid(const SpotModel& model);

// Configuration of the generator used in the PDE operator. The value
// functions are expectations under the historical measure, so that is the
// default; "printed" selects the risk-neutral parameters together with the
// literal XOU drift mu_q (theta_q - ln s) (no factor s).
struct GeneratorConfig {
    Measure measure = Measure::Historical;
    bool printed_form = false;

    static GeneratorConfig historical() { return {}; }
    static GeneratorConfig printed() { return {Measure::RiskNeutral, true}; }
};

struct GeneratorCoeffs {
    double phi = 0.0;     // first-order coefficient
    double sigma2 = 0.0;  // squared diffusion coefficient
};

GeneratorCoeffs generator_coefficients(const SpotModel& model, Measure measure, double s,
                                       bool printed_form = false);

struct Tridiagonal {
    std::vector<double> lower, diag, upper;  // lower[0] and upper[n-1] unused

    std::size_t size() const { return diag.size(); }
    std::vector<double> multiply(const std::vector<double>& x) const;
    std::vector<double> solve(const std::vector<double>& rhs) const;  // Thomas
};

// Crank-Nicolson matrices for the interior nodes i = 1..M-1, plus the raw
// alpha/beta/gamma coefficients (index 0 corresponds to i = 1).
struct CnSystem {
    Tridiagonal m1, m2;
    std::vector<double> alpha, beta, gamma;
};

CnSystem assemble_cn(const SpotModel& model, const GeneratorConfig& gen, double rate_r,
                     double deadline_That, const GridSpec& grid);

// Projected SOR for the LCP  M1 g >= rhs, g >= obstacle, complementary.
// Projection is componentwise max against the obstacle. Throws
// PsorDivergence when max_iter sweeps do not reach epsilon.
struct PsorDivergence : std::runtime_error {
    double last_delta;
    PsorDivergence(const std::string& msg, double delta)
        : std::runtime_error(msg), last_delta(delta) {}
};

std::vector<double> psor_solve(const Tridiagonal& m1, const std::vector<double>& rhs,
                               const std::vector<double>& obstacle,
                               const std::vector<double>& init,
                               double omega, double epsilon, int max_iter);

enum class ProblemTag { V, J, U, K, P };
enum class Sense { Max, Min };

struct ValueSurface {
    GridSpec grid;
    double deadline = 0.0;  // That
    ProblemTag tag = ProblemTag::V;
    Sense sense = Sense::Max;
    // (M+1) x (N+1), space-major: index(i, j) = i * (N+1) + j
    std::vector<double> values;
    std::vector<double> obstacle;

    double ds() const { return (grid.s_max - grid.s_min) / grid.n_space; }
    double dt() const { return deadline / grid.n_time; }
    double s_of(int i) const { return grid.s_min + i * ds(); }
    double t_of(int j) const { return j * dt(); }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * (grid.n_time + 1) + j]; }
    double obstacle_at(int i, int j) const { return obstacle[static_cast<std::size_t>(i) * (grid.n_time + 1) + j]; }
    // bilinear interpolation of the value at (t, s)
    double value_at(double t, double s) const;
};

// Backward Crank-Nicolson + PSOR solve of the variational inequality with
// obstacle xi(t, s). Min-sense problems are solved by negation. Rows at
// s_min and s_max are pinned to the obstacle.
ValueSurface solve_vi(const SpotModel& model, const GeneratorConfig& gen,
                      const ContractSpec& contract, const GridSpec& grid,
                      const std::function<double(double, double)>& xi,
                      Sense sense, ProblemTag tag);

// Long-short pair: V (exit) first, then J with obstacle (V - (f + chat))^+.
std::pair<ValueSurface, ValueSurface> solve_long_short(const SpotModel& model,
                                                       const GeneratorConfig& gen,
                                                       const ContractSpec& contract,
                                                       const GridSpec& grid);

// Short-long pair: U (min-sense exit) first, then K with obstacle ((f - c) - U)^+.
std::pair<ValueSurface, ValueSurface> solve_short_long(const SpotModel& model,
                                                       const GeneratorConfig& gen,
                                                       const ContractSpec& contract,
                                                       const GridSpec& grid);

enum class Side { ExerciseAbove, ExerciseBelow };

struct BoundarySet {
    std::vector<double> times;
    std::vector<std::optional<double>> levels;
    Side side = Side::ExerciseAbove;
};

struct TradeBoundaries {
    BoundarySet long_entry;     // J
    BoundarySet long_exit;      // V
    BoundarySet short_entry;    // K
    BoundarySet short_exit;     // U
    BoundarySet chooser_long;   // P = A
    BoundarySet chooser_short;  // P = B
};

struct ChooserSolution {
    ValueSurface p;
    // per node: 0 = not binding, 1 = long branch (A), 2 = short branch (B)
    std::vector<std::uint8_t> branch;
    BoundarySet chooser_long, chooser_short;
};

ChooserSolution solve_chooser(const SpotModel& model, const GeneratorConfig& gen,
                              const ContractSpec& contract, const GridSpec& grid,
                              const ValueSurface& v, const ValueSurface& u);

// Free boundary per time step: scan from the non-exercise edge for the
// first binding node; linear interpolation between the bracketing nodes.
// Entry-type surfaces (J, K, P) only count nodes with a positive obstacle.
BoundarySet extract_boundary(const ValueSurface& surface, Side side, double tol = 1e-7);

struct FullSolution {
    ValueSurface v, j, u, k, p;
    std::vector<std::uint8_t> branch;
    TradeBoundaries boundaries;
};

FullSolution solve_all(const SpotModel& model, const GeneratorConfig& gen,
                       const ContractSpec& contract, const GridSpec& grid);

}  // namespace mrfut
