#include "mrfut/vi_solver.hpp"

#include <algorithm>
#include <cmath>

namespace mrfut {

std::vector<std::string> validate(const GridSpec& g) {
    std::vector<std::string> v;
    if (g.n_time < 2) v.push_back("n_time must be >= 2");
    if (g.n_space < 2) v.push_back("n_space must be >= 2");
    if (!(g.s_min < g.s_max)) v.push_back("s_min must be < s_max");
    if (!(g.omega > 0.0 && g.omega < 2.0)) v.push_back("omega must be in (0, 2)");
    if (!(g.epsilon > 0.0)) v.push_back("epsilon must be > 0");
    if (g.max_iter < 1) v.push_back("max_iter must be >= 1");
    return v;
}

GridSpec default_grid(const SpotModel& m) {
    GridSpec g;
    const double band = 6.0 * m.sigma / std::sqrt(2.0 * m.mu_q);
    switch (m.kind) {
        case ModelKind::OU:
            g.s_min = 0.0;
            g.s_max = m.theta_q + band;
            break;
        case ModelKind::CIR:
            g.s_min = 0.0;
            g.s_max = 4.0 * m.theta_q;
            break;
        case ModelKind::XOU:
            g.s_max = std::exp(m.theta_q + band);
            g.s_min = g.s_max / g.n_space;  // keep ln s finite at the lower edge
            break;
    }
    return g;
}

GeneratorCoeffs generator_coefficients(const SpotModel& m, Measure measure, double s,
                                       bool printed_form) {
    const double sp = m.speed(measure);
    const double lv = m.level(measure);
    const double sig2 = m.sigma * m.sigma;
    switch (m.kind) {
        case ModelKind::OU:
            return {sp * (lv - s), sig2};
        case ModelKind::CIR:
            if (s < 0.0) throw std::domain_error("CIR spot must be >= 0");
            return {sp * (lv - s), sig2 * s};
        case ModelKind::XOU: {
            if (!(s > 0.0)) throw std::domain_error("XOU spot must be > 0");
            const double d = sp * (lv - std::log(s));
            return {printed_form ? d : d * s, sig2 * s * s};
        }
    }
    return {};
}

std::vector<double> Tridiagonal::multiply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += lower[i] * x[i - 1];
        if (i + 1 < n) v += upper[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

std::vector<double> Tridiagonal::solve(const std::vector<double>& rhs) const {
    const std::size_t n = size();
    std::vector<double> c(n), d(n), x(n);
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double denom = diag[i] - lower[i] * c[i - 1];
        c[i] = (i + 1 < n ? upper[i] : 0.0) / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

CnSystem assemble_cn(const SpotModel& m, const GeneratorConfig& gen, double rate_r,
                     double deadline_That, const GridSpec& grid) {
    const int M = grid.n_space;
    const double ds = (grid.s_max - grid.s_min) / M;
    const double dt = deadline_That / grid.n_time;

    CnSystem sys;
    const std::size_t n = M - 1;
    sys.alpha.resize(n);
    sys.beta.resize(n);
    sys.gamma.resize(n);
    sys.m1.lower.assign(n, 0.0);
    sys.m1.diag.assign(n, 0.0);
    sys.m1.upper.assign(n, 0.0);
    sys.m2 = sys.m1;

    for (int i = 1; i <= M - 1; ++i) {
        const double s = grid.s_min + i * ds;
        const GeneratorCoeffs c = generator_coefficients(m, gen.measure, s, gen.printed_form);
        const double a = dt / (4.0 * ds) * (c.sigma2 / ds - c.phi);
        const double b = -dt / 2.0 * (rate_r + c.sigma2 / (ds * ds));
        const double g = dt / (4.0 * ds) * (c.sigma2 / ds + c.phi);
        const std::size_t k = i - 1;
        sys.alpha[k] = a;
        sys.beta[k] = b;
        sys.gamma[k] = g;
        sys.m1.diag[k] = 1.0 - b;
        sys.m2.diag[k] = 1.0 + b;
        if (k > 0) {
            sys.m1.lower[k] = -a;
            sys.m2.lower[k] = a;
        }
        if (k + 1 < n) {
            sys.m1.upper[k] = -g;
            sys.m2.upper[k] = g;
        }
    }
    return sys;
}

std::vector<double> psor_solve(const Tridiagonal& m1, const std::vector<double>& rhs,
                               const std::vector<double>& obstacle,
                               const std::vector<double>& init,
                               double omega, double epsilon, int max_iter) {
    const std::size_t n = m1.size();
    if (rhs.size() != n || obstacle.size() != n || init.size() != n)
        throw std::invalid_argument("psor_solve: size mismatch");

    std::vector<double> g(init);
    for (std::size_t i = 0; i < n; ++i) g[i] = std::max(g[i], obstacle[i]);

    double delta = 0.0;
    for (int k = 0; k < max_iter; ++k) {
        delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double resid = rhs[i] - m1.diag[i] * g[i];
            if (i > 0) resid -= m1.lower[i] * g[i - 1];
            if (i + 1 < n) resid -= m1.upper[i] * g[i + 1];
            const double cand = g[i] + omega / m1.diag[i] * resid;
            const double next = std::max(obstacle[i], cand);
            delta = std::max(delta, std::fabs(next - g[i]));
            g[i] = next;
        }
        if (delta < epsilon) return g;
    }
    throw PsorDivergence("PSOR failed to converge within max_iter", delta);
}

double ValueSurface::value_at(double t, double s) const {
    const double dtv = dt(), dsv = ds();
    double x = (t / dtv);
    double y = (s - grid.s_min) / dsv;
    x = std::clamp(x, 0.0, static_cast<double>(grid.n_time));
    y = std::clamp(y, 0.0, static_cast<double>(grid.n_space));
    const int j = std::min(static_cast<int>(x), grid.n_time - 1);
    const int i = std::min(static_cast<int>(y), grid.n_space - 1);
    const double fx = x - j, fy = y - i;
    return (1 - fx) * ((1 - fy) * at(i, j) + fy * at(i + 1, j)) +
           fx * ((1 - fy) * at(i, j + 1) + fy * at(i + 1, j + 1));
}

namespace {

// Backward induction in "max" space: for min-sense problems the caller
// passes the negated obstacle and negates the result.
void backward_solve(std::vector<double>& values, const std::vector<double>& xi,
                    const CnSystem& sys, const GridSpec& grid, int N, int M,
                    double omega, double epsilon, int max_iter) {
    auto idx = [N](int i, int j) { return static_cast<std::size_t>(i) * (N + 1) + j; };

    // terminal condition and pinned space boundaries
    for (int i = 0; i <= M; ++i) values[idx(i, N)] = xi[idx(i, N)];
    for (int j = 0; j <= N; ++j) {
        values[idx(0, j)] = xi[idx(0, j)];
        values[idx(M, j)] = xi[idx(M, j)];
    }

    const std::size_t n = M - 1;
    std::vector<double> gj(n), rhs(n), obst(n), init(n);
    for (int j = N; j >= 1; --j) {
        for (std::size_t k = 0; k < n; ++k) gj[k] = values[idx(static_cast<int>(k) + 1, j)];
        rhs = sys.m2.multiply(gj);
        rhs[0] += sys.alpha[0] * (values[idx(0, j - 1)] + values[idx(0, j)]);
        rhs[n - 1] += sys.gamma[n - 1] * (values[idx(M, j - 1)] + values[idx(M, j)]);
        for (std::size_t k = 0; k < n; ++k) {
            obst[k] = xi[idx(static_cast<int>(k) + 1, j - 1)];
            init[k] = std::max(gj[k], obst[k]);
        }
        std::vector<double> g;
        try {
            g = psor_solve(sys.m1, rhs, obst, init, omega, epsilon, max_iter);
        } catch (const PsorDivergence& e) {
            throw PsorDivergence("PSOR non-convergence at time step " + std::to_string(j - 1) +
                                     ": " + e.what(),
                                 e.last_delta);
        }
        for (std::size_t k = 0; k < n; ++k) values[idx(static_cast<int>(k) + 1, j - 1)] = g[k];
    }
}

ValueSurface solve_nodes(const SpotModel& model, const GeneratorConfig& gen,
                         const ContractSpec& contract, const GridSpec& grid,
                         const std::function<double(int, int, double, double)>& xi_node,
                         Sense sense, ProblemTag tag) {
    ValueSurface surf;
    surf.grid = grid;
    surf.deadline = contract.deadline_That;
    surf.tag = tag;
    surf.sense = sense;

    const int N = grid.n_time, M = grid.n_space;
    const std::size_t total = static_cast<std::size_t>(M + 1) * (N + 1);
    surf.obstacle.resize(total);
    surf.values.assign(total, 0.0);

    const double ds = (grid.s_max - grid.s_min) / M;
    const double dt = contract.deadline_That / N;
    for (int i = 0; i <= M; ++i)
        for (int j = 0; j <= N; ++j)
            surf.obstacle[static_cast<std::size_t>(i) * (N + 1) + j] =
                xi_node(i, j, j * dt, grid.s_min + i * ds);

    const CnSystem sys = assemble_cn(model, gen, contract.rate_r, contract.deadline_That, grid);

    if (sense == Sense::Max) {
        surf.values = surf.obstacle;  // overwritten in the interior
        backward_solve(surf.values, surf.obstacle, sys, grid, N, M,
                       grid.omega, grid.epsilon, grid.max_iter);
    } else {
        std::vector<double> neg_xi(total), neg_g(total, 0.0);
        for (std::size_t k = 0; k < total; ++k) neg_xi[k] = -surf.obstacle[k];
        backward_solve(neg_g, neg_xi, sys, grid, N, M, grid.omega, grid.epsilon, grid.max_iter);
        for (std::size_t k = 0; k < total; ++k) surf.values[k] = -neg_g[k];
    }
    return surf;
}

}  // namespace

ValueSurface solve_vi(const SpotModel& model, const GeneratorConfig& gen,
                      const ContractSpec& contract, const GridSpec& grid,
                      const std::function<double(double, double)>& xi,
                      Sense sense, ProblemTag tag) {
    return solve_nodes(model, gen, contract, grid,
                       [&xi](int, int, double t, double s) { return xi(t, s); }, sense, tag);
}

std::pair<ValueSurface, ValueSurface> solve_long_short(const SpotModel& model,
                                                       const GeneratorConfig& gen,
                                                       const ContractSpec& contract,
                                                       const GridSpec& grid) {
    const double T = contract.maturity_T;
    ValueSurface v = solve_vi(
        model, gen, contract, grid,
        [&](double t, double s) { return futures_price(model, t, s, T) - contract.cost_c; },
        Sense::Max, ProblemTag::V);
    const int N = grid.n_time;
    ValueSurface j = solve_nodes(
        model, gen, contract, grid,
        [&](int i, int jj, double t, double s) {
            const double a = v.values[static_cast<std::size_t>(i) * (N + 1) + jj] -
                             (futures_price(model, t, s, T) + contract.cost_chat);
            return a > 0.0 ? a : 0.0;
        },
        Sense::Max, ProblemTag::J);
    return {std::move(v), std::move(j)};
}

std::pair<ValueSurface, ValueSurface> solve_short_long(const SpotModel& model,
                                                       const GeneratorConfig& gen,
                                                       const ContractSpec& contract,
                                                       const GridSpec& grid) {
    const double T = contract.maturity_T;
    ValueSurface u = solve_vi(
        model, gen, contract, grid,
        [&](double t, double s) { return futures_price(model, t, s, T) + contract.cost_chat; },
        Sense::Min, ProblemTag::U);
    const int N = grid.n_time;
    ValueSurface k = solve_nodes(
        model, gen, contract, grid,
        [&](int i, int jj, double t, double s) {
            const double b = (futures_price(model, t, s, T) - contract.cost_c) -
                             u.values[static_cast<std::size_t>(i) * (N + 1) + jj];
            return b > 0.0 ? b : 0.0;
        },
        Sense::Max, ProblemTag::K);
    return {std::move(u), std::move(k)};
}

namespace {

// generic scan: bind(i, j) tests a node, level interpolation between the
// last free node and the first binding one
BoundarySet extract_generic(const ValueSurface& surf, Side side,
                            const std::function<double(int, int)>& gap,
                            const std::function<bool(int, int)>& eligible,
                            double tol) {
    const int N = surf.grid.n_time, M = surf.grid.n_space;
    BoundarySet b;
    b.side = side;
    b.times.reserve(N + 1);
    b.levels.reserve(N + 1);

    for (int j = 0; j <= N; ++j) {
        b.times.push_back(surf.t_of(j));
        std::optional<double> level;
        const int start = side == Side::ExerciseAbove ? 1 : M - 1;
        const int stop = side == Side::ExerciseAbove ? M : 0;
        const int step = side == Side::ExerciseAbove ? 1 : -1;
        for (int i = start; i != stop; i += step) {
            if (!eligible(i, j)) continue;
            const double d = gap(i, j);
            const double tau = tol * (1.0 + std::fabs(surf.obstacle_at(i, j)));
            if (d <= tau) {
                if (i == start) {
                    level = side == Side::ExerciseAbove ? surf.grid.s_min : surf.grid.s_max;
                } else {
                    const int prev = i - step;
                    const double dp = gap(prev, j) - tol * (1.0 + std::fabs(surf.obstacle_at(prev, j)));
                    const double dc = d - tau;
                    const double frac = dp > dc ? dp / (dp - dc) : 0.0;
                    level = surf.s_of(prev) + step * frac * surf.ds();
                }
                break;
            }
        }
        b.levels.push_back(level);
    }
    return b;
}

}  // namespace

BoundarySet extract_boundary(const ValueSurface& surf, Side side, double tol) {
    const bool entry_type = surf.tag == ProblemTag::J || surf.tag == ProblemTag::K ||
                            surf.tag == ProblemTag::P;
    auto gap = [&surf](int i, int j) {
        const double d = surf.at(i, j) - surf.obstacle_at(i, j);
        return surf.sense == Sense::Max ? d : -d;
    };
    auto eligible = [&surf, entry_type, tol](int i, int j) {
        return !entry_type || surf.obstacle_at(i, j) > tol;
    };
    return extract_generic(surf, side, gap, eligible, tol);
}

ChooserSolution solve_chooser(const SpotModel& model, const GeneratorConfig& gen,
                              const ContractSpec& contract, const GridSpec& grid,
                              const ValueSurface& v, const ValueSurface& u) {
    const double T = contract.maturity_T;
    const int N = grid.n_time;
    auto idx = [N](int i, int j) { return static_cast<std::size_t>(i) * (N + 1) + j; };

    auto reward_a = [&](int i, int j, double t, double s) {
        const double a = v.values[idx(i, j)] - (futures_price(model, t, s, T) + contract.cost_chat);
        return a > 0.0 ? a : 0.0;
    };
    auto reward_b = [&](int i, int j, double t, double s) {
        const double b = (futures_price(model, t, s, T) - contract.cost_c) - u.values[idx(i, j)];
        return b > 0.0 ? b : 0.0;
    };

    ChooserSolution sol;
    sol.p = solve_nodes(
        model, gen, contract, grid,
        [&](int i, int j, double t, double s) { return std::max(reward_a(i, j, t, s), reward_b(i, j, t, s)); },
        Sense::Max, ProblemTag::P);

    const int M = grid.n_space;
    const double tol = 1e-7;
    sol.branch.assign(static_cast<std::size_t>(M + 1) * (N + 1), 0);
    for (int i = 0; i <= M; ++i) {
        const double s = sol.p.s_of(i);
        for (int j = 0; j <= N; ++j) {
            const double t = sol.p.t_of(j);
            const double a = reward_a(i, j, t, s);
            const double b = reward_b(i, j, t, s);
            const double obst = std::max(a, b);
            if (obst > tol && sol.p.values[idx(i, j)] - obst <= tol * (1.0 + std::fabs(obst)))
                sol.branch[idx(i, j)] = a >= b ? 1 : 2;  // ties go to the long branch
        }
    }

    auto gap_a = [&](int i, int j) {
        return sol.p.values[idx(i, j)] - reward_a(i, j, sol.p.t_of(j), sol.p.s_of(i));
    };
    auto gap_b = [&](int i, int j) {
        return sol.p.values[idx(i, j)] - reward_b(i, j, sol.p.t_of(j), sol.p.s_of(i));
    };
    auto pos_a = [&](int i, int j) { return reward_a(i, j, sol.p.t_of(j), sol.p.s_of(i)) > tol; };
    auto pos_b = [&](int i, int j) { return reward_b(i, j, sol.p.t_of(j), sol.p.s_of(i)) > tol; };

    sol.chooser_long = extract_generic(sol.p, Side::ExerciseBelow, gap_a, pos_a, tol);
    sol.chooser_short = extract_generic(sol.p, Side::ExerciseAbove, gap_b, pos_b, tol);
    return sol;
}

FullSolution solve_all(const SpotModel& model, const GeneratorConfig& gen,
                       const ContractSpec& contract, const GridSpec& grid) {
    FullSolution f;
    auto [v, j] = solve_long_short(model, gen, contract, grid);
    auto [u, k] = solve_short_long(model, gen, contract, grid);
    f.v = std::move(v);
    f.j = std::move(j);
    f.u = std::move(u);
    f.k = std::move(k);
    ChooserSolution ch = solve_chooser(model, gen, contract, grid, f.v, f.u);
    f.p = std::move(ch.p);
    f.branch = std::move(ch.branch);
    f.boundaries.long_exit = extract_boundary(f.v, Side::ExerciseAbove);
    f.boundaries.long_entry = extract_boundary(f.j, Side::ExerciseBelow);
    f.boundaries.short_entry = extract_boundary(f.k, Side::ExerciseAbove);
    f.boundaries.short_exit = extract_boundary(f.u, Side::ExerciseBelow);
    f.boundaries.chooser_long = std::move(ch.chooser_long);
    f.boundaries.chooser_short = std::move(ch.chooser_short);
    return f;
}

}  // namespace mrfut
