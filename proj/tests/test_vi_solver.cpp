#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mrfut/vi_solver.hpp"

using namespace mrfut;

namespace {

SpotModel cir_base() { return {ModelKind::CIR, 8.57, 17.58, 4.55, 18.16, 5.33}; }
SpotModel ou_base() { return {ModelKind::OU, 8.57, 17.58, 4.55, 18.16, 18.7}; }
SpotModel xou_base() { return {ModelKind::XOU, 8.57, 3.03, 4.08, 3.06, 1.63}; }

ContractSpec contract_base() { return {66.0 / 252.0, 22.0 / 252.0, 0.05, 0.005, 0.005}; }

GridSpec coarse_grid(const SpotModel& m, int n_time, int n_space) {
    GridSpec g = default_grid(m);
    g.n_time = n_time;
    g.n_space = n_space;
    if (m.kind == ModelKind::XOU) g.s_min = g.s_max / n_space;
    return g;
}

// dense reference LCP solve by enumerating active sets: M1 x >= b, x >= psi,
// (x - psi)' (M1 x - b) = 0. Feasible for small n.
std::vector<double> lcp_enumerate(const Tridiagonal& m1, const std::vector<double>& b,
                                  const std::vector<double>& psi) {
    const int n = static_cast<int>(b.size());
    std::vector<double> best;
    for (int mask = 0; mask < (1 << n); ++mask) {
        // nodes in `mask` are clamped at the obstacle, the rest satisfy M1 x = b
        std::vector<double> x(psi);
        std::vector<int> free_idx;
        for (int i = 0; i < n; ++i)
            if (!(mask & (1 << i))) free_idx.push_back(i);
        if (!free_idx.empty()) {
            const int k = static_cast<int>(free_idx.size());
            // dense Gaussian elimination on the free-free block
            std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0), rhs(k);
            auto m1_at = [&](int r, int c) -> double {
                if (r == c) return m1.diag[r];
                if (c == r - 1) return m1.lower[r];
                if (c == r + 1) return m1.upper[r];
                return 0.0;
            };
            for (int r = 0; r < k; ++r) {
                rhs[r] = b[free_idx[r]];
                for (int i = 0; i < n; ++i) {
                    if (std::fabs(m1_at(free_idx[r], i)) < 1e-300) continue;
                    if (mask & (1 << i))
                        rhs[r] -= m1_at(free_idx[r], i) * psi[i];
                }
                for (int c = 0; c < k; ++c) a[r * k + c] = m1_at(free_idx[r], free_idx[c]);
            }
            for (int col = 0; col < k; ++col) {
                int piv = col;
                for (int r = col + 1; r < k; ++r)
                    if (std::fabs(a[r * k + col]) > std::fabs(a[piv * k + col])) piv = r;
                if (std::fabs(a[piv * k + col]) < 1e-14) { free_idx.clear(); break; }
                for (int c = 0; c < k; ++c) std::swap(a[col * k + c], a[piv * k + c]);
                std::swap(rhs[col], rhs[piv]);
                for (int r = col + 1; r < k; ++r) {
                    const double f = a[r * k + col] / a[col * k + col];
                    for (int c = col; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
                    rhs[r] -= f * rhs[col];
                }
            }
            if (free_idx.empty()) continue;
            for (int r = k - 1; r >= 0; --r) {
                double v = rhs[r];
                for (int c = r + 1; c < k; ++c) v -= a[r * k + c] * rhs[c];
                rhs[r] = v / a[r * k + r];
            }
            for (int r = 0; r < k; ++r) x[free_idx[r]] = rhs[r];
        }
        // feasibility of this active set
        const std::vector<double> res = m1.multiply(x);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (x[i] < psi[i] - 1e-9) ok = false;
            if (res[i] < b[i] - 1e-9) ok = false;
        }
        if (ok) { best = x; break; }
    }
    return best;
}

}  // namespace

TEST_CASE("generator coefficients by model") {
    const SpotModel ou = ou_base();
    auto c = generator_coefficients(ou, Measure::Historical, 15.0);
    CHECK(c.phi == doctest::Approx(8.57 * (17.58 - 15.0)));
    CHECK(c.sigma2 == doctest::Approx(18.7 * 18.7));
    c = generator_coefficients(ou, Measure::RiskNeutral, 15.0);
    CHECK(c.phi == doctest::Approx(4.55 * (18.16 - 15.0)));

    const SpotModel cir = cir_base();
    c = generator_coefficients(cir, Measure::Historical, 0.0);  // boundary node
    CHECK(c.phi == doctest::Approx(8.57 * 17.58));
    CHECK(c.sigma2 == 0.0);
    c = generator_coefficients(cir, Measure::Historical, 4.0);
    CHECK(c.sigma2 == doctest::Approx(5.33 * 5.33 * 4.0));

    const SpotModel xou = xou_base();
    c = generator_coefficients(xou, Measure::Historical, 1.0);  // ln 1 = 0
    CHECK(c.phi == doctest::Approx(8.57 * 3.03));
    CHECK(c.sigma2 == doctest::Approx(1.63 * 1.63));
    c = generator_coefficients(xou, Measure::Historical, 2.0);
    CHECK(c.phi == doctest::Approx(8.57 * (3.03 - std::log(2.0)) * 2.0));
    CHECK(c.sigma2 == doctest::Approx(1.63 * 1.63 * 4.0));
    // printed form drops the factor s in the drift and uses Q parameters
    c = generator_coefficients(xou, Measure::RiskNeutral, 2.0, true);
    CHECK(c.phi == doctest::Approx(4.08 * (3.06 - std::log(2.0))));
}

TEST_CASE("Crank-Nicolson coefficients against hand values") {
    const SpotModel m = ou_base();
    GridSpec g = coarse_grid(m, 4, 3);
    const ContractSpec k = contract_base();
    const CnSystem sys = assemble_cn(m, GeneratorConfig::historical(), k.rate_r,
                                     k.deadline_That, g);
    const double ds = (g.s_max - g.s_min) / g.n_space;
    const double dt = k.deadline_That / g.n_time;
    REQUIRE(sys.alpha.size() == 2);  // interior nodes i = 1, 2
    for (int i = 1; i <= 2; ++i) {
        const double s = g.s_min + i * ds;
        const double phi = m.mu * (m.theta - s);
        const double s2 = m.sigma * m.sigma;
        const double alpha = dt / (4.0 * ds) * (s2 / ds - phi);
        const double beta = -dt / 2.0 * (k.rate_r + s2 / (ds * ds));
        const double gamma = dt / (4.0 * ds) * (s2 / ds + phi);
        CHECK(sys.alpha[i - 1] == doctest::Approx(alpha).epsilon(1e-14));
        CHECK(sys.beta[i - 1] == doctest::Approx(beta).epsilon(1e-14));
        CHECK(sys.gamma[i - 1] == doctest::Approx(gamma).epsilon(1e-14));
        CHECK(sys.m1.diag[i - 1] == doctest::Approx(1.0 - beta).epsilon(1e-14));
        CHECK(sys.m2.diag[i - 1] == doctest::Approx(1.0 + beta).epsilon(1e-14));
        if (i == 2) {
            CHECK(sys.m1.lower[1] == doctest::Approx(-alpha).epsilon(1e-14));
            CHECK(sys.m2.lower[1] == doctest::Approx(alpha).epsilon(1e-14));
        }
        if (i == 1) {
            CHECK(sys.m1.upper[0] == doctest::Approx(-gamma).epsilon(1e-14));
            CHECK(sys.m2.upper[0] == doctest::Approx(gamma).epsilon(1e-14));
        }
    }
}

TEST_CASE("zero-coefficient operator leaves values unchanged over a step") {
    // sigma = 0, phi = 0 (theta == s handled via mu = 0), r = 0: M1 = M2 = I
    SpotModel m{ModelKind::OU, 0.0, 1.0, 0.0, 1.0, 0.0};
    GridSpec g{4, 4, 0.0, 2.0, 1.2, 1e-12, 1000};
    const CnSystem sys = assemble_cn(m, GeneratorConfig::historical(), 0.0, 0.1, g);
    for (std::size_t i = 0; i < sys.m1.size(); ++i) {
        CHECK(sys.m1.diag[i] == 1.0);
        CHECK(sys.m2.diag[i] == 1.0);
        CHECK(sys.alpha[i] == 0.0);
        CHECK(sys.gamma[i] == 0.0);
    }
}

TEST_CASE("Thomas solve inverts multiply") {
    Tridiagonal t;
    t.lower = {0.0, -0.3, 0.2, -0.1};
    t.diag = {2.0, 2.5, 3.0, 2.2};
    t.upper = {-0.4, 0.1, -0.2, 0.0};
    const std::vector<double> x{1.0, -2.0, 0.5, 3.0};
    const std::vector<double> b = t.multiply(x);
    const std::vector<double> y = t.solve(b);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("PSOR matches active-set enumeration on random LCPs") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 6);  // 3..8
        Tridiagonal m1;
        m1.lower.assign(n, 0.0);
        m1.diag.assign(n, 0.0);
        m1.upper.assign(n, 0.0);
        std::vector<double> b(n), psi(n);
        for (int i = 0; i < n; ++i) {
            const double off1 = 0.4 * u(rng), off2 = 0.4 * u(rng);
            if (i > 0) m1.lower[i] = off1;
            if (i < n - 1) m1.upper[i] = off2;
            // strict diagonal dominance keeps PSOR convergent
            m1.diag[i] = 1.0 + std::fabs(off1) + std::fabs(off2) + 0.2;
            b[i] = u(rng);
            psi[i] = u(rng);
        }
        const std::vector<double> ref = lcp_enumerate(m1, b, psi);
        REQUIRE(!ref.empty());
        const std::vector<double> got = psor_solve(m1, b, psi, psi, 1.2, 1e-12, 20000);
        for (int i = 0; i < n; ++i)
            CHECK(got[i] == doctest::Approx(ref[i]).epsilon(1e-7));
    }
}

TEST_CASE("PSOR with an unreachable obstacle is a plain linear solve") {
    Tridiagonal t;
    t.lower = {0.0, -0.2, 0.1};
    t.diag = {2.0, 2.4, 2.1};
    t.upper = {0.3, -0.1, 0.0};
    const std::vector<double> x{0.7, -0.4, 1.2};
    const std::vector<double> b = t.multiply(x);
    const std::vector<double> psi(3, -100.0);
    const std::vector<double> got = psor_solve(t, b, psi, {0.0, 0.0, 0.0}, 1.2, 1e-13, 20000);
    for (int i = 0; i < 3; ++i)
        CHECK(got[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("PSOR divergence reports the last delta") {
    Tridiagonal t;
    t.lower = {0.0, -0.2};
    t.diag = {2.0, 2.0};
    t.upper = {0.3, 0.0};
    CHECK_THROWS_AS(psor_solve(t, {1.0, 1.0}, {-10.0, -10.0}, {0.0, 0.0}, 1.2, 1e-16, 1),
                    PsorDivergence);
}

TEST_CASE("discounted futures price is the value of never exercising below it") {
    // With the risk-neutral generator and r = 0 the futures price is a
    // martingale, so solving with obstacle f - 0 yields g = f everywhere.
    const SpotModel m = cir_base();
    ContractSpec k = contract_base();
    k.rate_r = 0.0;
    k.cost_c = 0.0;
    const GridSpec g = coarse_grid(m, 60, 120);
    GeneratorConfig gen{Measure::RiskNeutral, false};
    auto xi = [&](double t, double s) { return futures_price(m, t, s, k.maturity_T); };
    const ValueSurface v = solve_vi(m, gen, k, g, xi, Sense::Max, ProblemTag::V);
    for (int i = 0; i <= g.n_space; i += 10)
        for (int j = 0; j <= g.n_time; j += 10)
            CHECK(v.at(i, j) == doctest::Approx(xi(v.t_of(j), v.s_of(i))).epsilon(2e-4));
}

TEST_CASE("value surfaces dominate their obstacles and meet terminal data") {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    const GridSpec g = coarse_grid(m, 50, 100);
    const auto [v, j] = solve_long_short(m, GeneratorConfig::historical(), k, g);
    for (int i = 0; i <= g.n_space; ++i) {
        for (int jj = 0; jj <= g.n_time; ++jj) {
            CHECK(v.at(i, jj) >= v.obstacle_at(i, jj) - 1e-9);
            CHECK(j.at(i, jj) >= j.obstacle_at(i, jj) - 1e-9);
        }
        // terminal condition: value equals obstacle at That
        CHECK(v.at(i, g.n_time) == v.obstacle_at(i, g.n_time));
        CHECK(j.at(i, g.n_time) == j.obstacle_at(i, g.n_time));
    }
}

TEST_CASE("U is below the immediate-cover obstacle (min-sense)") {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    const GridSpec g = coarse_grid(m, 50, 100);
    const auto [u, kk] = solve_short_long(m, GeneratorConfig::historical(), k, g);
    for (int i = 0; i <= g.n_space; i += 5)
        for (int jj = 0; jj <= g.n_time; jj += 5) {
            CHECK(u.at(i, jj) <= u.obstacle_at(i, jj) + 1e-9);
            CHECK(kk.at(i, jj) >= kk.obstacle_at(i, jj) - 1e-9);
        }
}

TEST_CASE("entry values decrease and exit values increase with cost") {
    const SpotModel m = cir_base();
    const GridSpec g = coarse_grid(m, 40, 80);
    ContractSpec cheap = contract_base();
    ContractSpec dear = cheap;
    dear.cost_c = dear.cost_chat = 0.05;
    const auto [v0, j0] = solve_long_short(m, GeneratorConfig::historical(), cheap, g);
    const auto [v1, j1] = solve_long_short(m, GeneratorConfig::historical(), dear, g);
    for (int i = 10; i < g.n_space; i += 7)
        for (int jj = 0; jj < g.n_time; jj += 7) {
            CHECK(v1.at(i, jj) <= v0.at(i, jj) + 1e-9);  // higher exit cost
            CHECK(j1.at(i, jj) <= j0.at(i, jj) + 1e-9);
        }
}

TEST_CASE("value_at interpolation reproduces grid nodes and is intermediate between them") {
    const SpotModel m = ou_base();
    const ContractSpec k = contract_base();
    const GridSpec g = coarse_grid(m, 20, 40);
    const auto [v, j] = solve_long_short(m, GeneratorConfig::historical(), k, g);
    (void)j;
    CHECK(v.value_at(v.t_of(3), v.s_of(7)) == doctest::Approx(v.at(7, 3)).epsilon(1e-12));
    const double mid = v.value_at(0.5 * (v.t_of(3) + v.t_of(4)), v.s_of(7));
    CHECK(mid >= std::min(v.at(7, 3), v.at(7, 4)) - 1e-12);
    CHECK(mid <= std::max(v.at(7, 3), v.at(7, 4)) + 1e-12);
}

TEST_CASE("boundary extraction on a synthetic surface") {
    ValueSurface s;
    s.grid = GridSpec{2, 10, 0.0, 10.0, 1.2, 1e-8, 100};
    s.deadline = 0.1;
    s.tag = ProblemTag::V;
    s.sense = Sense::Max;
    const int rows = s.grid.n_space + 1, cols = s.grid.n_time + 1;
    s.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    s.obstacle.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    // exercise (value == obstacle) for s >= 6, strictly above obstacle below
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            s.obstacle[static_cast<std::size_t>(i) * cols + j] = i;
            s.values[static_cast<std::size_t>(i) * cols + j] = (i >= 6) ? i : i + 1.0;
        }
    const BoundarySet b = extract_boundary(s, Side::ExerciseAbove);
    REQUIRE(b.times.size() == static_cast<std::size_t>(cols));
    for (const auto& lv : b.levels) {
        REQUIRE(lv.has_value());
        CHECK(*lv > 5.0);
        CHECK(*lv <= 6.0);
    }
}

TEST_CASE("chooser value dominates both one-sided entry values") {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    const GridSpec g = coarse_grid(m, 50, 100);
    const FullSolution sol = solve_all(m, GeneratorConfig::historical(), k, g);
    for (int i = 0; i <= g.n_space; i += 5)
        for (int jj = 0; jj <= g.n_time; jj += 5) {
            CHECK(sol.p.at(i, jj) >= sol.j.at(i, jj) - 1e-8);
            CHECK(sol.p.at(i, jj) >= sol.k.at(i, jj) - 1e-8);
            CHECK(sol.p.at(i, jj) >= -1e-12);
        }
    // branch flags only where the chooser is binding
    for (std::size_t n = 0; n < sol.branch.size(); ++n)
        CHECK(sol.branch[n] <= 2);
}

TEST_CASE("long entry boundary sits below the long exit boundary") {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    const GridSpec g = coarse_grid(m, 100, 200);
    const FullSolution sol = solve_all(m, GeneratorConfig::historical(), k, g);
    const BoundarySet& entry = sol.boundaries.long_entry;
    const BoundarySet& exit = sol.boundaries.long_exit;
    int compared = 0;
    for (std::size_t j = 0; j + 1 < entry.times.size(); ++j)
        if (entry.levels[j] && exit.levels[j]) {
            CHECK(*entry.levels[j] < *exit.levels[j]);
            ++compared;
        }
    CHECK(compared > 0);
}

TEST_CASE("grid refinement self-convergence of V at the spot") {
    const SpotModel m = cir_base();
    const ContractSpec k = contract_base();
    const double s0 = 12.12, t0 = 0.0;
    double prev = 0.0, prev_err = 0.0;
    std::vector<double> vals;
    for (int n : {50, 100, 200}) {
        const GridSpec g = coarse_grid(m, n, n);
        const auto [v, j] = solve_long_short(m, GeneratorConfig::historical(), k, g);
        (void)j;
        vals.push_back(v.value_at(t0, s0));
    }
    prev_err = std::fabs(vals[1] - vals[0]);
    prev = std::fabs(vals[2] - vals[1]);
    CHECK(prev < prev_err);        // error shrinks under refinement
    CHECK(prev < 0.01 * vals[2]);  // and is already small relative to the value
}

TEST_CASE("grid validation") {
    GridSpec g = default_grid(cir_base());
    CHECK(validate(g).empty());
    CHECK(g.s_max == doctest::Approx(4.0 * 18.16));
    g.omega = 2.5;
    CHECK(!validate(g).empty());
    GridSpec x = default_grid(xou_base());
    CHECK(x.s_min > 0.0);
    CHECK(x.s_max == doctest::Approx(std::exp(3.06 + 6.0 * 1.63 / std::sqrt(2.0 * 4.08))));
}
