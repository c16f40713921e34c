// Command-line front end: pricing, calibration, roll-yield analytics,
// liquidation-premium checks, and the optimal trading boundary solver.
//
// Exit codes: 0 ok, 2 config error, 3 validation failure, 4 numerics.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrfut/calibration.hpp"
#include "mrfut/config.hpp"
#include "mrfut/model.hpp"
#include "mrfut/premium.hpp"
#include "mrfut/pricing.hpp"
#include "mrfut/rollyield.hpp"
#include "mrfut/vi_solver.hpp"

using nlohmann::json;
using namespace mrfut;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumerics = 4;

struct CliError : std::runtime_error {
    int code;
    CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[40];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

// data files stay byte-deterministic; the timestamp goes to a sidecar
void write_with_sidecar(const std::string& path, const std::string& data, const json& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(kExitConfig, "cannot write " + path);
    out << data;
    json m = meta;
    m["timestamp"] = iso_timestamp();
    std::ofstream side(path + ".meta.json");
    side << m.dump(2) << "\n";
}

void require_valid(const std::vector<std::string>& violations, const std::string& what) {
    if (violations.empty()) return;
    std::string msg = what + ":";
    for (const auto& v : violations) msg += " " + v + ";";
    throw CliError(kExitValidation, msg);
}

SpotModel load_model(const Config& cfg) {
    SpotModel m;
    try {
        m = cfg.model();
    } catch (const ConfigError& e) {
        throw CliError(kExitConfig, e.what());
    }
    require_valid(validate(m), "model validation failed");
    return m;
}

int cmd_validate(const Config& cfg) {
    SpotModel m;
    try {
        m = cfg.model();
    } catch (const ConfigError& e) {
        throw CliError(kExitConfig, e.what());
    }
    auto violations = validate(m);
    if (cfg.has("contract.maturity")) {
        for (const auto& v : validate(cfg.contract())) violations.push_back(v);
        const GridSpec g = cfg.grid(m);
        for (const auto& v : validate(g)) violations.push_back(v);
    }
    if (auto sched = cfg.schedule())
        for (const auto& v : validate(*sched)) violations.push_back(v);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cout << "violation: " << v << "\n";
        throw CliError(kExitValidation, "validation failed with " +
                                            std::to_string(violations.size()) + " violation(s)");
    }
    std::cout << "ok\n";
    return kExitOk;
}

int cmd_price(const Config& cfg, double t, double s, double T) {
    const SpotModel m = load_model(cfg);
    std::cout << fmt(futures_price(m, t, s, T)) << "\n";
    return kExitOk;
}

int cmd_curve(const Config& cfg, double s0, const std::vector<double>& maturities,
              const std::string& out_path) {
    const SpotModel m = load_model(cfg);
    const FuturesCurve curve = term_structure(m, s0, maturities);
    std::ostringstream csv;
    csv << "maturity_days,maturity_years,price\n";
    for (std::size_t i = 0; i < curve.maturities.size(); ++i)
        csv << fmt(curve.maturities[i] * 252.0) << "," << fmt(curve.maturities[i]) << ","
            << fmt(curve.prices[i]) << "\n";
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        write_with_sidecar(out_path, csv.str(),
                           {{"command", "curve"}, {"model", to_string(m.kind)}, {"s0", s0}});
    }
    return kExitOk;
}

int cmd_calibrate(const std::string& kind_name, double s0, const std::string& input,
                  double sigma_fixed, const std::string& out_path) {
    const ModelKind kind = model_kind_from_string(kind_name);
    FuturesCurve curve;
    curve.s0 = s0;
    std::ifstream in(input);
    if (!in) throw CliError(kExitConfig, "cannot open curve CSV: " + input);
    std::string line;
    auto split = [](const std::string& row) {
        std::vector<std::string> fields;
        std::istringstream ss(row);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        return fields;
    };
    std::size_t col_days = 0, col_price = 1;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            const auto names = split(line);
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (names[i] == "maturity_days") col_days = i;
                if (names[i] == "price") col_price = i;
            }
            continue;
        }
        const auto fields = split(line);
        if (fields.size() <= std::max(col_days, col_price))
            throw CliError(kExitConfig, "malformed curve row: " + line);
        curve.maturities.push_back(std::stod(fields[col_days]) / 252.0);
        curve.prices.push_back(std::stod(fields[col_price]));
    }

    CalibrationResult res;
    try {
        res = calibrate(kind, s0, curve,
                        sigma_fixed > 0.0 ? std::optional<double>(sigma_fixed) : std::nullopt);
    } catch (const std::invalid_argument& e) {
        throw CliError(kExitValidation, e.what());
    }
    if (!res.converged) {
        std::cerr << json{{"warning", "calibration did not converge"}, {"sse", res.sse}}.dump()
                  << "\n";
    }

    std::ostringstream frag;
    frag << "[model]\n"
         << "kind = " << to_string(kind) << "\n"
         << "mu = " << fmt(res.params.mu_q) << "\n"
         << "theta = " << fmt(res.params.theta_q) << "\n"
         << "mu_q = " << fmt(res.params.mu_q) << "\n"
         << "theta_q = " << fmt(res.params.theta_q) << "\n"
         << "sigma = " << fmt(res.params.sigma) << "\n";
    if (!out_path.empty())
        write_with_sidecar(out_path, frag.str(), {{"command", "calibrate"}, {"input", input}});

    json report{{"kind", to_string(kind)},
                {"mu_q", res.params.mu_q},
                {"theta_q", res.params.theta_q},
                {"sigma", res.params.sigma},
                {"sse", res.sse},
                {"iterations", res.iterations},
                {"converged", res.converged}};
    std::cout << report.dump(2) << "\n";
    return res.converged ? kExitOk : kExitNumerics;
}

int cmd_simulate(const Config& cfg, const std::string& measure_name, double s0, double horizon,
                 int n_steps, int n_paths, const std::string& out_path) {
    const SpotModel m = load_model(cfg);
    const Measure measure =
        measure_name == "historical" ? Measure::Historical : Measure::RiskNeutral;
    PathSpec spec;
    spec.s0 = s0;
    spec.n_steps = n_steps;
    spec.dt = horizon / n_steps;
    spec.n_paths = n_paths;
    spec.seed = cfg.seed();
    const PathSet paths = simulate(m, measure, spec);
    std::ostringstream csv;
    write_paths_csv(csv, paths);
    if (out_path.empty()) std::cout << csv.str();
    else
        write_with_sidecar(out_path, csv.str(),
                           {{"command", "simulate"},
                            {"measure", measure_name},
                            {"seed", spec.seed},
                            {"model", to_string(m.kind)}});
    return kExitOk;
}

int cmd_rollyield(const Config& cfg, double t, bool simulate_mode, int n_paths, int steps_per_year,
                  const std::string& out_path) {
    const SpotModel m = load_model(cfg);
    const auto sched = cfg.schedule();
    if (!sched) throw CliError(kExitConfig, "rollyield requires [schedule] maturities");
    require_valid(validate(*sched), "schedule validation failed");
    const double s0 = cfg.get_double("io.s0", m.theta);

    const double expected = expected_roll_yield(m, s0, *sched, t);
    if (!simulate_mode) {
        std::cout << json{{"expected_roll_yield", expected}, {"t", t}, {"s0", s0}}.dump(2) << "\n";
        return kExitOk;
    }

    PathSpec spec;
    spec.s0 = s0;
    spec.dt = 1.0 / steps_per_year;
    spec.n_steps = static_cast<int>(std::ceil(t * steps_per_year)) + 1;
    spec.n_paths = n_paths;
    spec.seed = cfg.seed();
    const PathSet paths = simulate(m, Measure::Historical, spec);

    std::ostringstream csv;
    csv << "path_id,time,basis_return,roll_adjustment,total\n";
    double sum = 0.0, sum2 = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        const RollDecomposition d = cumulative_roll_yield(m, paths, p, *sched, t);
        csv << p << "," << fmt(t) << "," << fmt(d.basis_return) << "," << fmt(d.roll_adjustment)
            << "," << fmt(d.total) << "\n";
        sum += d.total;
        sum2 += d.total * d.total;
    }
    const double mean = sum / n_paths;
    const double var = (sum2 - sum * sum / n_paths) / (n_paths - 1);
    if (!out_path.empty())
        write_with_sidecar(out_path, csv.str(),
                           {{"command", "rollyield"}, {"seed", spec.seed}, {"paths", n_paths}});
    std::cout << json{{"expected_roll_yield", expected},
                      {"mc_mean", mean},
                      {"mc_stderr", std::sqrt(var / n_paths)},
                      {"paths", n_paths}}
                     .dump(2)
              << "\n";
    return kExitOk;
}

int cmd_premium(const Config& cfg, double t, double s, const std::string& out_path) {
    const SpotModel m = load_model(cfg);
    const ContractSpec contract = cfg.contract();
    require_valid(validate(contract), "contract validation failed");

    SignBox box = default_sign_box(m, s > 0 ? s : m.theta_q);
    box.s_lo = cfg.get_double("premium.s_lo", box.s_lo);
    box.s_hi = cfg.get_double("premium.s_hi", box.s_hi);
    box.n_u = cfg.get_int("premium.n_u", box.n_u);
    box.n_s = cfg.get_int("premium.n_s", box.n_s);
    const LiquidationAdvice adv = classify_liquidation(m, contract, t, box);

    json out{{"verdict", to_string(adv.verdict)},
             {"box", {{"s_lo", adv.box.s_lo}, {"s_hi", adv.box.s_hi},
                      {"n_u", adv.box.n_u}, {"n_s", adv.box.n_s}}},
             {"scope", "on sampled box"},
             {"n_positive", adv.n_positive},
             {"n_negative", adv.n_negative}};

    if (!out_path.empty()) {
        const GridSpec grid = cfg.grid(m);
        ValueSurface v;
        try {
            v = liquidation_value_surface(m, contract, grid, cfg.generator());
        } catch (const PsorDivergence& e) {
            throw CliError(kExitNumerics, e.what());
        }
        std::ostringstream csv;
        csv << "spot,premium\n";
        const int jt = std::min(static_cast<int>(t / v.dt() + 0.5), grid.n_time);
        for (int i = 0; i <= grid.n_space; ++i) {
            const double si = v.s_of(i);
            csv << fmt(si) << "," << fmt(v.at(i, jt) - v.obstacle_at(i, jt)) << "\n";
        }
        write_with_sidecar(out_path, csv.str(), {{"command", "premium"}, {"t", t}});
    }
    if (s > 0.0 && cfg.has("contract.maturity")) {
        const GridSpec grid = cfg.grid(m);
        out["premium"] = delayed_liquidation_premium(m, contract, grid, t, s, cfg.generator());
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_boundaries(const Config& cfg, const std::string& out_path,
                   const std::string& surfaces_path) {
    const SpotModel m = load_model(cfg);
    const ContractSpec contract = cfg.contract();
    require_valid(validate(contract), "contract validation failed");
    const GridSpec grid = cfg.grid(m);
    require_valid(validate(grid), "grid validation failed");

    FullSolution sol;
    try {
        sol = solve_all(m, cfg.generator(), contract, grid);
    } catch (const PsorDivergence& e) {
        throw CliError(kExitNumerics, e.what());
    }

    auto cell = [](const BoundarySet& b, std::size_t j) {
        return b.levels[j] ? fmt(*b.levels[j]) : std::string();
    };
    std::ostringstream csv;
    csv << "time,long_entry,long_exit,short_entry,short_exit,chooser_long,chooser_short\n";
    const auto& bd = sol.boundaries;
    for (std::size_t j = 0; j < bd.long_entry.times.size(); ++j) {
        csv << fmt(bd.long_entry.times[j]) << "," << cell(bd.long_entry, j) << ","
            << cell(bd.long_exit, j) << "," << cell(bd.short_entry, j) << ","
            << cell(bd.short_exit, j) << "," << cell(bd.chooser_long, j) << ","
            << cell(bd.chooser_short, j) << "\n";
    }
    const json meta{{"command", "boundaries"},
                    {"model", to_string(m.kind)},
                    {"n_time", grid.n_time},
                    {"n_space", grid.n_space}};
    if (out_path.empty()) std::cout << csv.str();
    else write_with_sidecar(out_path, csv.str(), meta);

    if (!surfaces_path.empty()) {
        std::ostringstream sc;
        sc << "time,spot,V,J,U,K,P,binding_branch\n";
        const int N = grid.n_time;
        for (int j = 0; j <= N; ++j)
            for (int i = 0; i <= grid.n_space; ++i) {
                const std::size_t id = static_cast<std::size_t>(i) * (N + 1) + j;
                const char* branch = sol.branch[id] == 1 ? "long"
                                     : sol.branch[id] == 2 ? "short" : "";
                sc << fmt(sol.v.t_of(j)) << "," << fmt(sol.v.s_of(i)) << ","
                   << fmt(sol.v.values[id]) << "," << fmt(sol.j.values[id]) << ","
                   << fmt(sol.u.values[id]) << "," << fmt(sol.k.values[id]) << ","
                   << fmt(sol.p.values[id]) << "," << branch << "\n";
            }
        write_with_sidecar(surfaces_path, sc.str(), meta);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Futures pricing, roll yield, and optimal trading boundaries "
                 "under mean-reverting spot models"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "config file (key = value with [sections])");
    app.add_option("--set", overrides, "override a config key, e.g. --set model.sigma=5.33");

    // validate
    auto* sc_validate = app.add_subcommand("validate", "check model/contract/grid invariants");

    // price
    auto* sc_price = app.add_subcommand("price", "futures price f(t,s;T)");
    std::string t_str{"0"}, T_str, mat_str;
    double spot = 0.0;
    sc_price->add_option("--t", t_str, "current time (years or Nd)");
    sc_price->add_option("--s", spot, "spot level")->required();
    sc_price->add_option("--T", T_str, "maturity (years or Nd)")->required();

    // curve
    auto* sc_curve = app.add_subcommand("curve", "futures term structure CSV");
    double s0 = 0.0;
    std::string out_path, surfaces_path;
    sc_curve->add_option("--s0", s0, "spot level")->required();
    sc_curve->add_option("--maturities", mat_str, "comma-separated maturities (years or Nd)")
        ->required();
    sc_curve->add_option("--out", out_path, "output CSV path (default stdout)");

    // calibrate
    auto* sc_cal = app.add_subcommand("calibrate", "fit risk-neutral parameters to a curve");
    std::string kind_name, input_path;
    double sigma_fixed = 0.0;
    sc_cal->add_option("--kind", kind_name, "OU, CIR, or XOU")->required();
    sc_cal->add_option("--spot", s0, "current spot")->required();
    sc_cal->add_option("--input", input_path, "CSV with maturity_days,price")->required();
    sc_cal->add_option("--sigma", sigma_fixed, "fix sigma instead of fitting it (XOU)");
    sc_cal->add_option("--out", out_path, "write config fragment here");

    // simulate
    auto* sc_sim = app.add_subcommand("simulate", "simulate spot paths to CSV");
    std::string measure_name{"historical"};
    double horizon = 1.0;
    int n_steps = 252, n_paths = 100;
    sc_sim->add_option("--measure", measure_name, "historical or risk_neutral");
    sc_sim->add_option("--s0", s0, "initial spot")->required();
    sc_sim->add_option("--horizon", horizon, "simulation horizon in years");
    sc_sim->add_option("--steps", n_steps, "number of time steps");
    sc_sim->add_option("--paths", n_paths, "number of paths");
    sc_sim->add_option("--out", out_path, "output CSV path (default stdout)");

    // rollyield
    auto* sc_roll = app.add_subcommand("rollyield", "expected/simulated cumulative roll yield");
    bool simulate_mode = false;
    int steps_per_year = 2520;
    sc_roll->add_option("--t", t_str, "horizon (years or Nd)")->required();
    sc_roll->add_flag("--simulate", simulate_mode, "Monte-Carlo mode");
    sc_roll->add_option("--paths", n_paths, "paths in simulation mode");
    sc_roll->add_option("--steps-per-year", steps_per_year, "path resolution");
    sc_roll->add_option("--out", out_path, "per-path CSV output");

    // premium
    auto* sc_prem = app.add_subcommand("premium", "delayed liquidation premium analytics");
    sc_prem->add_option("--t", t_str, "analysis time (years or Nd)");
    sc_prem->add_option("--s", spot, "spot at which to evaluate L(t,s)");
    sc_prem->add_option("--out", out_path, "premium-by-spot CSV output");

    // boundaries
    auto* sc_bnd = app.add_subcommand("boundaries", "optimal trading boundaries CSV");
    sc_bnd->add_option("--out", out_path, "boundaries CSV path (default stdout)");
    sc_bnd->add_option("--surfaces", surfaces_path, "optional surface dump CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg;
        try {
            if (!config_path.empty()) cfg = Config::parse_file(config_path);
            for (const auto& ov : overrides) {
                const auto eq = ov.find('=');
                if (eq == std::string::npos)
                    throw ConfigError("--set expects key=value, got: " + ov);
                cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
            }
        } catch (const ConfigError& e) {
            throw CliError(kExitConfig, e.what());
        }

        if (sc_validate->parsed()) return cmd_validate(cfg);
        if (sc_price->parsed())
            return cmd_price(cfg, parse_time(t_str), spot, parse_time(T_str));
        if (sc_curve->parsed()) {
            std::vector<double> mats;
            std::istringstream in(mat_str);
            std::string tok;
            while (std::getline(in, tok, ',')) mats.push_back(parse_time(tok));
            return cmd_curve(cfg, s0, mats, out_path);
        }
        if (sc_cal->parsed())
            return cmd_calibrate(kind_name, s0, input_path, sigma_fixed, out_path);
        if (sc_sim->parsed())
            return cmd_simulate(cfg, measure_name, s0, horizon, n_steps, n_paths, out_path);
        if (sc_roll->parsed())
            return cmd_rollyield(cfg, parse_time(t_str), simulate_mode, n_paths, steps_per_year,
                                 out_path);
        if (sc_prem->parsed()) return cmd_premium(cfg, parse_time(t_str), spot, out_path);
        if (sc_bnd->parsed()) return cmd_boundaries(cfg, out_path, surfaces_path);
        return kExitConfig;
    } catch (const CliError& e) {
        std::cerr << json{{"error", e.what()}, {"code", e.code}}.dump() << "\n";
        return e.code;
    } catch (const ConfigError& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitConfig}}.dump() << "\n";
        return kExitConfig;
    } catch (const PsorDivergence& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitNumerics}}.dump() << "\n";
        return kExitNumerics;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}, {"code", kExitValidation}}.dump() << "\n";
        return kExitValidation;
    }
}
