#include "mrfut/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mrfut {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

double parse_time(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty time value");
    if (t.back() == 'd' || t.back() == 'D') {
        const double days = std::stod(t.substr(0, t.size() - 1));
        return days / 252.0;
    }
    return std::stod(t);
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
    try {
        return std::stod(get_string(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("config key " + key + " is not a number");
    }
}

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
    return has(key) ? static_cast<int>(std::llround(get_double(key))) : fallback;
}

double Config::get_time(const std::string& key) const { return parse_time(get_string(key)); }

double Config::get_time(const std::string& key, double fallback) const {
    return has(key) ? get_time(key) : fallback;
}

SpotModel Config::model() const {
    SpotModel m;
    m.kind = model_kind_from_string(get_string("model.kind"));
    m.mu = get_double("model.mu");
    m.theta = get_double("model.theta");
    m.mu_q = get_double("model.mu_q", m.mu);
    m.theta_q = get_double("model.theta_q", m.theta);
    m.sigma = get_double("model.sigma");
    return m;
}

ContractSpec Config::contract() const {
    ContractSpec c;
    c.maturity_T = get_time("contract.maturity");
    c.deadline_That = get_time("contract.deadline", c.maturity_T);
    c.rate_r = get_double("contract.rate", 0.05);
    c.cost_c = get_double("contract.cost_c", 0.0);
    c.cost_chat = get_double("contract.cost_chat", c.cost_c);
    return c;
}

GridSpec Config::grid(const SpotModel& m) const {
    GridSpec g = default_grid(m);
    g.n_time = get_int("grid.n_time", g.n_time);
    g.n_space = get_int("grid.n_space", g.n_space);
    g.s_max = get_double("grid.s_max", g.s_max);
    if (has("grid.s_min")) g.s_min = get_double("grid.s_min");
    else if (m.kind == ModelKind::XOU) g.s_min = g.s_max / g.n_space;
    g.omega = get_double("grid.omega", g.omega);
    g.epsilon = get_double("grid.epsilon", g.epsilon);
    g.max_iter = get_int("grid.max_iter", g.max_iter);
    return g;
}

std::optional<RollSchedule> Config::schedule() const {
    if (!has("schedule.maturities")) return std::nullopt;
    RollSchedule s;
    std::istringstream in(get_string("schedule.maturities"));
    std::string tok;
    while (std::getline(in, tok, ','))
        s.maturities.push_back(parse_time(tok));
    return s;
}

GeneratorConfig Config::generator() const {
    const std::string g = get_string("solver.generator", "historical");
    if (g == "historical") return GeneratorConfig::historical();
    if (g == "printed") return GeneratorConfig::printed();
    if (g == "risk_neutral") return {Measure::RiskNeutral, false};
    throw ConfigError("solver.generator must be historical, risk_neutral, or printed");
}

std::uint64_t Config::seed() const {
    return static_cast<std::uint64_t>(get_double("io.seed", 12345));
}

}  // namespace mrfut
