#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrfut/model.hpp"
#include "mrfut/pricing.hpp"
#include "mrfut/rollyield.hpp"
#include "mrfut/vi_solver.hpp"

namespace mrfut {

// Flat key-value config with [section] headers. Keys are looked up as
// "section.key"; later assignments win, which is how CLI overrides work.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    // times accept plain years or "Nd" meaning N/252 years
    double get_time(const std::string& key) const;
    double get_time(const std::string& key, double fallback) const;

    SpotModel model() const;
    ContractSpec contract() const;
    GridSpec grid(const SpotModel& model) const;  // model supplies s_max defaults
    std::optional<RollSchedule> schedule() const;
    GeneratorConfig generator() const;
    std::uint64_t seed() const;

private:
    std::map<std::string, std::string> kv_;
};

// "66d" -> 66/252, otherwise parsed as years.
double parse_time(const std::string& text);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mrfut
