#pragma once

// JSON experiment files for the command-line tool. Keys mirror the long flag names
// with '-' replaced by '_'.

#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delaywave/boundary.hpp"
#include "delaywave/config.hpp"
#include "delaywave/errors.hpp"

namespace delaywave::cli {

/// Settings that exist only on the command line (not part of SimConfig).
struct ToolSettings {
    std::optional<std::vector<double>> mu_list;
    std::optional<std::string> out_dir;
    std::optional<double> mu_min;
    std::optional<double> mu_max;
    std::optional<int> steps;
};

namespace detail {

inline double number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    return v.get<double>();
}

inline int integer(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
    return v.get<int>();
}

inline std::string text(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const nlohmann::json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, key));
    return out;
}

}  // namespace detail

/// Applies every key of the JSON object in `path` on top of `config` and `tool`.
/// Unknown keys and mistyped values raise ConfigError naming the key.
inline void apply_config_file(const std::string& path, SimConfig& config, ToolSettings& tool) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config", "top level must be an object");

    for (const auto& [key, v] : doc.items()) {
        using namespace detail;
        if (key == "ell") config.ell = number(v, key);
        else if (key == "mu") config.mu = number(v, key);
        else if (key == "boundary") config.boundary = parse_boundary_kind(text(v, key));
        else if (key == "solver") config.solver = parse_solver_kind(text(v, key));
        else if (key == "initial") config.initial = text(v, key);
        else if (key == "t_final") config.t_final = number(v, key);
        else if (key == "nodes") config.nodes = integer(v, key);
        else if (key == "trace_n") config.trace_n = integer(v, key);
        else if (key == "lambda") config.lambda = number(v, key);
        else if (key == "sample_stride") config.sample_stride = integer(v, key);
        else if (key == "snapshot_times") config.snapshot_times = numbers(v, key);
        else if (key == "damping") config.damping = number(v, key);
        else if (key == "window") {
            const auto w = numbers(v, key);
            if (w.size() != 2) throw ConfigError(key, "expected [t_a, t_b]");
            config.window = std::pair{w[0], w[1]};
        }
        else if (key == "mu_list") tool.mu_list = numbers(v, key);
        else if (key == "out_dir") tool.out_dir = text(v, key);
        else if (key == "mu_min") tool.mu_min = number(v, key);
        else if (key == "mu_max") tool.mu_max = number(v, key);
        else if (key == "steps") tool.steps = integer(v, key);
        else throw ConfigError(key, "unknown configuration key");
    }
}

}  // namespace delaywave::cli
