#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include "grnlab/evolution.hpp"
#include "grnlab/experiments.hpp"
#include "grnlab/modularity.hpp"

namespace grnlab {

/// Everything a CLI invocation needs. Defaults are the mainline settings:
/// population 100, mutation 0.2, crossover 0.2, tournament 3, 2000
/// generations, perturbation rate 0.15, 500 samples per target.
struct RunConfig {
    EvolutionConfig evolution;
    int trials = 20;
    ExperimentKind experiment = ExperimentKind::compare;
    std::filesystem::path output_dir = "out";
    std::filesystem::path qnorm_table;  ///< empty: build in memory
    int qnorm_samples = kQNormSamples;
    RemovalOrder removal_order = RemovalOrder::greedy;
    int stochastic_repeats = 1;
    int library_size = 40;
    std::set<std::string> explicit_keys;  ///< keys present in the parsed file

    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

/// `key = value` lines, `#` starts a comment. Unknown or repeated keys,
/// malformed values and out-of-range rates raise ConfigError with the line.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Canonical key = value dump; parse_config_text round-trips it.
std::string to_config_text(const RunConfig& config);

}  // namespace grnlab
