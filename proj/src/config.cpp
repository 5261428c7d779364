#include "grnlab/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "grnlab/io.hpp"

namespace grnlab {

void RunConfig::validate() const
{
    evolution.validate();
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (qnorm_samples < 1) throw std::invalid_argument("qnorm_samples must be >= 1");
    if (stochastic_repeats < 1) throw std::invalid_argument("stochastic_repeats must be >= 1");
    if (library_size < 1) throw std::invalid_argument("library_size must be >= 1");
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, int line)
{
    T out{};
    const auto* end = value.data() + value.size();
    auto res = std::from_chars(value.data(), end, out);
    if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(line, "malformed value '" + std::string(value) + "' for " + std::string(key));
    return out;
}

double parse_rate(std::string_view key, std::string_view value, int line)
{
    const double v = parse_number<double>(key, value, line);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(line, std::string(key) + " = " + std::string(value) + " outside [0, 1]");
    return v;
}

bool parse_bool(std::string_view key, std::string_view value, int line)
{
    if (value == "true" || value == "on" || value == "1") return true;
    if (value == "false" || value == "off" || value == "0") return false;
    throw ConfigError(line, "malformed boolean '" + std::string(value) + "' for " + std::string(key));
}

template <typename F>
auto wrap(std::string_view key, int line, F&& f)
{
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(line, std::string(key) + ": " + e.what());
    }
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value, int line)>;

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = {
        {"genes", [](RunConfig& c, auto k, auto v, int l) { c.evolution.genes = parse_number<std::size_t>(k, v, l); }},
        {"population_size",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.population_size = parse_number<int>(k, v, l); }},
        {"mutation_rate", [](RunConfig& c, auto k, auto v, int l) { c.evolution.mutation_rate = parse_rate(k, v, l); }},
        {"crossover_rate", [](RunConfig& c, auto k, auto v, int l) { c.evolution.crossover_rate = parse_rate(k, v, l); }},
        {"activation_rate",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.activation_rate = parse_rate(k, v, l); }},
        {"perturbation_rate",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.perturbation_rate = parse_rate(k, v, l); }},
        {"tournament_size",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.tournament_size = parse_number<int>(k, v, l); }},
        {"generations", [](RunConfig& c, auto k, auto v, int l) { c.evolution.generations = parse_number<int>(k, v, l); }},
        {"phase2_start",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.phase2_start = parse_number<int>(k, v, l); }},
        {"initial_edges",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.initial_edges = parse_number<int>(k, v, l); }},
        {"seed", [](RunConfig& c, auto k, auto v, int l) { c.evolution.seed = parse_number<std::uint64_t>(k, v, l); }},
        {"samples_per_target",
         [](RunConfig& c, auto k, auto v, int l) { c.evolution.samples = parse_number<int>(k, v, l); }},
        {"horizon", [](RunConfig& c, auto k, auto v, int l) { c.evolution.horizon = parse_number<int>(k, v, l); }},
        {"evaluation_mode",
         [](RunConfig& c, auto k, auto v, int l) {
             c.evolution.mode = wrap(k, l, [&] { return parse_evaluation_mode(std::string(v)); });
         }},
        {"selection",
         [](RunConfig& c, auto k, auto v, int l) {
             c.evolution.selection = wrap(k, l, [&] { return parse_selection_scheme(std::string(v)); });
         }},
        {"copy_policy",
         [](RunConfig& c, auto k, auto v, int l) {
             c.evolution.copy_policy = wrap(k, l, [&] { return parse_copy_policy(std::string(v)); });
         }},
        {"cache", [](RunConfig& c, auto k, auto v, int l) { c.evolution.use_cache = parse_bool(k, v, l); }},
        {"trials", [](RunConfig& c, auto k, auto v, int l) { c.trials = parse_number<int>(k, v, l); }},
        {"experiment",
         [](RunConfig& c, auto k, auto v, int l) {
             c.experiment = wrap(k, l, [&] { return parse_experiment_kind(std::string(v)); });
         }},
        {"output_dir", [](RunConfig& c, auto, auto v, int) { c.output_dir = std::string(v); }},
        {"qnorm_table", [](RunConfig& c, auto, auto v, int) { c.qnorm_table = std::string(v); }},
        {"qnorm_samples", [](RunConfig& c, auto k, auto v, int l) { c.qnorm_samples = parse_number<int>(k, v, l); }},
        {"removal_order",
         [](RunConfig& c, auto k, auto v, int l) {
             if (v == "greedy")
                 c.removal_order = RemovalOrder::greedy;
             else if (v == "fixed")
                 c.removal_order = RemovalOrder::fixed;
             else
                 throw ConfigError(l, "malformed value '" + std::string(v) + "' for " + std::string(k));
         }},
        {"stochastic_repeats",
         [](RunConfig& c, auto k, auto v, int l) { c.stochastic_repeats = parse_number<int>(k, v, l); }},
        {"library_size", [](RunConfig& c, auto k, auto v, int l) { c.library_size = parse_number<int>(k, v, l); }},
    };
    return table;
}

}  // namespace

RunConfig parse_config_text(std::string_view text)
{
    RunConfig config;
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "missing value for " + std::string(key));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + std::string(key) + "'");
        if (!seen.insert(std::string(key)).second) throw ConfigError(line_no, "duplicate key '" + std::string(key) + "'");
        it->second(config, key, value, line_no);
        config.explicit_keys.insert(std::string(key));
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    return config;
}

RunConfig parse_config(const std::filesystem::path& path) { return parse_config_text(read_file(path)); }

std::string to_config_text(const RunConfig& c)
{
    const auto& e = c.evolution;
    std::ostringstream out;
    out << "genes = " << e.genes << '\n'
        << "population_size = " << e.population_size << '\n'
        << "mutation_rate = " << format_double(e.mutation_rate) << '\n'
        << "crossover_rate = " << format_double(e.crossover_rate) << '\n'
        << "activation_rate = " << format_double(e.activation_rate) << '\n'
        << "perturbation_rate = " << format_double(e.perturbation_rate) << '\n'
        << "tournament_size = " << e.tournament_size << '\n'
        << "generations = " << e.generations << '\n'
        << "phase2_start = " << e.phase2_start << '\n'
        << "initial_edges = " << e.initial_edges << '\n'
        << "seed = " << e.seed << '\n'
        << "samples_per_target = " << e.samples << '\n'
        << "horizon = " << e.horizon << '\n'
        << "evaluation_mode = " << to_string(e.mode) << '\n'
        << "selection = " << to_string(e.selection) << '\n'
        << "copy_policy = " << to_string(e.copy_policy) << '\n'
        << "cache = " << (e.use_cache ? "true" : "false") << '\n'
        << "trials = " << c.trials << '\n'
        << "experiment = " << to_string(c.experiment) << '\n'
        << "output_dir = " << c.output_dir.string() << '\n';
    if (!c.qnorm_table.empty()) out << "qnorm_table = " << c.qnorm_table.string() << '\n';
    out << "qnorm_samples = " << c.qnorm_samples << '\n'
        << "removal_order = " << (c.removal_order == RemovalOrder::greedy ? "greedy" : "fixed") << '\n'
        << "stochastic_repeats = " << c.stochastic_repeats << '\n'
        << "library_size = " << c.library_size << '\n';
    return out.str();
}

}  // namespace grnlab
