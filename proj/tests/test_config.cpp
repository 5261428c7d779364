#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "grnlab/config.hpp"

using namespace grnlab;

namespace {

std::string error_of(std::string_view text)
{
    try {
        parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty configuration gives the mainline defaults")
{
    const auto c = parse_config_text("");
    CHECK(c.evolution.population_size == 100);
    CHECK(c.evolution.mutation_rate == 0.2);
    CHECK(c.evolution.crossover_rate == 0.2);
    CHECK(c.evolution.tournament_size == 3);
    CHECK(c.evolution.generations == 2000);
    CHECK(c.evolution.phase2_start == 500);
    CHECK(c.evolution.perturbation_rate == 0.15);
    CHECK(c.evolution.samples == 500);
    CHECK(c.evolution.mode == EvaluationMode::distributional);
    CHECK(c.evolution.copy_policy == CopyPolicy::selected);
    CHECK(c.trials == 20);
    CHECK(c.explicit_keys.empty());

    const auto comments = parse_config_text("# nothing here\n\n   \t\n");
    CHECK(comments.evolution.population_size == 100);
}

TEST_CASE("keys, comments and whitespace")
{
    const auto c = parse_config_text("seed = 42   # master seed\r\n"
                                     "  evaluation_mode=stoch\n"
                                     "copy_policy = uniform\n"
                                     "selection = proportional\n"
                                     "cache = off\n"
                                     "output_dir = runs/a\n"
                                     "removal_order = fixed\n");
    CHECK(c.evolution.seed == 42);
    CHECK(c.evolution.mode == EvaluationMode::stochastic);
    CHECK(c.evolution.copy_policy == CopyPolicy::uniform);
    CHECK(c.evolution.selection == SelectionScheme::proportional);
    CHECK_FALSE(c.evolution.use_cache);
    CHECK(c.output_dir == "runs/a");
    CHECK(c.removal_order == RemovalOrder::fixed);
    CHECK(c.explicit_keys.count("seed") == 1);
    CHECK(c.explicit_keys.count("crossover_rate") == 0);
}

TEST_CASE("errors carry the line and the key")
{
    const auto range = error_of("seed = 1\nmutation_rate = 1.5\n");
    CHECK(range.find("line 2") != std::string::npos);
    CHECK(range.find("mutation_rate") != std::string::npos);

    const auto dup = error_of("seed = 42\n# again\nseed = 42\n");
    CHECK(dup.find("line 3") != std::string::npos);
    CHECK(dup.find("duplicate") != std::string::npos);

    const auto unknown = error_of("populaton_size = 10\n");
    CHECK(unknown.find("line 1") != std::string::npos);
    CHECK(unknown.find("populaton_size") != std::string::npos);

    CHECK(error_of("generations = many\n").find("malformed") != std::string::npos);
    CHECK(error_of("generations = 10x\n").find("malformed") != std::string::npos);
    CHECK(error_of("evaluation_mode = fuzzy\n").find("line 1") != std::string::npos);
    CHECK(error_of("just words\n").find("line 1") != std::string::npos);
    CHECK(error_of("seed =\n").find("missing value") != std::string::npos);
    CHECK(error_of("crossover_rate = -0.1\n").find("crossover_rate") != std::string::npos);
    // Cross-field checks run after parsing.
    CHECK_FALSE(error_of("generations = 100\nphase2_start = 200\n").empty());
    CHECK_FALSE(error_of("trials = 0\n").empty());
}

TEST_CASE("canonical dump round-trips")
{
    auto c = parse_config_text("seed = 9\nmutation_rate = 0.05\nevaluation_mode = stoch\nqnorm_table = q.csv\n"
                               "library_size = 12\n");
    const auto again = parse_config_text(to_config_text(c));
    CHECK(to_config_text(again) == to_config_text(c));
    CHECK(again.evolution.mutation_rate == 0.05);
    CHECK(again.qnorm_table == "q.csv");
    CHECK(again.library_size == 12);
}

TEST_CASE("parsing a file leaves it untouched")
{
    const auto path = std::filesystem::temp_directory_path() / "grnlab_config_test.cfg";
    const std::string text = "seed = 5\npopulation_size = 30\n";
    {
        std::ofstream f(path, std::ios::binary);
        f << text;
    }
    const auto c = parse_config(path);
    CHECK(c.evolution.population_size == 30);
    std::ifstream f(path, std::ios::binary);
    const std::string after((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(after == text);
    std::filesystem::remove(path);
    CHECK_THROWS(parse_config(path));
}
