#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "grnlab/evolution.hpp"

using namespace grnlab;

namespace {

Population flat_population(std::size_t size, double fitness)
{
    Population p(size);
    for (auto& ind : p) {
        ind.genome = Grn(10);
        ind.report.selection_fitness = fitness;
        ind.report.distributional_fitness = fitness;
    }
    return p;
}

EvolutionConfig small_config()
{
    EvolutionConfig c;
    c.population_size = 20;
    c.generations = 30;
    c.phase2_start = 10;
    c.seed = 3;
    return c;
}

Grn random_grn(Rng& rng, int edges)
{
    EvolutionConfig c;
    c.population_size = 1;
    c.initial_edges = edges;
    return init_population(c, rng).front();
}

}  // namespace

TEST_CASE("diagonal crossover")
{
    SUBCASE("two-gene worked example")
    {
        const Grn a({{1, 1}, {1, 1}});
        const Grn b(2);
        const auto [c1, c2] = diagonal_crossover(a, b, 2);
        CHECK(c1 == Grn({{1, 0}, {0, 1}}));
        CHECK(c2 == Grn({{0, 1}, {1, 0}}));
    }
    SUBCASE("pivot 1 is a null operation")
    {
        Rng rng(1);
        const Grn a = random_grn(rng, 30), b = random_grn(rng, 40);
        const auto [c1, c2] = diagonal_crossover(a, b, 1);
        CHECK(c1 == a);
        CHECK(c2 == b);
    }
    SUBCASE("every pivot conserves the pair's edge total and keeps diagonal blocks")
    {
        Rng rng(2);
        for (int k = 0; k < 50; ++k) {
            const Grn a = random_grn(rng, 10 + k), b = random_grn(rng, 60 - k);
            for (std::size_t pivot = 1; pivot <= 10; ++pivot) {
                const auto [c1, c2] = diagonal_crossover(a, b, pivot);
                CHECK(c1.edge_count() + c2.edge_count() == a.edge_count() + b.edge_count());
                const std::size_t split = pivot - 1;
                for (std::size_t i = 0; i < 10; ++i)
                    for (std::size_t j = 0; j < 10; ++j) {
                        const bool diag = (i < split) == (j < split);
                        CHECK(c1.at(i, j) == (diag ? a : b).at(i, j));
                        CHECK(c2.at(i, j) == (diag ? b : a).at(i, j));
                    }
            }
        }
    }
    SUBCASE("bad pivots and sizes")
    {
        CHECK_THROWS_AS(diagonal_crossover(Grn(10), Grn(10), 0), std::out_of_range);
        CHECK_THROWS_AS(diagonal_crossover(Grn(10), Grn(10), 11), std::out_of_range);
        CHECK_THROWS_AS(diagonal_crossover(Grn(10), Grn(9), 1), std::invalid_argument);
    }
}

TEST_CASE("mutation bias")
{
    CHECK(removal_probability(2, 10) == doctest::Approx(0.5));
    CHECK(removal_probability(0, 10) == 0.0);
    CHECK(removal_probability(10, 10) == 1.0);

    SUBCASE("empty rows only gain, full rows only lose")
    {
        Rng rng(4);
        const Grn empty(10);
        Grn full(10);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t j = 0; j < 10; ++j) full.set(i, j, 1);
        for (int k = 0; k < 20; ++k) {
            CHECK(biased_mutation(empty, 1.0, 0.5, rng).edge_count() == 10);
            CHECK(biased_mutation(full, 1.0, 0.5, rng).edge_count() == 90);
        }
    }
    SUBCASE("at the neutral point gains and losses balance")
    {
        // Every row holds two regulators, so p(u) = 0.5 everywhere.
        Grn g(10);
        for (std::size_t i = 0; i < 10; ++i) {
            g.set(i, i, 1);
            g.set(i, (i + 1) % 10, -1);
        }
        Rng rng(5);
        long delta = 0;
        const int reps = 20000;
        for (int k = 0; k < reps; ++k) delta += biased_mutation(g, 1.0, 0.5, rng).edge_count() - 20;
        // Each of the 10 rows moves +-1; the sum has sd sqrt(10) per draw.
        CHECK(std::abs(static_cast<double>(delta) / reps) < 4.0 * std::sqrt(10.0 / reps));
    }
    SUBCASE("unchanged probability is (1 - mu)^N")
    {
        Rng rng(6);
        const Grn g = random_grn(rng, 20);
        int unchanged = 0;
        const int reps = 50000;
        for (int k = 0; k < reps; ++k) unchanged += biased_mutation(g, 0.05, 0.5, rng) == g;
        const double expected = std::pow(0.95, 10);
        CHECK(expected == doctest::Approx(0.5987).epsilon(1e-3));
        CHECK(std::abs(static_cast<double>(unchanged) / reps - expected) < 4.0 * std::sqrt(0.25 / reps));
    }
    SUBCASE("added signs follow the activation rate")
    {
        Rng rng(7);
        int pos = 0, total = 0;
        for (int k = 0; k < 2000; ++k) {
            const Grn m = biased_mutation(Grn(10), 1.0, 0.8, rng);
            for (std::size_t i = 0; i < 10; ++i)
                for (std::size_t j = 0; j < 10; ++j)
                    if (m.at(i, j) != 0) {
                        ++total;
                        pos += m.at(i, j) == 1;
                    }
        }
        CHECK(static_cast<double>(pos) / total == doctest::Approx(0.8).epsilon(0.03));
    }
    SUBCASE("rates are validated")
    {
        Rng rng(8);
        CHECK_THROWS(biased_mutation(Grn(10), 1.5, 0.5, rng));
    }
}

TEST_CASE("initial population")
{
    EvolutionConfig c;
    Rng rng(9);
    const auto pop = init_population(c, rng);
    CHECK(pop.size() == 100);
    int pos = 0, total = 0;
    for (const auto& g : pop) {
        CHECK(g.edge_count() == 20);
        for (auto v : g.raw()) {
            total += v != 0;
            pos += v == 1;
        }
    }
    CHECK(static_cast<double>(pos) / total == doctest::Approx(0.5).epsilon(0.1));

    Rng a(10), b(10);
    CHECK(init_population(c, a) == init_population(c, b));

    c.initial_edges = 0;
    for (const auto& g : init_population(c, rng)) CHECK(g.edge_count() == 0);
    c.initial_edges = 101;
    CHECK_THROWS(init_population(c, rng));
}

TEST_CASE("tournament selection")
{
    SUBCASE("a single fitter individual wins exactly when drawn")
    {
        Population p = flat_population(100, 0.5);
        p[37].report.selection_fitness = 0.9;
        Rng rng(11);
        const int reps = 200000;
        int wins = 0;
        for (int k = 0; k < reps; ++k) wins += tournament_select(p, 3, rng) == 37;
        const double expected = 1.0 - std::pow(0.99, 3);
        CHECK(expected == doctest::Approx(0.0297).epsilon(1e-3));
        CHECK(std::abs(static_cast<double>(wins) / reps - expected) < 4.0 * std::sqrt(expected / reps));
    }
    SUBCASE("ties are broken uniformly")
    {
        const Population p = flat_population(4, 0.5);
        Rng rng(12);
        std::vector<int> counts(4);
        const int reps = 40000;
        for (int k = 0; k < reps; ++k) ++counts[tournament_select(p, 3, rng)];
        for (int c : counts) CHECK(static_cast<double>(c) / reps == doctest::Approx(0.25).epsilon(0.05));
    }
    SUBCASE("winners are at least as fit as the population mean")
    {
        Population p = flat_population(50, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) p[i].report.selection_fitness = static_cast<double>(i) / 50.0;
        double pop_mean = 0.0;
        for (const auto& ind : p) pop_mean += ind.report.selection_fitness / 50.0;
        Rng rng(13);
        double winner_mean = 0.0;
        for (int k = 0; k < 10000; ++k) winner_mean += p[tournament_select(p, 3, rng)].report.selection_fitness / 1e4;
        CHECK(winner_mean >= pop_mean);
    }
}

TEST_CASE("proportional selection")
{
    Population p = flat_population(2, 0.25);
    p[1].report.selection_fitness = 0.75;
    Rng rng(14);
    int second = 0;
    const int reps = 40000;
    for (int k = 0; k < reps; ++k) second += proportional_select(p, rng) == 1;
    CHECK(static_cast<double>(second) / reps == doctest::Approx(0.75).epsilon(0.02));

    const Population zero = flat_population(4, 0.0);
    std::vector<int> counts(4);
    for (int k = 0; k < 8000; ++k) ++counts[proportional_select(zero, rng)];
    for (int c : counts) CHECK(c > 1600);

    p[0].report.selection_fitness = -0.1;
    CHECK_THROWS(proportional_select(p, rng));
}

TEST_CASE("scheme names")
{
    CHECK(parse_selection_scheme("tournament") == SelectionScheme::tournament);
    CHECK(parse_selection_scheme("proportional") == SelectionScheme::proportional);
    CHECK(parse_selection_scheme("none") == SelectionScheme::none);
    CHECK(parse_selection_scheme("uniform") == SelectionScheme::none);
    CHECK(parse_copy_policy("uniform") == CopyPolicy::uniform);
    CHECK_THROWS(parse_selection_scheme("roulette-ish"));
}

TEST_CASE("configuration contract")
{
    EvolutionConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.crossover_pairs() == 10);
    c.crossover_rate = 0.0;
    CHECK(c.crossover_pairs() == 0);
    c.mutation_rate = 1.5;
    CHECK_THROWS(c.validate());
    c = EvolutionConfig{};
    c.phase2_start = c.generations;
    CHECK_THROWS(c.validate());
}

TEST_CASE("evolve_generation")
{
    EvolutionConfig c = small_config();
    Rng init(15);
    Evaluator ev(c);
    ev.set_targets(single_target_set());
    Population pop;
    for (auto& g : init_population(c, init)) pop.push_back({g, {}});
    ev.evaluate(pop, init);

    Rng a(16), b(16);
    Evaluator ea(c), eb(c);
    ea.set_targets(single_target_set());
    eb.set_targets(single_target_set());
    const auto na = evolve_generation(pop, c, ea, a);
    const auto nb = evolve_generation(pop, c, eb, b);
    REQUIRE(na.size() == pop.size());
    for (std::size_t i = 0; i < na.size(); ++i) {
        CHECK(na[i].genome == nb[i].genome);
        CHECK(na[i].report.selection_fitness == nb[i].report.selection_fitness);
        CHECK(na[i].report.distributional_fitness ==
              multi_target_fitness(na[i].genome, single_target_set(), ea.binomial()));
    }

    c.crossover_rate = 0.0;
    Rng d(17);
    CHECK(evolve_generation(pop, c, ea, d).size() == pop.size());
}

TEST_CASE("two-phase runs")
{
    SUBCASE("records span every generation and follow the target schedule")
    {
        const EvolutionConfig c = small_config();
        Rng rng(c.seed);
        const auto result = run_two_phase(c, rng);
        REQUIRE(result.records.size() == static_cast<std::size_t>(c.generations));
        const BinomialTable table(10, c.perturbation_rate);
        for (const auto& r : result.records) {
            const TargetSet& ts = r.generation < c.phase2_start ? single_target_set() : two_target_set();
            CHECK(r.best.distributional_fitness == multi_target_fitness(r.best_genome, ts, table));
            CHECK(r.best_edges == r.best_genome.edge_count());
            CHECK(std::isnan(r.best_qn));
        }
        CHECK(result.final_population.size() == static_cast<std::size_t>(c.population_size));
    }
    SUBCASE("one generation past the switch gives exactly one two-target record")
    {
        EvolutionConfig c = small_config();
        c.generations = c.phase2_start + 1;
        Rng rng(1);
        const auto result = run_two_phase(c, rng);
        REQUIRE(result.records.size() == static_cast<std::size_t>(c.phase2_start + 1));
        const auto sched = TargetSchedule::two_phase(c.phase2_start);
        int two_target = 0;
        for (const auto& r : result.records) two_target += sched.at(r.generation).size() == 2;
        CHECK(two_target == 1);
        const BinomialTable table(10, c.perturbation_rate);
        CHECK(result.records.back().best.distributional_fitness ==
              multi_target_fitness(result.records.back().best_genome, two_target_set(), table));
    }
    SUBCASE("replay and cache transparency")
    {
        EvolutionConfig c = small_config();
        Rng a(2), b(2), d(2);
        const auto ra = run_two_phase(c, a);
        const auto rb = run_two_phase(c, b);
        c.use_cache = false;
        const auto rd = run_two_phase(c, d);
        REQUIRE(ra.records.size() == rb.records.size());
        for (std::size_t i = 0; i < ra.records.size(); ++i) {
            CHECK(ra.records[i].best_genome == rb.records[i].best_genome);
            CHECK(ra.records[i].best_genome == rd.records[i].best_genome);
            CHECK(ra.records[i].best.distributional_fitness == rd.records[i].best.distributional_fitness);
            CHECK(ra.records[i].median_distributional == rd.records[i].median_distributional);
            CHECK(ra.records[i].mean_edges == rd.records[i].mean_edges);
        }
    }
    SUBCASE("stochastic mode still reports exact fitness of the best genome")
    {
        EvolutionConfig c = small_config();
        c.mode = EvaluationMode::stochastic;
        c.samples = 50;
        c.generations = 12;
        Rng a(3), b(3);
        const auto ra = run_two_phase(c, a);
        const auto rb = run_two_phase(c, b);
        const BinomialTable table(10, c.perturbation_rate);
        for (std::size_t i = 0; i < ra.records.size(); ++i) {
            const auto& r = ra.records[i];
            CHECK(r.best.mode == EvaluationMode::stochastic);
            CHECK(r.best.selection_fitness == rb.records[i].best.selection_fitness);
            const TargetSet& ts = r.generation < c.phase2_start ? single_target_set() : two_target_set();
            CHECK(r.best.distributional_fitness == multi_target_fitness(r.best_genome, ts, table));
        }
    }
    SUBCASE("q-normalization is recorded when a table is supplied")
    {
        EvolutionConfig c = small_config();
        c.generations = 12;
        const auto part = ModulePartition::halves();
        const auto table = QNormTable::build(part, 200, 5);
        RunOptions opt;
        opt.qnorm = &table;
        opt.partition = part;
        Rng rng(4);
        const auto result = run_two_phase(c, rng, opt);
        for (const auto& r : result.records)
            if (r.best_edges > 0) CHECK(r.best_qn == doctest::Approx(normalized_q(r.best_genome, part, table)));
    }
}

TEST_CASE("summary picks the first individual with maximal selection fitness")
{
    Population p = flat_population(5, 0.2);
    p[1].report.selection_fitness = 0.8;
    p[3].report.selection_fitness = 0.8;
    p[3].genome.set(0, 0, 1);
    p[1].genome.set(0, 1, -1);
    p[1].genome.set(0, 2, -1);
    const auto r = summarize(7, p, {});
    CHECK(r.generation == 7);
    CHECK(r.best_genome == p[1].genome);
    CHECK(r.best_edges == 2);
    CHECK(r.mean_edges == doctest::Approx(3.0 / 5.0));
    CHECK(r.median_distributional == 0.2);
}
