#include <doctest.h>

#include <random>
#include <stdexcept>

#include "grnlab/core.hpp"
#include "oracle.hpp"

using namespace grnlab;

namespace {

oracle::Mat to_mat(const Grn& g)
{
    oracle::Mat m(g.size(), oracle::Vec(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) m[i][j] = g.at(i, j);
    return m;
}

Grn random_grn(std::mt19937_64& rng, std::size_t n = 10)
{
    std::uniform_int_distribution<int> d(-1, 1);
    Grn g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g.set(i, j, d(rng));
    return g;
}

Pattern random_pattern(std::mt19937_64& rng, std::size_t n = 10)
{
    return Pattern::from_bits(static_cast<StateBits>(rng()), n);
}

}  // namespace

TEST_CASE("pattern parsing accepts the table layout and compact forms")
{
    CHECK(target_one().values() == std::vector<int>{1, -1, 1, -1, 1, -1, 1, -1, 1, -1});
    CHECK(target_two().values() == std::vector<int>{1, -1, 1, -1, 1, 1, -1, 1, -1, 1});
    CHECK(Pattern::parse("+-+") == Pattern({1, -1, 1}));
    CHECK(Pattern::parse("1 -1 1") == Pattern({1, -1, 1}));
    CHECK(Pattern::parse("+ \xE2\x88\x92 +") == Pattern({1, -1, 1}));
    CHECK(Pattern::parse(target_two().to_string()) == target_two());
    CHECK_THROWS_AS(Pattern::parse("+x-"), std::invalid_argument);
    CHECK_THROWS_AS(Pattern({1, 0, -1}), std::invalid_argument);
}

TEST_CASE("grn entries are ternary and square")
{
    Grn g(3);
    CHECK_THROWS_AS(g.set(0, 0, 2), std::invalid_argument);
    CHECK_THROWS_AS(g.set(3, 0, 1), std::out_of_range);
    CHECK_THROWS_AS(Grn(std::vector<std::vector<int>>{{1, 0}, {0}}), std::invalid_argument);
    g.set(1, 2, -1);
    CHECK(Grn::decode(g.encode()) == g);
    CHECK(g.edge_count() == 1);
    CHECK(g.regulator_count(1) == 1);
    CHECK(g.regulator_count(2) == 0);
}

TEST_CASE("step")
{
    SUBCASE("zero matrix sends everything to all inactive")
    {
        const Grn g(10);
        CHECK(step(g, target_one()) == Pattern::from_bits(0, 10));
        CHECK(step(g, target_two()) == Pattern::from_bits(0, 10));
    }
    SUBCASE("positive identity is a fixed point map")
    {
        const Grn g = Grn::identity(10);
        CHECK(step(g, target_one()) == target_one());
        CHECK(step(g, target_two()) == target_two());
    }
    SUBCASE("alternating blocks fix target two, every row sum is +-5")
    {
        const Grn g = alternating_block_diagonal();
        const auto s = target_two().values();
        for (std::size_t i = 0; i < 10; ++i) {
            int sum = 0;
            for (std::size_t j = 0; j < 10; ++j) sum += g.at(i, j) * s[j];
            CHECK(std::abs(sum) == 5);
        }
        CHECK(step(g, target_two()) == target_two());
    }
    SUBCASE("dimension mismatch is a contract violation")
    {
        CHECK_THROWS_AS(step(Grn(4), target_one()), std::invalid_argument);
    }
    SUBCASE("agrees with the integer oracle on random networks")
    {
        std::mt19937_64 rng(11);
        for (int k = 0; k < 200; ++k) {
            const Grn g = random_grn(rng);
            const Pattern s = random_pattern(rng);
            CHECK(step(g, s).values() == oracle::step(to_mat(g), s.values()));
            CHECK(step(g, s) == step(g, s));
        }
    }
}

TEST_CASE("regulate")
{
    SUBCASE("a steady target returns immediately")
    {
        const Grn g = alternating_block_diagonal();
        int steps = -1;
        const StepKernel k(g);
        CHECK(regulate_bits(k, target_one().bits(), target_one().bits(), 20, &steps) == target_one().bits());
        CHECK(steps == 0);
        CHECK(regulate(g, target_one(), target_one()) == target_one());
    }
    SUBCASE("passing through an unsteady target is not a recovery")
    {
        // First module holds its state, second module inverts every step:
        // the trajectory alternates between the two targets.
        Grn g(10);
        for (std::size_t i = 0; i < 10; ++i) g.set(i, i, i < 5 ? 1 : -1);
        CHECK(step(g, target_one()) == target_two());
        CHECK(step(g, target_two()) == target_one());
        int steps = -1;
        const auto end = regulate_bits(StepKernel(g), target_one().bits(), target_two().bits(), 20, &steps);
        CHECK(steps == 20);
        CHECK(Pattern::from_bits(end, 10) == target_one());
        CHECK(regulate(g, target_one(), target_two()) == target_one());
        // Twenty steps of a period-two orbit end where they started.
        CHECK(regulate(g, target_one(), target_one()) == target_one());
    }
    SUBCASE("negation map oscillates with period two and never recovers")
    {
        const Grn g = Grn::identity(10, -1);
        const auto e = ElementaryPerturbation(StateBits{1}, 10);
        const Pattern start = apply_perturbation(e, target_one());
        int steps = 0;
        const auto end = regulate_bits(StepKernel(g), start.bits(), target_one().bits(), 20, &steps);
        CHECK(steps == 20);
        // Twenty steps of an involution land back on the start.
        CHECK(Pattern::from_bits(end, 10) == start);
        CHECK(regulate(g, start, target_one()) == start);
    }
    SUBCASE("alternating blocks recover a single flipped gene by majority")
    {
        const Grn g = alternating_block_diagonal();
        for (std::size_t i = 0; i < 10; ++i) {
            const Pattern start = apply_perturbation(ElementaryPerturbation(StateBits{1} << i, 10), target_two());
            CHECK(regulate(g, start, target_two()) == target_two());
        }
    }
    SUBCASE("horizon must be positive")
    {
        CHECK_THROWS_AS(regulate(Grn(10), target_one(), target_two(), 0), std::invalid_argument);
    }
    SUBCASE("matches the oracle; a steady target is always recovered unperturbed")
    {
        std::mt19937_64 rng(12);
        for (int k = 0; k < 200; ++k) {
            const Grn g = random_grn(rng);
            const Pattern s = random_pattern(rng);
            const Pattern t = random_pattern(rng);
            CHECK(regulate(g, s, t).values() == oracle::regulate(to_mat(g), s.values(), t.values()));
            if (step(g, t) == t) CHECK(regulate(g, t, t) == t);
            int steps = 0;
            regulate_bits(StepKernel(g), s.bits(), t.bits(), 20, &steps);
            CHECK(steps <= 20);
        }
    }
}

TEST_CASE("apply_perturbation")
{
    const Pattern s = target_one();
    CHECK(apply_perturbation(ElementaryPerturbation::identity(10), s) == s);
    CHECK(apply_perturbation(ElementaryPerturbation(full_mask(10), 10), s) == s.negated());
    std::vector<int> mask(10, 1);
    mask[0] = -1;
    auto expected = s.values();
    expected[0] = -expected[0];
    CHECK(apply_perturbation(ElementaryPerturbation(mask), s).values() == expected);
    CHECK_THROWS_AS(apply_perturbation(ElementaryPerturbation::identity(9), s), std::invalid_argument);

    std::mt19937_64 rng(13);
    for (int k = 0; k < 100; ++k) {
        const ElementaryPerturbation e(static_cast<StateBits>(rng()), 10);
        const Pattern p = random_pattern(rng);
        CHECK(apply_perturbation(e, apply_perturbation(e, p)) == p);
    }
}

TEST_CASE("perturbation weights")
{
    const ElementaryPerturbation e({-1, 1, 1, 1, 1, -1, -1, 1, -1, 1});
    CHECK(e.weight() == 4);
    CHECK(e.weight_in(0, 5) == 1);
    CHECK(e.weight_in(5, 10) == 3);
}

TEST_CASE("hamming_fraction")
{
    CHECK(hamming_fraction(target_one(), target_one()) == 0.0);
    CHECK(hamming_fraction(target_one(), target_one().negated()) == 1.0);
    CHECK(hamming_fraction(target_one(), target_two()) == 0.5);
    CHECK_THROWS_AS(hamming_fraction(target_one(), Pattern({1, 1})), std::invalid_argument);

    std::mt19937_64 rng(14);
    for (int k = 0; k < 100; ++k) {
        const Pattern a = random_pattern(rng), b = random_pattern(rng), c = random_pattern(rng);
        CHECK(hamming_fraction(a, b) == hamming_fraction(b, a));
        CHECK(hamming_fraction(a, c) <= hamming_fraction(a, b) + hamming_fraction(b, c) + 1e-12);
        CHECK((hamming_fraction(a, b) == 0.0) == (a == b));
    }
}

TEST_CASE("shared-module blocks return every first-module state to the target half")
{
    const oracle::Vec half = {1, -1, 1, -1, 1};
    for (std::size_t v = 0; v < shared_module_variants(); ++v) {
        const auto block = shared_module_block(v);
        CHECK(oracle::step(block, half) == half);
        for (unsigned mask = 0; mask < 32; ++mask) {
            oracle::Vec s(5);
            for (int i = 0; i < 5; ++i) s[i] = mask >> i & 1u ? 1 : -1;
            CHECK(oracle::regulate(block, s, half, 19) == half);
        }
    }
}
