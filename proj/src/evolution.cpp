#include "grnlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grnlab {

const char* to_string(SelectionScheme s)
{
    switch (s) {
        case SelectionScheme::tournament: return "tournament";
        case SelectionScheme::proportional: return "proportional";
        case SelectionScheme::none: return "none";
    }
    return "?";
}

SelectionScheme parse_selection_scheme(const std::string& text)
{
    if (text == "tournament") return SelectionScheme::tournament;
    if (text == "proportional") return SelectionScheme::proportional;
    if (text == "none" || text == "uniform") return SelectionScheme::none;
    throw std::invalid_argument("unknown selection scheme '" + text + "'");
}

const char* to_string(CopyPolicy c) { return c == CopyPolicy::selected ? "selected" : "uniform"; }

CopyPolicy parse_copy_policy(const std::string& text)
{
    if (text == "selected") return CopyPolicy::selected;
    if (text == "uniform") return CopyPolicy::uniform;
    throw std::invalid_argument("unknown copy policy '" + text + "'");
}

namespace {

void check_rate(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

}  // namespace

void EvolutionConfig::validate() const
{
    if (genes < 1 || genes > kMaxGenes) throw std::invalid_argument("genes out of range");
    if (population_size < 2 || population_size % 2 != 0)
        throw std::invalid_argument("population_size must be even and >= 2");
    check_rate(mutation_rate, "mutation_rate");
    check_rate(crossover_rate, "crossover_rate");
    check_rate(activation_rate, "activation_rate");
    check_rate(perturbation_rate, "perturbation_rate");
    if (tournament_size < 1) throw std::invalid_argument("tournament_size must be >= 1");
    if (generations < 1) throw std::invalid_argument("generations must be >= 1");
    if (phase2_start < 0 || phase2_start >= generations)
        throw std::invalid_argument("phase2_start must lie in [0, generations)");
    if (initial_edges < 0 || static_cast<std::size_t>(initial_edges) > genes * genes)
        throw std::invalid_argument("initial_edges exceeds N^2");
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
}

Evaluator::Evaluator(const EvolutionConfig& config)
    : mode_(config.mode),
      use_cache_(config.use_cache),
      stochastic_{config.samples, config.perturbation_rate, config.horizon},
      table_(static_cast<int>(config.genes), config.perturbation_rate)
{
}

void Evaluator::set_targets(const TargetSet& ts)
{
    targets_ = ts;
    cache_.bind(ts);
}

double Evaluator::distributional(const Grn& g)
{
    if (use_cache_) return cached_fitness(g, targets_, table_, cache_, stochastic_.horizon);
    return multi_target_fitness(g, targets_, table_, stochastic_.horizon);
}

FitnessReport Evaluator::evaluate(const Grn& g, Rng& rng)
{
    FitnessReport r;
    r.mode = mode_;
    r.distributional_fitness = distributional(g);
    r.selection_fitness =
        mode_ == EvaluationMode::distributional ? r.distributional_fitness : stochastic_fitness(g, targets_, stochastic_, rng);
    return r;
}

void Evaluator::evaluate(Population& population, Rng& rng)
{
    for (auto& ind : population) ind.report = evaluate(ind.genome, rng);
}

std::vector<Grn> init_population(const EvolutionConfig& config, Rng& rng)
{
    const std::size_t slots = config.genes * config.genes;
    if (config.initial_edges < 0 || static_cast<std::size_t>(config.initial_edges) > slots)
        throw std::invalid_argument("init_population: initial_edges exceeds N^2");
    std::vector<Grn> out;
    out.reserve(static_cast<std::size_t>(config.population_size));
    std::vector<std::size_t> pool(slots);
    for (int k = 0; k < config.population_size; ++k) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        Grn g(config.genes);
        for (std::size_t i = 0; i < static_cast<std::size_t>(config.initial_edges); ++i) {
            std::swap(pool[i], pool[i + uniform_index(rng, slots - i)]);
            const int sign = uniform01(rng) < config.activation_rate ? 1 : -1;
            g.set(pool[i] / config.genes, pool[i] % config.genes, sign);
        }
        out.push_back(std::move(g));
    }
    return out;
}

std::size_t tournament_select(const Population& population, int tournament_size, Rng& rng)
{
    if (population.empty()) throw std::invalid_argument("tournament_select: empty population");
    if (tournament_size < 1) throw std::invalid_argument("tournament_select: size must be >= 1");
    std::size_t winner = 0;
    double best = -std::numeric_limits<double>::infinity();
    int ties = 0;
    for (int k = 0; k < tournament_size; ++k) {
        const std::size_t i = uniform_index(rng, population.size());
        const double f = population[i].report.selection_fitness;
        if (f > best) {
            best = f;
            winner = i;
            ties = 1;
        } else if (f == best) {
            // Reservoir step keeps each tied entrant with equal probability.
            ++ties;
            if (uniform_index(rng, static_cast<std::size_t>(ties)) == 0) winner = i;
        }
    }
    return winner;
}

std::size_t proportional_select(const Population& population, Rng& rng)
{
    if (population.empty()) throw std::invalid_argument("proportional_select: empty population");
    double total = 0.0;
    for (const auto& ind : population) {
        if (ind.report.selection_fitness < 0.0) throw std::invalid_argument("proportional_select: negative fitness");
        total += ind.report.selection_fitness;
    }
    if (!(total > 0.0)) return uniform_index(rng, population.size());
    const double r = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        acc += population[i].report.selection_fitness;
        if (r < acc) return i;
    }
    // Rounding can leave r at the very top of the wheel.
    for (std::size_t i = population.size(); i-- > 0;)
        if (population[i].report.selection_fitness > 0.0) return i;
    return population.size() - 1;
}

std::size_t select_parent(const Population& population, const EvolutionConfig& config, Rng& rng)
{
    switch (config.selection) {
        case SelectionScheme::tournament: return tournament_select(population, config.tournament_size, rng);
        case SelectionScheme::proportional: return proportional_select(population, rng);
        case SelectionScheme::none: break;
    }
    if (population.empty()) throw std::invalid_argument("select_parent: empty population");
    return uniform_index(rng, population.size());
}

std::pair<Grn, Grn> diagonal_crossover(const Grn& a, const Grn& b, std::size_t pivot)
{
    if (a.size() != b.size()) throw std::invalid_argument("diagonal_crossover: parent sizes differ");
    const std::size_t n = a.size();
    if (pivot < 1 || pivot > n) throw std::out_of_range("diagonal_crossover: pivot outside [1, N]");
    const std::size_t split = pivot - 1;
    Grn first = a;
    Grn second = b;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if ((i < split) == (j < split)) continue;  // diagonal block
            first.set(i, j, b.at(i, j));
            second.set(i, j, a.at(i, j));
        }
    return {std::move(first), std::move(second)};
}

double removal_probability(int regulators, std::size_t genes)
{
    const double r = regulators;
    const double n = static_cast<double>(genes);
    return 4.0 * r / (4.0 * r + n - r);
}

Grn biased_mutation(const Grn& g, double mutation_rate, double activation_rate, Rng& rng)
{
    check_rate(mutation_rate, "mutation_rate");
    check_rate(activation_rate, "activation_rate");
    Grn out = g;
    const std::size_t n = g.size();
    std::vector<std::size_t> slots;
    slots.reserve(n);
    for (std::size_t u = 0; u < n; ++u) {
        if (!(uniform01(rng) < mutation_rate)) continue;
        const int regulators = out.regulator_count(u);
        const bool lose = uniform01(rng) < removal_probability(regulators, n);
        slots.clear();
        for (std::size_t j = 0; j < n; ++j)
            if ((out.at(u, j) != 0) == lose) slots.push_back(j);
        if (slots.empty()) continue;  // unreachable: p(u) is 0 at r=0 and 1 at r=N
        const std::size_t col = slots[uniform_index(rng, slots.size())];
        if (lose)
            out.set(u, col, 0);
        else
            out.set(u, col, uniform01(rng) < activation_rate ? 1 : -1);
    }
    return out;
}

Population evolve_generation(const Population& population, const EvolutionConfig& config, Evaluator& evaluator,
                             Rng& rng)
{
    const auto size = population.size();
    if (size == 0) throw std::invalid_argument("evolve_generation: empty population");
    const std::size_t pairs = std::min<std::size_t>(static_cast<std::size_t>(config.crossover_pairs()), size / 2);
    const std::size_t n = population.front().genome.size();

    Population next;
    next.reserve(size);
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto a = select_parent(population, config, rng);
        const auto b = select_parent(population, config, rng);
        const std::size_t pivot = 1 + uniform_index(rng, n);
        auto [c1, c2] = diagonal_crossover(population[a].genome, population[b].genome, pivot);
        next.push_back({std::move(c1), {}});
        next.push_back({std::move(c2), {}});
    }
    while (next.size() < size) {
        const auto i = config.copy_policy == CopyPolicy::selected ? select_parent(population, config, rng)
                                                                  : uniform_index(rng, size);
        next.push_back({population[i].genome, {}});
    }
    for (auto& ind : next) ind.genome = biased_mutation(ind.genome, config.mutation_rate, config.activation_rate, rng);
    evaluator.evaluate(next, rng);
    return next;
}

TargetSchedule TargetSchedule::two_phase(int phase2_start)
{
    return {single_target_set(), two_target_set(), phase2_start};
}

TargetSchedule TargetSchedule::two_target_only() { return {two_target_set(), two_target_set(), 0}; }

GenerationRecord summarize(int generation, const Population& population, const RunOptions& options)
{
    GenerationRecord rec;
    rec.generation = generation;
    std::size_t best = 0;
    double edges = 0.0;
    std::vector<double> dist;
    dist.reserve(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (population[i].report.selection_fitness > population[best].report.selection_fitness) best = i;
        edges += population[i].genome.edge_count();
        dist.push_back(population[i].report.distributional_fitness);
    }
    rec.best = population[best].report;
    rec.best_genome = population[best].genome;
    rec.best_edges = rec.best_genome.edge_count();
    rec.mean_edges = edges / static_cast<double>(population.size());

    std::sort(dist.begin(), dist.end());
    const std::size_t m = dist.size() / 2;
    rec.median_distributional = dist.size() % 2 ? dist[m] : 0.5 * (dist[m - 1] + dist[m]);

    rec.best_qn = std::numeric_limits<double>::quiet_NaN();
    if (options.qnorm) {
        const auto partition = options.partition ? *options.partition : ModulePartition::halves(rec.best_genome.size());
        try {
            rec.best_qn = normalized_q(rec.best_genome, partition, *options.qnorm);
        } catch (const std::domain_error&) {
            // empty network or degenerate normaliser: leave NaN
        }
    }
    return rec;
}

RunResult run_evolution(const EvolutionConfig& config, std::vector<Grn> initial, const TargetSchedule& schedule,
                        Rng& rng, const RunOptions& options)
{
    config.validate();
    if (initial.size() != static_cast<std::size_t>(config.population_size))
        throw std::invalid_argument("run_evolution: initial population size differs from population_size");

    Evaluator evaluator(config);
    evaluator.set_targets(schedule.at(0));
    Population population;
    population.reserve(initial.size());
    for (auto& g : initial) {
        if (g.size() != config.genes) throw std::invalid_argument("run_evolution: genome size differs from genes");
        population.push_back({std::move(g), {}});
    }
    evaluator.evaluate(population, rng);

    RunResult result;
    result.records.reserve(static_cast<std::size_t>(config.generations));
    auto record = [&](int gen) {
        result.records.push_back(summarize(gen, population, options));
        if (options.observer) options.observer(result.records.back(), population);
    };
    record(0);
    for (int gen = 1; gen < config.generations; ++gen) {
        // Selection for this generation acts on fitness under the previous
        // generation's targets; offspring are scored under the new ones.
        if (!(schedule.at(gen) == evaluator.targets())) evaluator.set_targets(schedule.at(gen));
        population = evolve_generation(population, config, evaluator, rng);
        record(gen);
    }
    result.final_population = std::move(population);
    return result;
}

RunResult run_two_phase(const EvolutionConfig& config, Rng& rng, const RunOptions& options)
{
    config.validate();
    return run_evolution(config, init_population(config, rng), TargetSchedule::two_phase(config.phase2_start), rng,
                         options);
}

}  // namespace grnlab
