#pragma once

// Generational evolutionary loop over GRN genomes: random initialisation,
// tournament / proportional selection, diagonal recombination and
// density-biased mutation, under a two-phase target schedule.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "grnlab/core.hpp"
#include "grnlab/fitness.hpp"
#include "grnlab/modularity.hpp"
#include "grnlab/rng.hpp"

namespace grnlab {

enum class SelectionScheme {
    tournament,
    proportional,
    none,  ///< uniform parent choice; selection switched off
};

/// How the non-crossover part of a generation is filled.
enum class CopyPolicy {
    selected,  ///< copies chosen by the configured selection scheme
    uniform,   ///< copies sampled uniformly from the population
};

const char* to_string(SelectionScheme s);
SelectionScheme parse_selection_scheme(const std::string& text);
const char* to_string(CopyPolicy c);
CopyPolicy parse_copy_policy(const std::string& text);

struct EvolutionConfig {
    std::size_t genes = 10;
    int population_size = 100;
    double mutation_rate = 0.2;  ///< per pattern gene (matrix row) per generation
    double crossover_rate = 0.2;
    double activation_rate = 0.5;
    int tournament_size = 3;
    int generations = 2000;
    int phase2_start = 500;
    EvaluationMode mode = EvaluationMode::distributional;
    int initial_edges = 20;
    std::uint64_t seed = 0;
    double perturbation_rate = kDefaultPerturbationRate;
    int samples = kDefaultSamples;  ///< per target, stochastic mode
    int horizon = kDefaultHorizon;
    SelectionScheme selection = SelectionScheme::tournament;
    CopyPolicy copy_policy = CopyPolicy::selected;
    bool use_cache = true;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    int crossover_pairs() const { return static_cast<int>(crossover_rate * population_size) / 2; }
};

struct Individual {
    Grn genome;
    FitnessReport report;
};

using Population = std::vector<Individual>;

/// Scores genomes under one target set. Holds the fitness cache, so one
/// evaluator belongs to one run.
class Evaluator {
public:
    explicit Evaluator(const EvolutionConfig& config);

    void set_targets(const TargetSet& ts);
    const TargetSet& targets() const { return targets_; }

    /// Exact fitness, through the cache when enabled.
    double distributional(const Grn& g);

    FitnessReport evaluate(const Grn& g, Rng& rng);
    void evaluate(Population& population, Rng& rng);

    const FitnessCache& cache() const { return cache_; }
    const BinomialTable& binomial() const { return table_; }

private:
    EvaluationMode mode_;
    bool use_cache_;
    StochasticOptions stochastic_;
    BinomialTable table_;
    TargetSet targets_;
    FitnessCache cache_;
};

/// Population of random genomes with exactly `initial_edges` nonzero entries
/// each, placed uniformly without replacement; each edge is an activation with
/// probability `activation_rate`. Reports are left unset.
std::vector<Grn> init_population(const EvolutionConfig& config, Rng& rng);

/// Index of the winner of a size-`tournament_size` tournament, sampled with
/// replacement; ties broken uniformly at random.
std::size_t tournament_select(const Population& population, int tournament_size, Rng& rng);

/// Roulette-wheel draw on selection fitness; uniform when all fitnesses are 0.
std::size_t proportional_select(const Population& population, Rng& rng);

std::size_t select_parent(const Population& population, const EvolutionConfig& config, Rng& rng);

/// Keeps a's diagonal blocks [0, pivot-1)^2 and [pivot-1, N)^2, takes b's
/// off-diagonal blocks; the second child is the complement. Pivot is 1-based
/// in [1, N]; pivot 1 returns the parents unchanged.
std::pair<Grn, Grn> diagonal_crossover(const Grn& a, const Grn& b, std::size_t pivot);

/// Probability that a mutating gene with `regulators` inputs loses one:
/// 4r / (4r + N - r).
double removal_probability(int regulators, std::size_t genes);

/// Per matrix row: with probability `mutation_rate` the row either loses a
/// uniformly chosen nonzero entry (probability removal_probability) or gains
/// one at a uniformly chosen empty slot.
Grn biased_mutation(const Grn& g, double mutation_rate, double activation_rate, Rng& rng);

/// One generation: crossover pairs, copies, mutation of everything, then
/// evaluation under the evaluator's current targets.
Population evolve_generation(const Population& population, const EvolutionConfig& config, Evaluator& evaluator,
                             Rng& rng);

struct GenerationRecord {
    int generation = 0;
    FitnessReport best;           ///< individual with the highest selection fitness
    double median_distributional = 0.0;
    double best_qn = 0.0;         ///< NaN when undefined for the best genome
    double mean_edges = 0.0;      ///< population mean
    int best_edges = 0;
    Grn best_genome;
};

/// Targets per generation: `early` before `switch_at`, `late` from then on.
struct TargetSchedule {
    TargetSet early;
    TargetSet late;
    int switch_at = 0;

    const TargetSet& at(int generation) const { return generation < switch_at ? early : late; }

    static TargetSchedule two_phase(int phase2_start);
    static TargetSchedule two_target_only();
};

struct RunOptions {
    const QNormTable* qnorm = nullptr;  ///< Q_n is NaN without a table
    std::optional<ModulePartition> partition;
    std::function<void(const GenerationRecord&, const Population&)> observer;
};

struct RunResult {
    std::vector<GenerationRecord> records;
    Population final_population;
};

GenerationRecord summarize(int generation, const Population& population, const RunOptions& options);

/// Records for generations 0 .. generations-1; generation 0 is the initial
/// population. The fitness cache is dropped whenever the target set changes.
RunResult run_evolution(const EvolutionConfig& config, std::vector<Grn> initial, const TargetSchedule& schedule,
                        Rng& rng, const RunOptions& options = {});

/// Random start, single target until phase2_start, both targets afterwards.
RunResult run_two_phase(const EvolutionConfig& config, Rng& rng, const RunOptions& options = {});

}  // namespace grnlab
