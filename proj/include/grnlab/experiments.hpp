#pragma once

// Multi-trial treatments and the comparative studies built on them.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grnlab/evolution.hpp"
#include "grnlab/io.hpp"
#include "grnlab/stats.hpp"

namespace grnlab {

enum class ExperimentKind { compare, edge_removal, optimal_start, selection_compare, histogram };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& text);

struct TreatmentSpec {
    EvolutionConfig base;
    int trials = 20;
    ExperimentKind kind = ExperimentKind::compare;
    int threads = 0;  ///< 0: GRNLAB_THREADS, else hardware concurrency
    const QNormTable* qnorm = nullptr;

    void validate() const;
};

/// Worker count: explicit request, else GRNLAB_THREADS, else hardware.
int resolve_threads(int requested);

struct TrialOutcome {
    int trial = 0;
    std::uint64_t seed = 0;
    double fitness = 0.0;            ///< distributional fitness of the final best
    double selection_fitness = 0.0;  ///< what the run itself saw for that individual
    double qn = 0.0;
    int edges = 0;                   ///< of the final best
    double mean_edges = 0.0;         ///< final population mean
    double median_fitness = 0.0;     ///< final population median (distributional)
    Grn best;
    std::vector<GenerationRecord> records;
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

struct GenerationAggregate {
    int generation = 0;
    MeanSd best_fitness;
    MeanSd best_selection_fitness;
    MeanSd median_fitness;
    MeanSd best_qn;  ///< over trials where Q_n is defined
    MeanSd mean_edges;
};

struct TreatmentResult {
    std::vector<TrialOutcome> trials;
    std::vector<GenerationAggregate> per_generation;

    std::vector<double> final_fitnesses() const;
    std::vector<double> final_qns() const;
    std::vector<double> final_mean_edges() const;
    std::vector<double> final_medians() const;
};

MeanSd mean_sd(const std::vector<double>& xs);

/// Runs spec.trials independent runs, trial t seeded with trial_seed(seed, t).
/// `run` builds one trial; outcomes are reduced in trial order.
TreatmentResult run_trials(const TreatmentSpec& spec, const std::function<RunResult(int trial, Rng& rng)>& run);

/// Random-start two-phase evolution.
TreatmentResult run_treatment(const TreatmentSpec& spec);

/// Cross-trial mean and SD per generation. Trials must have equal lengths.
std::vector<GenerationAggregate> aggregate_generations(const std::vector<TrialOutcome>& trials);

struct EvaluationComparison {
    TreatmentResult distributional;
    TreatmentResult stochastic;
    MannWhitneyResult fitness_test;
    MannWhitneyResult qn_test;
};

/// Same spec under both evaluation modes, identical trial seeds.
EvaluationComparison compare_evaluation_modes(const TreatmentSpec& spec);

struct EdgeRemovalOptions {
    StochasticOptions stochastic;
    int repeats = 1;  ///< stochastic evaluations averaged per side
    std::uint64_t seed = 0;
};

struct EdgeRemovalOutcome {
    int inter_edges = 0;
    double before_dist = 0.0;
    double after_dist = 0.0;
    double before_stoch = 0.0;
    double after_stoch = 0.0;
};

struct EdgeRemovalStudy {
    std::vector<EdgeRemovalOutcome> per_grn;
    int improved_distributional = 0;
    int improved_stochastic = 0;
    int total = 0;
};

/// Strips inter-module edges from each GRN and counts fitness improvements
/// under exact comparison and under fresh sampled evaluations of both sides.
EdgeRemovalStudy edge_removal_study(const std::vector<Grn>& grns, const TargetSet& ts, const BinomialTable& table,
                                    const EdgeRemovalOptions& options);

/// Study over the final best GRNs of a completed treatment.
EdgeRemovalStudy edge_removal_study(const TreatmentResult& result, const EvolutionConfig& config,
                                    const EdgeRemovalOptions& options);

/// Fully modular GRNs at the two-target bound: every verified shared-module
/// block with the alternating block, relabelled by target-preserving gene
/// permutations, plus sparser discrete shadows that still reach the bound.
/// Every member is checked against the bound before admission.
std::vector<Grn> optimal_library(std::size_t size, std::uint64_t seed);

struct OptimalStartResult {
    TreatmentResult selection;
    TreatmentResult no_selection;
    MannWhitneyResult edges_test;  ///< final mean edge counts, selection vs none
    double bound = 0.0;
};

/// Both targets from generation 0, population drawn from `library`. The
/// comparator arm picks parents and copies uniformly.
OptimalStartResult optimal_start_study(const TreatmentSpec& spec, const std::vector<Grn>& library);

struct Plateau {
    double level = 0.0;  ///< first (highest) value in the group
    int count = 0;
};

struct OrderedHistogram {
    std::vector<double> sorted;  ///< non-increasing
    std::vector<Plateau> plateaus;
};

/// Descending sort; a plateau collects values within `tolerance` of its top.
OrderedHistogram ordered_fitness_histogram(std::vector<double> fitnesses, double tolerance = 1e-6);
OrderedHistogram ordered_fitness_histogram(const TreatmentResult& result, double tolerance = 1e-6);

struct SelectionComparison {
    TreatmentResult tournament;
    TreatmentResult proportional;
    MannWhitneyResult median_test;  ///< final-generation population medians
};

/// Crossover off; tournament vs proportional with identical trial seeds.
SelectionComparison selection_scheme_comparison(const TreatmentSpec& spec);

// Output tables. Column order is part of the file format.

/// trial,generation,best_fit_dist,best_fit_sel,median_fit_dist,best_qn,mean_edges
CsvTable generations_table(const TreatmentResult& result);
/// trial,fitness,qn,edges
CsvTable final_table(const TreatmentResult& result);
/// trial,grn (row-major '-','0','+' encoding of each final best)
CsvTable best_grn_table(const TreatmentResult& result);

}  // namespace grnlab
