#pragma once

// Robustness fitness of a GRN: the exact expectation over the binomial
// perturbation distribution, and the sampled estimator it replaces.

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "grnlab/core.hpp"
#include "grnlab/rng.hpp"

namespace grnlab {

inline constexpr double kDefaultPerturbationRate = 0.15;
inline constexpr int kDefaultSamples = 500;

enum class EvaluationMode { distributional, stochastic };

const char* to_string(EvaluationMode m);
EvaluationMode parse_evaluation_mode(const std::string& text);

/// C(n, k) as a double; exact for the sizes used here.
double binomial_coefficient(int n, int k);

/// P(X = weight) for X ~ Binomial(trials, p).
double binomial_pmf(int weight, int trials, double p);

/// Binomial probabilities of perturbation weights 0..N.
class BinomialTable {
public:
    BinomialTable(int trials, double p);

    int trials() const { return trials_; }
    double rate() const { return p_; }
    double operator[](int weight) const { return pmf_.at(static_cast<std::size_t>(weight)); }
    const std::vector<double>& pmf() const { return pmf_; }

private:
    int trials_;
    double p_;
    std::vector<double> pmf_;
};

/// All masks of the given length and weight, lexicographic by the sorted
/// position set of their -1 entries.
std::vector<ElementaryPerturbation> enumerate_perturbations(int n, int weight);

/// Recovery reward (1 - h)^5 for Hamming fraction h.
double gamma(double h);

/// 1 - exp(-3x).
double f_scale(double x);

/// Ordered set of targets active in the current phase.
class TargetSet {
public:
    TargetSet() = default;
    explicit TargetSet(std::vector<Pattern> targets);

    const std::vector<Pattern>& targets() const { return targets_; }
    std::size_t size() const { return targets_.size(); }
    std::size_t genes() const { return targets_.front().size(); }

    /// Stable identity string, used to key caches.
    std::string key() const;

    friend bool operator==(const TargetSet&, const TargetSet&) = default;

private:
    std::vector<Pattern> targets_;
};

TargetSet single_target_set();
TargetSet two_target_set();

/// Expected gamma reward over the perturbation distribution, before f_scale.
double expected_recovery(const Grn& g, const Pattern& s, const BinomialTable& table, int horizon = kDefaultHorizon);

/// Exact distributional fitness of one target.
double distributional_fitness(const Grn& g, const Pattern& s, const BinomialTable& table,
                              int horizon = kDefaultHorizon);

/// Mean of the per-target distributional fitnesses.
double multi_target_fitness(const Grn& g, const TargetSet& ts, const BinomialTable& table,
                            int horizon = kDefaultHorizon);

struct StochasticOptions {
    int samples = kDefaultSamples;  ///< drawn per target
    double rate = kDefaultPerturbationRate;
    int horizon = kDefaultHorizon;
};

/// Mean gamma over `samples` independently drawn perturbations of s.
double sampled_recovery(const Grn& g, const Pattern& s, const StochasticOptions& opt, Rng& rng);

/// Sampled fitness: per target f(mean sampled gamma), then mean across targets.
double stochastic_fitness(const Grn& g, const TargetSet& ts, const StochasticOptions& opt, Rng& rng);

/// Fitness memo for deterministic evaluations. Keys on the GRN encoding; the
/// whole table is dropped whenever the target set changes or the cap is hit.
class FitnessCache {
public:
    explicit FitnessCache(std::size_t capacity = 1'000'000) : capacity_(capacity) {}

    /// Invalidates everything if `ts` differs from the set the entries belong to.
    void bind(const TargetSet& ts);
    void clear();

    const double* find(const Grn& g) const;
    void insert(const Grn& g, double fitness);

    std::size_t size() const { return entries_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }
    void record_hit() const { ++hits_; }
    void record_miss() const { ++misses_; }

private:
    std::size_t capacity_;
    std::string target_key_;
    std::unordered_map<std::string, double> entries_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
};

/// multi_target_fitness through the cache.
double cached_fitness(const Grn& g, const TargetSet& ts, const BinomialTable& table, FitnessCache& cache,
                      int horizon = kDefaultHorizon);

struct FitnessReport {
    double selection_fitness = 0.0;
    double distributional_fitness = 0.0;
    EvaluationMode mode = EvaluationMode::distributional;
};

// Two-target bound. Geometry: two 5-gene modules, the first shared by both
// targets and the second inverted between them.

/// Weight-n masks whose second-half weight is at least 3.
long unrecoverable_count(int weight);

struct BoundRow {
    int weight;
    long perturbations;
    long recoverable;
    long unrecoverable;
    double probability;
};

struct BoundBreakdown {
    std::vector<BoundRow> rows;
    double expected_reward;  ///< before f_scale
    double fitness;
};

BoundBreakdown upper_bound_breakdown(int n = 10, double p = kDefaultPerturbationRate);
double upper_bound_two_target(int n = 10, double p = kDefaultPerturbationRate);

}  // namespace grnlab
