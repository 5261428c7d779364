#include "grnlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

namespace grnlab {

const char* to_string(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::compare: return "compare";
        case ExperimentKind::edge_removal: return "edge_removal";
        case ExperimentKind::optimal_start: return "optimal_start";
        case ExperimentKind::selection_compare: return "selection_compare";
        case ExperimentKind::histogram: return "histogram";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& text)
{
    if (text == "compare") return ExperimentKind::compare;
    if (text == "edge_removal") return ExperimentKind::edge_removal;
    if (text == "optimal_start") return ExperimentKind::optimal_start;
    if (text == "selection_compare") return ExperimentKind::selection_compare;
    if (text == "histogram") return ExperimentKind::histogram;
    throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

void TreatmentSpec::validate() const
{
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    base.validate();
}

int resolve_threads(int requested)
{
    if (requested < 0) throw std::invalid_argument("thread count must be >= 0");
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRNLAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MeanSd mean_sd(const std::vector<double>& xs)
{
    std::vector<double> finite;
    for (double x : xs)
        if (!std::isnan(x)) finite.push_back(x);
    if (finite.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    return {mean(finite), stddev(finite)};
}

std::vector<double> TreatmentResult::final_fitnesses() const
{
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.fitness);
    return v;
}

std::vector<double> TreatmentResult::final_qns() const
{
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.qn);
    return v;
}

std::vector<double> TreatmentResult::final_mean_edges() const
{
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.mean_edges);
    return v;
}

std::vector<double> TreatmentResult::final_medians() const
{
    std::vector<double> v;
    for (const auto& t : trials) v.push_back(t.median_fitness);
    return v;
}

std::vector<GenerationAggregate> aggregate_generations(const std::vector<TrialOutcome>& trials)
{
    std::vector<GenerationAggregate> out;
    if (trials.empty()) return out;
    const std::size_t gens = trials.front().records.size();
    for (const auto& t : trials)
        if (t.records.size() != gens) throw std::invalid_argument("aggregate_generations: trial lengths differ");
    out.reserve(gens);
    std::vector<double> best, sel, med, qn, edges;
    for (std::size_t g = 0; g < gens; ++g) {
        best.clear(), sel.clear(), med.clear(), qn.clear(), edges.clear();
        for (const auto& t : trials) {
            const auto& r = t.records[g];
            best.push_back(r.best.distributional_fitness);
            sel.push_back(r.best.selection_fitness);
            med.push_back(r.median_distributional);
            qn.push_back(r.best_qn);
            edges.push_back(r.mean_edges);
        }
        out.push_back({trials.front().records[g].generation, mean_sd(best), mean_sd(sel), mean_sd(med), mean_sd(qn),
                       mean_sd(edges)});
    }
    return out;
}

TreatmentResult run_trials(const TreatmentSpec& spec, const std::function<RunResult(int trial, Rng& rng)>& run)
{
    spec.validate();
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(spec.trials));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= spec.trials) return;
            try {
                TrialOutcome o;
                o.trial = t;
                o.seed = trial_seed(spec.base.seed, static_cast<std::uint64_t>(t));
                Rng rng(o.seed);
                RunResult r = run(t, rng);
                const auto& last = r.records.back();
                o.fitness = last.best.distributional_fitness;
                o.selection_fitness = last.best.selection_fitness;
                o.qn = last.best_qn;
                o.edges = last.best_edges;
                o.mean_edges = last.mean_edges;
                o.median_fitness = last.median_distributional;
                o.best = last.best_genome;
                o.records = std::move(r.records);
                outcomes[static_cast<std::size_t>(t)] = std::move(o);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = spec.trials;
            }
        }
    };

    const int threads = std::min(resolve_threads(spec.threads), spec.trials);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    TreatmentResult result;
    result.trials = std::move(outcomes);
    result.per_generation = aggregate_generations(result.trials);
    return result;
}

namespace {

RunOptions options_for(const TreatmentSpec& spec)
{
    RunOptions opt;
    opt.qnorm = spec.qnorm;
    opt.partition = ModulePartition::halves(spec.base.genes);
    return opt;
}

}  // namespace

TreatmentResult run_treatment(const TreatmentSpec& spec)
{
    const auto opt = options_for(spec);
    return run_trials(spec, [&](int, Rng& rng) { return run_two_phase(spec.base, rng, opt); });
}

EvaluationComparison compare_evaluation_modes(const TreatmentSpec& spec)
{
    EvaluationComparison out;
    TreatmentSpec arm = spec;
    arm.base.mode = EvaluationMode::distributional;
    out.distributional = run_treatment(arm);
    arm.base.mode = EvaluationMode::stochastic;
    out.stochastic = run_treatment(arm);
    out.fitness_test = mann_whitney_u(out.distributional.final_fitnesses(), out.stochastic.final_fitnesses());

    std::vector<double> qd, qs;
    for (double q : out.distributional.final_qns())
        if (!std::isnan(q)) qd.push_back(q);
    for (double q : out.stochastic.final_qns())
        if (!std::isnan(q)) qs.push_back(q);
    out.qn_test = (qd.empty() || qs.empty()) ? MannWhitneyResult{0.0, 0.0, 1.0} : mann_whitney_u(qd, qs);
    return out;
}

EdgeRemovalStudy edge_removal_study(const std::vector<Grn>& grns, const TargetSet& ts, const BinomialTable& table,
                                    const EdgeRemovalOptions& options)
{
    if (options.repeats < 1) throw std::invalid_argument("edge_removal_study: repeats must be >= 1");
    EdgeRemovalStudy study;
    Rng rng(options.seed);
    auto sampled = [&](const Grn& g) {
        double sum = 0.0;
        for (int r = 0; r < options.repeats; ++r) sum += stochastic_fitness(g, ts, options.stochastic, rng);
        return sum / options.repeats;
    };
    for (const auto& g : grns) {
        const auto partition = ModulePartition::halves(g.size());
        const Grn stripped = remove_inter_module_edges(g, partition);
        EdgeRemovalOutcome o;
        o.inter_edges = inter_module_edge_count(g, partition);
        o.before_dist = multi_target_fitness(g, ts, table, options.stochastic.horizon);
        o.after_dist = stripped == g ? o.before_dist : multi_target_fitness(stripped, ts, table, options.stochastic.horizon);
        o.before_stoch = sampled(g);
        o.after_stoch = sampled(stripped);
        study.improved_distributional += o.after_dist > o.before_dist;
        study.improved_stochastic += o.after_stoch > o.before_stoch;
        study.per_grn.push_back(o);
    }
    study.total = static_cast<int>(grns.size());
    return study;
}

EdgeRemovalStudy edge_removal_study(const TreatmentResult& result, const EvolutionConfig& config,
                                    const EdgeRemovalOptions& options)
{
    std::vector<Grn> grns;
    for (const auto& t : result.trials) grns.push_back(t.best);
    return edge_removal_study(grns, two_target_set(), BinomialTable(static_cast<int>(config.genes), config.perturbation_rate),
                              options);
}

namespace {

// Gene relabellings that leave both targets unchanged: positions sharing a
// value in both targets can be exchanged.
std::vector<std::size_t> random_target_preserving_permutation(Rng& rng)
{
    const std::vector<std::vector<std::size_t>> classes = {{0, 2, 4}, {1, 3}, {5, 7, 9}, {6, 8}};
    std::vector<std::size_t> perm(10);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (const auto& cls : classes) {
        auto shuffled = cls;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        for (std::size_t k = 0; k < cls.size(); ++k) perm[cls[k]] = shuffled[k];
    }
    return perm;
}

Grn relabel(const Grn& g, const std::vector<std::size_t>& perm)
{
    Grn out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) out.set(perm[i], perm[j], g.at(i, j));
    return out;
}

}  // namespace

std::vector<Grn> optimal_library(std::size_t size, std::uint64_t seed)
{
    if (size == 0) throw std::invalid_argument("optimal_library: size must be >= 1");
    const BinomialTable table(10, kDefaultPerturbationRate);
    const TargetSet ts = two_target_set();
    const double bound = upper_bound_two_target();
    const auto at_bound = [&](const Grn& g) { return std::abs(multi_target_fitness(g, ts, table) - bound) < 1e-9; };

    Rng rng(seed);
    std::vector<Grn> library;
    std::set<std::string> seen;
    auto admit = [&](const Grn& g) {
        if (library.size() < size && seen.insert(g.encode()).second && at_bound(g)) library.push_back(g);
    };
    for (std::size_t v = 0; v < shared_module_variants(); ++v) admit(optimal_two_target_grn(v));

    for (std::size_t attempt = 0; library.size() < size && attempt < 50 * size; ++attempt) {
        const Grn base = optimal_two_target_grn(uniform_index(rng, shared_module_variants()));
        Grn g = relabel(base, random_target_preserving_permutation(rng));
        if (attempt % 2 == 1) {
            // Discrete shadow: drop edges in random order while the bound holds.
            std::vector<std::size_t> slots;
            for (std::size_t k = 0; k < 100; ++k)
                if (g.raw()[k] != 0) slots.push_back(k);
            std::shuffle(slots.begin(), slots.end(), rng);
            const std::size_t tries = 1 + uniform_index(rng, slots.size());
            for (std::size_t k = 0; k < tries; ++k) {
                Grn trial = g;
                trial.set(slots[k] / 10, slots[k] % 10, 0);
                if (at_bound(trial)) g = trial;
            }
        }
        admit(g);
    }
    if (library.empty()) throw std::logic_error("optimal_library: no GRN reached the bound");
    return library;
}

OptimalStartResult optimal_start_study(const TreatmentSpec& spec, const std::vector<Grn>& library)
{
    if (library.empty()) throw std::invalid_argument("optimal_start_study: empty optimum library");
    if (spec.base.genes != 10) throw std::invalid_argument("optimal_start_study: library is defined for 10 genes");
    const auto opt = options_for(spec);
    auto arm = [&](SelectionScheme scheme) {
        TreatmentSpec s = spec;
        s.base.selection = scheme;
        return run_trials(s, [&](int, Rng& rng) {
            std::vector<Grn> initial;
            for (int i = 0; i < s.base.population_size; ++i) initial.push_back(library[uniform_index(rng, library.size())]);
            return run_evolution(s.base, std::move(initial), TargetSchedule::two_target_only(), rng, opt);
        });
    };
    OptimalStartResult out;
    out.bound = upper_bound_two_target();
    out.selection = arm(spec.base.selection == SelectionScheme::none ? SelectionScheme::tournament : spec.base.selection);
    out.no_selection = arm(SelectionScheme::none);
    out.edges_test = mann_whitney_u(out.selection.final_mean_edges(), out.no_selection.final_mean_edges());
    return out;
}

OrderedHistogram ordered_fitness_histogram(std::vector<double> fitnesses, double tolerance)
{
    OrderedHistogram h;
    std::sort(fitnesses.begin(), fitnesses.end(), std::greater<>());
    h.sorted = std::move(fitnesses);
    for (double v : h.sorted) {
        if (h.plateaus.empty() || h.plateaus.back().level - v > tolerance)
            h.plateaus.push_back({v, 1});
        else
            ++h.plateaus.back().count;
    }
    return h;
}

OrderedHistogram ordered_fitness_histogram(const TreatmentResult& result, double tolerance)
{
    return ordered_fitness_histogram(result.final_fitnesses(), tolerance);
}

SelectionComparison selection_scheme_comparison(const TreatmentSpec& spec)
{
    TreatmentSpec s = spec;
    s.base.crossover_rate = 0.0;
    SelectionComparison out;
    s.base.selection = SelectionScheme::tournament;
    out.tournament = run_treatment(s);
    s.base.selection = SelectionScheme::proportional;
    out.proportional = run_treatment(s);
    out.median_test = mann_whitney_u(out.tournament.final_medians(), out.proportional.final_medians());
    return out;
}

CsvTable generations_table(const TreatmentResult& result)
{
    CsvTable t;
    t.header = {"trial", "generation", "best_fit_dist", "best_fit_sel", "median_fit_dist", "best_qn", "mean_edges"};
    for (const auto& trial : result.trials)
        for (const auto& r : trial.records)
            t.rows.push_back({std::to_string(trial.trial), std::to_string(r.generation),
                              format_double(r.best.distributional_fitness), format_double(r.best.selection_fitness),
                              format_double(r.median_distributional), format_double(r.best_qn),
                              format_double(r.mean_edges)});
    return t;
}

CsvTable final_table(const TreatmentResult& result)
{
    CsvTable t;
    t.header = {"trial", "fitness", "qn", "edges"};
    for (const auto& trial : result.trials)
        t.rows.push_back({std::to_string(trial.trial), format_double(trial.fitness), format_double(trial.qn),
                          std::to_string(trial.edges)});
    return t;
}

CsvTable best_grn_table(const TreatmentResult& result)
{
    CsvTable t;
    t.header = {"trial", "grn"};
    for (const auto& trial : result.trials) t.rows.push_back({std::to_string(trial.trial), trial.best.encode()});
    return t;
}

}  // namespace grnlab
