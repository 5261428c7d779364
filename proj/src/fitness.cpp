#include "grnlab/fitness.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace grnlab {

const char* to_string(EvaluationMode m) { return m == EvaluationMode::distributional ? "dist" : "stoch"; }

EvaluationMode parse_evaluation_mode(const std::string& text)
{
    if (text == "dist" || text == "distributional") return EvaluationMode::distributional;
    if (text == "stoch" || text == "stochastic") return EvaluationMode::stochastic;
    throw std::invalid_argument("unknown evaluation mode '" + text + "' (expected dist or stoch)");
}

double binomial_coefficient(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return std::round(c);
}

double binomial_pmf(int weight, int trials, double p)
{
    if (trials < 0 || weight < 0 || weight > trials)
        throw std::out_of_range("binomial_pmf: weight " + std::to_string(weight) + " outside [0, " +
                                std::to_string(trials) + "]");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_pmf: rate outside [0, 1]");
    return binomial_coefficient(trials, weight) * std::pow(p, weight) * std::pow(1.0 - p, trials - weight);
}

BinomialTable::BinomialTable(int trials, double p) : trials_(trials), p_(p)
{
    if (trials < 1) throw std::invalid_argument("BinomialTable: trials must be >= 1");
    pmf_.reserve(static_cast<std::size_t>(trials) + 1);
    for (int k = 0; k <= trials; ++k) pmf_.push_back(binomial_pmf(k, trials, p));
}

namespace {

void next_combination_order(int n, int weight, std::vector<int>& idx, std::vector<ElementaryPerturbation>& out)
{
    // idx holds a strictly increasing position set; advance lexicographically.
    for (;;) {
        StateBits flips = 0;
        for (int i : idx) flips |= StateBits{1} << i;
        out.emplace_back(flips, static_cast<std::size_t>(n));
        int k = weight - 1;
        while (k >= 0 && idx[k] == n - weight + k) --k;
        if (k < 0) return;
        ++idx[k];
        for (int j = k + 1; j < weight; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Flip masks of every weight in enumeration order, cached per length.
const std::vector<std::vector<StateBits>>& perturbation_order(int n)
{
    static std::mutex mu;
    static std::map<int, std::vector<std::vector<StateBits>>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) {
        std::vector<std::vector<StateBits>> by_weight;
        for (int w = 0; w <= n; ++w) {
            std::vector<StateBits> masks;
            for (const auto& e : enumerate_perturbations(n, w)) masks.push_back(e.flips());
            by_weight.push_back(std::move(masks));
        }
        it = cache.emplace(n, std::move(by_weight)).first;
    }
    return it->second;
}

constexpr std::size_t kMaxExhaustiveGenes = 16;

std::vector<StateBits> step_table(const Grn& g)
{
    if (g.size() > kMaxExhaustiveGenes)
        throw std::invalid_argument("distributional evaluation limited to " + std::to_string(kMaxExhaustiveGenes) +
                                    " genes");
    // Visit states in Gray-code order so consecutive states differ in one
    // gene; each row's weighted input sum then changes by +-2 W[i][j].
    const std::size_t n = g.size();
    std::vector<StateBits> table(std::size_t{1} << n);
    int sums[kMaxExhaustiveGenes];
    for (std::size_t i = 0; i < n; ++i) {
        sums[i] = 0;
        for (std::size_t j = 0; j < n; ++j) sums[i] -= g.at(i, j);  // all genes at -1
    }
    for (std::size_t k = 0; k < table.size(); ++k) {
        const std::size_t gray = k ^ (k >> 1);
        StateBits next = 0;
        for (std::size_t i = 0; i < n; ++i) next |= static_cast<StateBits>(sums[i] > 0) << i;
        table[gray] = next;
        if (k + 1 == table.size()) break;
        const auto j = static_cast<std::size_t>(std::countr_zero(k + 1));
        const int dir = (gray >> j & 1u) ? -2 : 2;  // gene j turns off or on
        for (std::size_t i = 0; i < n; ++i) sums[i] += dir * g.at(i, j);
    }
    return table;
}

std::vector<double> gamma_by_distance(std::size_t n)
{
    std::vector<double> out(n + 1);
    for (std::size_t d = 0; d <= n; ++d) out[d] = gamma(static_cast<double>(d) / static_cast<double>(n));
    return out;
}

/// One GRN's dynamics over the whole state space: the single-step map and
/// the map after exactly `horizon` steps.
struct Dynamics {
    std::vector<StateBits> step;
    std::vector<StateBits> after_horizon;

    Dynamics(const Grn& g, int horizon) : step(step_table(g))
    {
        const std::size_t states = step.size();
        // Binary powering of the step map.
        after_horizon.resize(states);
        for (std::size_t s = 0; s < states; ++s) after_horizon[s] = static_cast<StateBits>(s);
        std::vector<StateBits> power = step, scratch(states);
        for (int e = horizon; e > 0; e >>= 1) {
            if (e & 1)
                for (std::size_t s = 0; s < states; ++s) after_horizon[s] = power[after_horizon[s]];
            if (e > 1) {
                for (std::size_t s = 0; s < states; ++s) scratch[s] = power[power[s]];
                power.swap(scratch);
            }
        }
    }
};

double expected_recovery_from(const Dynamics& dyn, std::size_t n, StateBits target, const BinomialTable& pmf)
{
    // A start recovers iff it settles on the target as a steady state within
    // the horizon, which is exactly when the state after `horizon` steps is
    // the target. Transient visits to an unstable target do not count.
    const auto& order = perturbation_order(static_cast<int>(n));
    const auto reward = gamma_by_distance(n);
    double total = 0.0;
    for (std::size_t w = 0; w <= n; ++w) {
        double sum = 0.0;
        for (StateBits e : order[w]) sum += reward[std::popcount(dyn.after_horizon[target ^ e] ^ target)];
        total += pmf[static_cast<int>(w)] * (sum / static_cast<double>(order[w].size()));
    }
    return total;
}

void check_table(const Grn& g, const Pattern& s, const BinomialTable& table)
{
    if (g.size() != s.size()) throw std::invalid_argument("fitness: GRN and target dimensions differ");
    if (static_cast<std::size_t>(table.trials()) != s.size())
        throw std::invalid_argument("fitness: binomial table size differs from pattern length");
}

}  // namespace

std::vector<ElementaryPerturbation> enumerate_perturbations(int n, int weight)
{
    if (n < 1 || n > static_cast<int>(kMaxGenes)) throw std::invalid_argument("enumerate_perturbations: bad length");
    if (weight < 0 || weight > n)
        throw std::out_of_range("enumerate_perturbations: weight " + std::to_string(weight) + " outside [0, " +
                                std::to_string(n) + "]");
    std::vector<ElementaryPerturbation> out;
    out.reserve(static_cast<std::size_t>(binomial_coefficient(n, weight)));
    if (weight == 0) {
        out.emplace_back(0, static_cast<std::size_t>(n));
        return out;
    }
    std::vector<int> idx(static_cast<std::size_t>(weight));
    for (int i = 0; i < weight; ++i) idx[i] = i;
    next_combination_order(n, weight, idx, out);
    return out;
}

double gamma(double h)
{
    if (!(h >= 0.0 && h <= 1.0)) throw std::domain_error("gamma: argument outside [0, 1]");
    const double r = 1.0 - h;
    return r * r * r * r * r;
}

double f_scale(double x) { return 1.0 - std::exp(-3.0 * x); }

TargetSet::TargetSet(std::vector<Pattern> targets) : targets_(std::move(targets))
{
    if (targets_.empty()) throw std::invalid_argument("TargetSet: at least one target required");
    for (const auto& t : targets_)
        if (t.size() != targets_.front().size()) throw std::invalid_argument("TargetSet: targets differ in length");
}

std::string TargetSet::key() const
{
    std::string k;
    for (const auto& t : targets_) k += std::to_string(t.size()) + ":" + std::to_string(t.bits()) + ";";
    return k;
}

TargetSet single_target_set() { return TargetSet({target_one()}); }

TargetSet two_target_set() { return TargetSet({target_one(), target_two()}); }

double expected_recovery(const Grn& g, const Pattern& s, const BinomialTable& table, int horizon)
{
    check_table(g, s, table);
    if (horizon < 1) throw std::invalid_argument("fitness: horizon must be >= 1");
    return expected_recovery_from(Dynamics(g, horizon), s.size(), s.bits(), table);
}

double distributional_fitness(const Grn& g, const Pattern& s, const BinomialTable& table, int horizon)
{
    return f_scale(expected_recovery(g, s, table, horizon));
}

double multi_target_fitness(const Grn& g, const TargetSet& ts, const BinomialTable& table, int horizon)
{
    if (ts.size() == 0) throw std::invalid_argument("multi_target_fitness: empty target set");
    for (const auto& s : ts.targets()) check_table(g, s, table);
    if (horizon < 1) throw std::invalid_argument("fitness: horizon must be >= 1");
    const Dynamics dyn(g, horizon);
    double sum = 0.0;
    for (const auto& s : ts.targets())
        sum += f_scale(expected_recovery_from(dyn, s.size(), s.bits(), table));
    return sum / static_cast<double>(ts.size());
}

namespace {

// Draws `samples` perturbations of `s` and averages the reward of the
// regulated end states. `next` is the single-step map.
template <typename Step>
double sampled_recovery_with(Step&& next, const Pattern& s, const StochasticOptions& opt, Rng& rng)
{
    const std::size_t n = s.size();
    const auto reward = gamma_by_distance(n);
    const StateBits target = s.bits();
    // Each gene flips independently with probability `rate`. For small
    // networks draw the flip count from its binomial law and then a
    // uniformly chosen mask of that weight: same distribution, two draws
    // instead of n.
    const bool by_weight = n <= kMaxExhaustiveGenes;
    std::discrete_distribution<int> weight_of;
    const std::vector<std::vector<StateBits>>* masks = nullptr;
    if (by_weight) {
        const BinomialTable table(static_cast<int>(n), opt.rate);
        weight_of = std::discrete_distribution<int>(table.pmf().begin(), table.pmf().end());
        masks = &perturbation_order(static_cast<int>(n));
    }
    // Early exit on reaching the target is only valid when the target is a
    // steady state; otherwise the trajectory runs the full horizon.
    const bool stable = next(target) == target;
    std::bernoulli_distribution flip(opt.rate);
    double sum = 0.0;
    for (int i = 0; i < opt.samples; ++i) {
        StateBits e = 0;
        if (by_weight) {
            const auto& pool = (*masks)[static_cast<std::size_t>(weight_of(rng))];
            e = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        } else {
            for (std::size_t j = 0; j < n; ++j)
                if (flip(rng)) e |= StateBits{1} << j;
        }
        StateBits x = target ^ e;
        for (int t = 0; t < opt.horizon && !(stable && x == target); ++t) x = next(x);
        sum += reward[std::popcount(x ^ target)];
    }
    return sum / opt.samples;
}

void check_sampling(const Grn& g, const Pattern& s, const StochasticOptions& opt)
{
    if (opt.samples < 1) throw std::invalid_argument("stochastic_fitness: samples must be >= 1");
    if (opt.horizon < 1) throw std::invalid_argument("stochastic_fitness: horizon must be >= 1");
    if (g.size() != s.size()) throw std::invalid_argument("stochastic_fitness: dimension mismatch");
}

}  // namespace

double sampled_recovery(const Grn& g, const Pattern& s, const StochasticOptions& opt, Rng& rng)
{
    check_sampling(g, s, opt);
    const StepKernel k(g);
    return sampled_recovery_with([&k](StateBits x) { return k.step(x); }, s, opt, rng);
}

double stochastic_fitness(const Grn& g, const TargetSet& ts, const StochasticOptions& opt, Rng& rng)
{
    for (const auto& s : ts.targets()) check_sampling(g, s, opt);
    double sum = 0.0;
    if (g.size() <= kMaxExhaustiveGenes) {
        // Small networks: one lookup table serves every sample of every target.
        const auto table = step_table(g);
        for (const auto& s : ts.targets())
            sum += f_scale(sampled_recovery_with([&table](StateBits x) { return table[x]; }, s, opt, rng));
    } else {
        for (const auto& s : ts.targets()) sum += f_scale(sampled_recovery(g, s, opt, rng));
    }
    return sum / static_cast<double>(ts.size());
}

void FitnessCache::bind(const TargetSet& ts)
{
    auto key = ts.key();
    if (key != target_key_) {
        entries_.clear();
        target_key_ = std::move(key);
    }
}

void FitnessCache::clear()
{
    entries_.clear();
    target_key_.clear();
}

const double* FitnessCache::find(const Grn& g) const
{
    auto it = entries_.find(g.encode());
    return it == entries_.end() ? nullptr : &it->second;
}

void FitnessCache::insert(const Grn& g, double fitness)
{
    if (entries_.size() >= capacity_) entries_.clear();
    entries_.emplace(g.encode(), fitness);
}

double cached_fitness(const Grn& g, const TargetSet& ts, const BinomialTable& table, FitnessCache& cache, int horizon)
{
    cache.bind(ts);
    if (const double* hit = cache.find(g)) {
        cache.record_hit();
        return *hit;
    }
    cache.record_miss();
    const double f = multi_target_fitness(g, ts, table, horizon);
    cache.insert(g, f);
    return f;
}

long unrecoverable_count(int weight)
{
    if (weight < 0 || weight > 10) throw std::out_of_range("unrecoverable_count: weight outside [0, 10]");
    long count = 0;
    for (int second = 3; second <= 5; ++second) {
        const int first = weight - second;
        if (first < 0 || first > 5) continue;
        count += static_cast<long>(binomial_coefficient(5, first) * binomial_coefficient(5, second));
    }
    return count;
}

BoundBreakdown upper_bound_breakdown(int n, double p)
{
    // Modules of n/2 genes; an odd module size keeps the majority unambiguous.
    if (n < 2 || n % 2 != 0 || (n / 2) % 2 == 0 || n > static_cast<int>(kMaxGenes))
        throw std::invalid_argument("upper bound needs two modules of odd size");
    const int half = n / 2;
    const int threshold = half / 2 + 1;  // second-half flips that tip the majority
    const BinomialTable table(n, p);
    const double unrecovered_reward = gamma(static_cast<double>(half) / n);

    BoundBreakdown out{};
    out.expected_reward = 0.0;
    for (int w = 0; w <= n; ++w) {
        long unrec = 0;
        for (int second = threshold; second <= half; ++second) {
            const int first = w - second;
            if (first < 0 || first > half) continue;
            unrec += static_cast<long>(binomial_coefficient(half, first) * binomial_coefficient(half, second));
        }
        const long total = static_cast<long>(binomial_coefficient(n, w));
        out.rows.push_back({w, total, total - unrec, unrec, table[w]});
        const double mean_reward =
            (static_cast<double>(total - unrec) + static_cast<double>(unrec) * unrecovered_reward) / total;
        out.expected_reward += table[w] * mean_reward;
    }
    out.fitness = f_scale(out.expected_reward);
    return out;
}

double upper_bound_two_target(int n, double p) { return upper_bound_breakdown(n, p).fitness; }

}  // namespace grnlab
