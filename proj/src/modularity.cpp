#include "grnlab/modularity.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grnlab/io.hpp"

namespace grnlab {

ModulePartition::ModulePartition(std::vector<int> module_of_gene) : module_(std::move(module_of_gene))
{
    if (module_.empty()) throw std::invalid_argument("ModulePartition: no genes");
    const int k = *std::max_element(module_.begin(), module_.end()) + 1;
    std::vector<int> sizes(static_cast<std::size_t>(std::max(k, 0)), 0);
    for (int m : module_) {
        if (m < 0) throw std::invalid_argument("ModulePartition: negative module id");
        ++sizes[static_cast<std::size_t>(m)];
    }
    for (int s : sizes)
        if (s == 0) throw std::invalid_argument("ModulePartition: empty module");
    modules_ = k;
}

ModulePartition ModulePartition::halves(std::size_t n)
{
    std::vector<int> m(n);
    for (std::size_t i = 0; i < n; ++i) m[i] = i < n / 2 ? 0 : 1;
    return ModulePartition(std::move(m));
}

namespace {

void check_partition(std::size_t n, const ModulePartition& p)
{
    if (p.genes() != n) throw std::invalid_argument("partition size differs from GRN size");
}

}  // namespace

double q_score_slots(const std::vector<int>& slots, std::size_t n, const ModulePartition& partition)
{
    check_partition(n, partition);
    const auto L = static_cast<double>(slots.size());
    if (slots.empty()) throw std::domain_error("Q is undefined for a network without edges");
    std::vector<double> within(static_cast<std::size_t>(partition.modules()), 0.0);
    std::vector<double> degree(within.size(), 0.0);
    for (int slot : slots) {
        const auto row = static_cast<std::size_t>(slot) / n;
        const auto col = static_cast<std::size_t>(slot) % n;
        const auto mr = static_cast<std::size_t>(partition.module_of(row));
        const auto mc = static_cast<std::size_t>(partition.module_of(col));
        degree[mr] += 1.0;
        degree[mc] += 1.0;
        if (mr == mc) within[mr] += 1.0;
    }
    double q = 0.0;
    for (std::size_t i = 0; i < within.size(); ++i) {
        const double share = degree[i] / (2.0 * L);
        q += within[i] / L - share * share;
    }
    return q;
}

double q_score(const Grn& g, const ModulePartition& partition)
{
    std::vector<int> slots;
    for (std::size_t k = 0; k < g.raw().size(); ++k)
        if (g.raw()[k] != 0) slots.push_back(static_cast<int>(k));
    return q_score_slots(slots, g.size(), partition);
}

QNormEntry QNormTable::sample_entry(const ModulePartition& partition, int edges, int samples, std::uint64_t seed)
{
    const std::size_t n = partition.genes();
    const int slots = static_cast<int>(n * n);
    if (edges < 1 || edges > slots) throw std::out_of_range("QNormTable: edge count out of range");
    if (samples < 1) throw std::invalid_argument("QNormTable: samples must be >= 1");

    Rng rng(seed);
    std::vector<int> pool(static_cast<std::size_t>(slots));
    std::vector<int> chosen(static_cast<std::size_t>(edges));
    double sum = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: the first `edges` slots form a uniform subset.
        for (int i = 0; i < edges; ++i) {
            const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::size_t>(slots - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            chosen[static_cast<std::size_t>(i)] = pool[static_cast<std::size_t>(i)];
        }
        const double q = q_score_slots(chosen, n, partition);
        sum += q;
        best = std::max(best, q);
    }
    return {sum / samples, best, samples, seed};
}

QNormTable QNormTable::build(const ModulePartition& partition, int samples, std::uint64_t seed)
{
    QNormTable t;
    const int slots = static_cast<int>(partition.genes() * partition.genes());
    for (int e = 1; e <= slots; ++e)
        t.set(e, sample_entry(partition, e, samples, trial_seed(seed, static_cast<std::uint64_t>(e))));
    return t;
}

const QNormEntry& QNormTable::at(int edges) const
{
    auto it = entries_.find(edges);
    if (it == entries_.end())
        throw std::domain_error("QNormTable has no entry for " + std::to_string(edges) + " edges");
    return it->second;
}

void QNormTable::save_csv(const std::filesystem::path& path) const
{
    CsvTable csv;
    csv.header = {"edges", "q_ran", "q_max", "samples", "seed"};
    for (const auto& [e, entry] : entries_)
        csv.rows.push_back({std::to_string(e), format_double(entry.q_ran), format_double(entry.q_max),
                            std::to_string(entry.samples), std::to_string(entry.seed)});
    write_file_atomic(path, csv.to_string());
}

QNormTable QNormTable::load_csv(const std::filesystem::path& path)
{
    const auto csv = CsvTable::parse(read_file(path));
    const auto ce = csv.column("edges"), cr = csv.column("q_ran"), cm = csv.column("q_max"),
               cs = csv.column("samples"), cd = csv.column("seed");
    QNormTable t;
    for (const auto& row : csv.rows)
        t.set(std::stoi(row[ce]),
              {std::stod(row[cr]), std::stod(row[cm]), std::stoi(row[cs]), std::stoull(row[cd])});
    return t;
}

double normalized_q(const Grn& g, const ModulePartition& partition, const QNormTable& table)
{
    const double q = q_score(g, partition);
    const auto& entry = table.at(g.edge_count());
    const double denom = entry.q_max - entry.q_ran;
    if (!(denom > 0.0))
        throw std::domain_error("normalized Q: Q_max equals Q_ran for " + std::to_string(g.edge_count()) +
                                " edges (q_ran=" + format_double(entry.q_ran) + ")");
    return (q - entry.q_ran) / denom;
}

Grn remove_inter_module_edges(const Grn& g, const ModulePartition& partition)
{
    check_partition(g.size(), partition);
    Grn out = g;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (!partition.same_module(i, j)) out.set(i, j, 0);
    return out;
}

int inter_module_edge_count(const Grn& g, const ModulePartition& partition)
{
    check_partition(g.size(), partition);
    int count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) count += g.at(i, j) != 0 && !partition.same_module(i, j);
    return count;
}

std::vector<RemovalStep> stepwise_edge_removal_path(const Grn& g, const ModulePartition& partition,
                                                    const TargetSet& ts, const BinomialTable& table,
                                                    RemovalOrder order)
{
    check_partition(g.size(), partition);
    Grn current = g;
    std::vector<RemovalStep> path{{0, multi_target_fitness(current, ts, table)}};
    for (int removed = 1;; ++removed) {
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j)
                if (current.at(i, j) != 0 && !partition.same_module(i, j)) candidates.emplace_back(i, j);
        if (candidates.empty()) break;

        std::size_t pick = 0;
        double pick_fitness = 0.0;
        if (order == RemovalOrder::fixed) {
            Grn next = current;
            next.set(candidates[0].first, candidates[0].second, 0);
            pick_fitness = multi_target_fitness(next, ts, table);
        } else {
            pick_fitness = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                Grn next = current;
                next.set(candidates[c].first, candidates[c].second, 0);
                const double f = multi_target_fitness(next, ts, table);
                if (f > pick_fitness) {
                    pick_fitness = f;
                    pick = c;
                }
            }
        }
        current.set(candidates[pick].first, candidates[pick].second, 0);
        path.push_back({removed, pick_fitness});
    }
    return path;
}

bool is_discrete_shadow(const std::vector<std::vector<int>>& quadrant,
                        const std::vector<std::vector<int>>& reference)
{
    if (quadrant.size() != reference.size()) throw std::invalid_argument("is_discrete_shadow: dimension mismatch");
    for (std::size_t r = 0; r < quadrant.size(); ++r) {
        if (quadrant[r].size() != reference[r].size())
            throw std::invalid_argument("is_discrete_shadow: dimension mismatch");
        for (std::size_t c = 0; c < quadrant[r].size(); ++c)
            if (quadrant[r][c] != 0 && quadrant[r][c] != reference[r][c]) return false;
    }
    return true;
}

RealMatrix mean_matrix(const std::vector<Grn>& grns)
{
    if (grns.empty()) throw std::invalid_argument("mean_matrix: empty list");
    const std::size_t n = grns.front().size();
    RealMatrix m(n, std::vector<double>(n, 0.0));
    for (const auto& g : grns) {
        if (g.size() != n) throw std::invalid_argument("mean_matrix: GRN sizes differ");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m[i][j] += g.at(i, j);
    }
    for (auto& row : m)
        for (auto& v : row) v /= static_cast<double>(grns.size());
    return m;
}

std::vector<std::vector<int>> quadrant(const Grn& g, std::size_t row, std::size_t col, std::size_t size)
{
    if (row + size > g.size() || col + size > g.size()) throw std::out_of_range("quadrant outside GRN");
    std::vector<std::vector<int>> q(size, std::vector<int>(size));
    for (std::size_t r = 0; r < size; ++r)
        for (std::size_t c = 0; c < size; ++c) q[r][c] = g.at(row + r, col + c);
    return q;
}

}  // namespace grnlab
