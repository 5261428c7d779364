#pragma once

// Modularity of a GRN against a fixed gene partition, its normalisation
// against same-size random networks, and inter-module edge surgery.

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "grnlab/core.hpp"
#include "grnlab/fitness.hpp"
#include "grnlab/rng.hpp"

namespace grnlab {

/// Assignment of each gene to one of K modules.
class ModulePartition {
public:
    explicit ModulePartition(std::vector<int> module_of_gene);

    /// Two modules: genes [0, n/2) and [n/2, n).
    static ModulePartition halves(std::size_t n = 10);

    std::size_t genes() const { return module_.size(); }
    int modules() const { return modules_; }
    int module_of(std::size_t gene) const { return module_[gene]; }
    bool same_module(std::size_t a, std::size_t b) const { return module_[a] == module_[b]; }

private:
    std::vector<int> module_;
    int modules_ = 0;
};

/// Q = sum_i [l_i / L - (d_i / 2L)^2]. Edges are directed; d_i counts in- and
/// out-degree so a self-loop adds 2. Throws std::domain_error when L = 0.
double q_score(const Grn& g, const ModulePartition& partition);

/// Q of an edge set given as row-major slot indices.
double q_score_slots(const std::vector<int>& slots, std::size_t n, const ModulePartition& partition);

struct QNormEntry {
    double q_ran = 0.0;
    double q_max = 0.0;
    int samples = 0;
    std::uint64_t seed = 0;
};

/// Mean and maximum Q of random networks, per edge count.
class QNormTable {
public:
    QNormTable() = default;

    /// Samples `samples` random networks for each edge count in [1, n^2].
    static QNormTable build(const ModulePartition& partition, int samples, std::uint64_t seed);

    /// One entry: `samples` networks with exactly `edges` distinct directed
    /// slots chosen uniformly among the n^2 (self-loops allowed).
    static QNormEntry sample_entry(const ModulePartition& partition, int edges, int samples, std::uint64_t seed);

    void set(int edges, QNormEntry e) { entries_[edges] = e; }
    bool contains(int edges) const { return entries_.count(edges) != 0; }
    const QNormEntry& at(int edges) const;
    const std::map<int, QNormEntry>& entries() const { return entries_; }

    /// CSV columns: edges,q_ran,q_max,samples,seed
    void save_csv(const std::filesystem::path& path) const;
    static QNormTable load_csv(const std::filesystem::path& path);

private:
    std::map<int, QNormEntry> entries_;
};

inline constexpr int kQNormSamples = 10'000;

/// (Q - Q_ran) / (Q_max - Q_ran), unclamped. Throws std::domain_error if the
/// table has no entry for the edge count or the denominator vanishes.
double normalized_q(const Grn& g, const ModulePartition& partition, const QNormTable& table);

/// Zeroes every entry linking genes in different modules.
Grn remove_inter_module_edges(const Grn& g, const ModulePartition& partition);

int inter_module_edge_count(const Grn& g, const ModulePartition& partition);

enum class RemovalOrder { greedy, fixed };

struct RemovalStep {
    int removed;
    double fitness;
};

/// Removes inter-module edges one at a time, recording distributional
/// fitness after each step (entry 0 is the untouched network). Greedy order
/// takes the removal with the best resulting fitness, ties to the lowest
/// row-major slot; fixed order goes in row-major order.
std::vector<RemovalStep> stepwise_edge_removal_path(const Grn& g, const ModulePartition& partition,
                                                    const TargetSet& ts, const BinomialTable& table,
                                                    RemovalOrder order = RemovalOrder::greedy);

/// True iff every nonzero entry of `quadrant` equals the matching entry of
/// `reference`.
bool is_discrete_shadow(const std::vector<std::vector<int>>& quadrant,
                        const std::vector<std::vector<int>>& reference);

using RealMatrix = std::vector<std::vector<double>>;

/// Elementwise mean of equally sized GRNs.
RealMatrix mean_matrix(const std::vector<Grn>& grns);

/// 5x5 sub-block starting at (row, col).
std::vector<std::vector<int>> quadrant(const Grn& g, std::size_t row, std::size_t col, std::size_t size = 5);

}  // namespace grnlab
