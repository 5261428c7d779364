#pragma once

// Discrete Boolean-threshold gene regulatory network model.
//
// A pattern is a vector over {-1,+1}; we store it as a bit mask where bit i
// is set when gene i is active (+1). A GRN is an N x N ternary matrix with
// W[i][j] the effect of regulator j on regulated gene i.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace grnlab {

/// Largest pattern length supported. Exhaustive evaluation is 2^N, so this
/// is already far beyond what the distributional code will accept.
inline constexpr std::size_t kMaxGenes = 20;

/// Default regulation horizon.
inline constexpr int kDefaultHorizon = 20;

using StateBits = std::uint32_t;

inline StateBits full_mask(std::size_t n) { return n >= 32 ? ~StateBits{0} : (StateBits{1} << n) - 1; }

class Pattern {
public:
    Pattern() = default;

    /// Builds from explicit +1/-1 values; anything else throws.
    explicit Pattern(const std::vector<int>& states);

    static Pattern from_bits(StateBits bits, std::size_t n);

    /// Accepts "+1 -1 +1", "1 -1 1" or a compact "+-+" string.
    static Pattern parse(std::string_view text);

    std::size_t size() const { return size_; }
    StateBits bits() const { return bits_; }
    int operator[](std::size_t i) const { return (bits_ >> i) & 1u ? 1 : -1; }

    Pattern negated() const { return from_bits(~bits_ & full_mask(size_), size_); }

    std::vector<int> values() const;

    /// Space separated "+1 -1 ..." form.
    std::string to_string() const;

    friend bool operator==(const Pattern&, const Pattern&) = default;

private:
    StateBits bits_ = 0;
    std::size_t size_ = 0;
};

/// A {-1,+1} mask multiplied elementwise into a pattern. Bit i set means the
/// mask holds -1 at position i (gene i is flipped).
class ElementaryPerturbation {
public:
    ElementaryPerturbation() = default;
    ElementaryPerturbation(StateBits flips, std::size_t n);

    /// From explicit +1/-1 entries.
    explicit ElementaryPerturbation(const std::vector<int>& mask);

    static ElementaryPerturbation identity(std::size_t n) { return {0, n}; }

    std::size_t size() const { return size_; }
    StateBits flips() const { return flips_; }
    int weight() const;

    /// Number of -1 entries among positions [first, last).
    int weight_in(std::size_t first, std::size_t last) const;

    friend bool operator==(const ElementaryPerturbation&, const ElementaryPerturbation&) = default;

private:
    StateBits flips_ = 0;
    std::size_t size_ = 0;
};

class Grn {
public:
    Grn() = default;

    /// All-zero N x N matrix.
    explicit Grn(std::size_t n);

    /// Row-major rows; must be square with entries in {-1,0,+1}.
    explicit Grn(const std::vector<std::vector<int>>& rows);

    static Grn identity(std::size_t n, int sign = 1);

    std::size_t size() const { return n_; }

    int at(std::size_t row, std::size_t col) const { return weights_[row * n_ + col]; }
    void set(std::size_t row, std::size_t col, int value);

    /// Number of nonzero entries.
    int edge_count() const;

    /// Nonzero entries in row u, i.e. the regulators of gene u.
    int regulator_count(std::size_t u) const;

    const std::vector<std::int8_t>& raw() const { return weights_; }

    /// Canonical compact encoding, one of '-', '0', '+' per entry row-major.
    std::string encode() const;
    static Grn decode(std::string_view text);

    Grn negated() const;

    friend bool operator==(const Grn&, const Grn&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::int8_t> weights_;
};

/// Row masks of a GRN for bitwise state updates. Build once and reuse when
/// the same network is stepped many times.
class StepKernel {
public:
    explicit StepKernel(const Grn& g);

    std::size_t size() const { return n_; }
    StateBits step(StateBits s) const;

private:
    std::size_t n_;
    std::vector<StateBits> activators_;
    std::vector<StateBits> repressors_;
};

/// One synchronous update: s'_i = sigma(sum_j W[i][j] s_j), sigma(x) = +1 iff x > 0.
Pattern step(const Grn& g, const Pattern& s);

/// Iterates the dynamics from `start` for at most `horizon` steps. Returns
/// `target` as soon as it is reached at some t < horizon, provided the target
/// is a steady state of `g`; otherwise the state after `horizon` steps. The
/// result therefore always equals the state after `horizon` steps.
Pattern regulate(const Grn& g, const Pattern& start, const Pattern& target, int horizon = kDefaultHorizon);

/// Bitwise regulate used on the hot path. `steps_taken` receives the number
/// of updates applied when non-null.
StateBits regulate_bits(const StepKernel& k, StateBits start, StateBits target, int horizon,
                        int* steps_taken = nullptr);

Pattern apply_perturbation(const ElementaryPerturbation& e, const Pattern& s);

/// Hamming distance divided by the pattern length.
double hamming_fraction(const Pattern& a, const Pattern& b);

// Reference objects from the two-module model.

/// "+1 -1 +1 -1 +1 -1 +1 -1 +1 -1", introduced at generation 0.
Pattern target_one();
/// Shares the first module with target one and inverts the second.
Pattern target_two();

/// 5x5 alternating majority-vote block: +1 where row+col is even, else -1.
std::vector<std::vector<int>> alternating_block();

/// Shared-module block that returns every state of the first module to
/// "+1 -1 +1 -1 +1" within the horizon. Index selects one of several
/// verified variants (0 is the densest).
std::vector<std::vector<int>> shared_module_block(std::size_t variant = 0);
std::size_t shared_module_variants();

/// Places two 5x5 blocks on the diagonal of an otherwise empty 10x10 GRN.
Grn block_diagonal(const std::vector<std::vector<int>>& top_left,
                   const std::vector<std::vector<int>>& bottom_right);

/// Alternating block in both diagonal quadrants.
Grn alternating_block_diagonal();

/// Fully modular GRN attaining the two-target bound: shared-module recoverer
/// top-left, alternating majority block bottom-right.
Grn optimal_two_target_grn(std::size_t variant = 0);

}  // namespace grnlab
