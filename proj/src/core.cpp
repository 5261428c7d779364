#include "grnlab/core.hpp"

#include <bit>
#include <sstream>
#include <stdexcept>

namespace grnlab {

namespace {

void check_length(std::size_t n)
{
    if (n == 0 || n > kMaxGenes)
        throw std::invalid_argument("pattern length " + std::to_string(n) + " outside [1, " +
                                    std::to_string(kMaxGenes) + "]");
}

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
}

}  // namespace

Pattern::Pattern(const std::vector<int>& states)
{
    check_length(states.size());
    size_ = states.size();
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i] == 1)
            bits_ |= StateBits{1} << i;
        else if (states[i] != -1)
            throw std::invalid_argument("pattern entries must be +1 or -1");
    }
}

Pattern Pattern::from_bits(StateBits bits, std::size_t n)
{
    check_length(n);
    Pattern p;
    p.size_ = n;
    p.bits_ = bits & full_mask(n);
    return p;
}

Pattern Pattern::parse(std::string_view text)
{
    std::vector<int> values;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == ',') {
            ++i;
            continue;
        }
        if (c == '+') {
            ++i;
            if (i < text.size() && text[i] == '1') ++i;
            values.push_back(1);
        } else if (c == '-') {
            ++i;
            if (i < text.size() && text[i] == '1') ++i;
            values.push_back(-1);
        } else if (text.substr(i, 3) == "\xE2\x88\x92") {  // U+2212 minus sign
            i += 3;
            if (i < text.size() && text[i] == '1') ++i;
            values.push_back(-1);
        } else if (c == '1') {
            ++i;
            values.push_back(1);
        } else {
            throw std::invalid_argument("unexpected character '" + std::string(1, c) + "' in pattern");
        }
    }
    return Pattern(values);
}

std::vector<int> Pattern::values() const
{
    std::vector<int> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = (*this)[i];
    return out;
}

std::string Pattern::to_string() const
{
    std::string out;
    for (std::size_t i = 0; i < size_; ++i) {
        if (i) out += ' ';
        out += (*this)[i] > 0 ? "+1" : "-1";
    }
    return out;
}

ElementaryPerturbation::ElementaryPerturbation(StateBits flips, std::size_t n) : flips_(flips & full_mask(n)), size_(n)
{
    check_length(n);
}

ElementaryPerturbation::ElementaryPerturbation(const std::vector<int>& mask)
{
    check_length(mask.size());
    size_ = mask.size();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == -1)
            flips_ |= StateBits{1} << i;
        else if (mask[i] != 1)
            throw std::invalid_argument("perturbation entries must be +1 or -1");
    }
}

int ElementaryPerturbation::weight() const { return std::popcount(flips_); }

int ElementaryPerturbation::weight_in(std::size_t first, std::size_t last) const
{
    if (first > last || last > size_) throw std::out_of_range("weight_in: bad range");
    const StateBits range = full_mask(last) & ~full_mask(first);
    return std::popcount(flips_ & range);
}

Grn::Grn(std::size_t n) : n_(n), weights_(n * n, 0) { check_length(n); }

Grn::Grn(const std::vector<std::vector<int>>& rows) : Grn(rows.size())
{
    for (std::size_t i = 0; i < n_; ++i) {
        require_same_size(rows[i].size(), n_, "Grn row");
        for (std::size_t j = 0; j < n_; ++j) set(i, j, rows[i][j]);
    }
}

Grn Grn::identity(std::size_t n, int sign)
{
    Grn g(n);
    for (std::size_t i = 0; i < n; ++i) g.set(i, i, sign);
    return g;
}

void Grn::set(std::size_t row, std::size_t col, int value)
{
    if (row >= n_ || col >= n_) throw std::out_of_range("Grn index out of range");
    if (value < -1 || value > 1) throw std::invalid_argument("GRN entries must be in {-1, 0, +1}");
    weights_[row * n_ + col] = static_cast<std::int8_t>(value);
}

int Grn::edge_count() const
{
    int count = 0;
    for (auto w : weights_) count += w != 0;
    return count;
}

int Grn::regulator_count(std::size_t u) const
{
    int count = 0;
    for (std::size_t j = 0; j < n_; ++j) count += at(u, j) != 0;
    return count;
}

std::string Grn::encode() const
{
    std::string out(weights_.size(), '0');
    for (std::size_t k = 0; k < weights_.size(); ++k) out[k] = weights_[k] > 0 ? '+' : (weights_[k] < 0 ? '-' : '0');
    return out;
}

Grn Grn::decode(std::string_view text)
{
    std::size_t n = 0;
    while (n * n < text.size()) ++n;
    if (n * n != text.size()) throw std::invalid_argument("GRN encoding length is not a square");
    Grn g(n);
    for (std::size_t k = 0; k < text.size(); ++k) {
        switch (text[k]) {
            case '+': g.weights_[k] = 1; break;
            case '-': g.weights_[k] = -1; break;
            case '0': break;
            default: throw std::invalid_argument("bad character in GRN encoding");
        }
    }
    return g;
}

Grn Grn::negated() const
{
    Grn out = *this;
    for (auto& w : out.weights_) w = static_cast<std::int8_t>(-w);
    return out;
}

StepKernel::StepKernel(const Grn& g) : n_(g.size()), activators_(n_, 0), repressors_(n_, 0)
{
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) {
            const int w = g.at(i, j);
            if (w > 0) activators_[i] |= StateBits{1} << j;
            if (w < 0) repressors_[i] |= StateBits{1} << j;
        }
}

StateBits StepKernel::step(StateBits s) const
{
    const StateBits off = ~s & full_mask(n_);
    StateBits next = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        // +1 contributions: active activators and inactive repressors.
        const int up = std::popcount(activators_[i] & s) + std::popcount(repressors_[i] & off);
        const int down = std::popcount(activators_[i] & off) + std::popcount(repressors_[i] & s);
        if (up > down) next |= StateBits{1} << i;
    }
    return next;
}

Pattern step(const Grn& g, const Pattern& s)
{
    require_same_size(g.size(), s.size(), "step");
    return Pattern::from_bits(StepKernel(g).step(s.bits()), s.size());
}

StateBits regulate_bits(const StepKernel& k, StateBits start, StateBits target, int horizon, int* steps_taken)
{
    // The target ends the trajectory early only if it is a steady state;
    // passing through an unstable target is not a recovery.
    const bool stable = k.step(target) == target;
    StateBits s = start;
    int t = 0;
    for (; t < horizon; ++t) {
        if (stable && s == target) break;
        s = k.step(s);
    }
    if (steps_taken) *steps_taken = t;
    return s;
}

Pattern regulate(const Grn& g, const Pattern& start, const Pattern& target, int horizon)
{
    require_same_size(g.size(), start.size(), "regulate");
    require_same_size(start.size(), target.size(), "regulate");
    if (horizon < 1) throw std::invalid_argument("regulate: horizon must be >= 1");
    const StepKernel k(g);
    return Pattern::from_bits(regulate_bits(k, start.bits(), target.bits(), horizon), start.size());
}

Pattern apply_perturbation(const ElementaryPerturbation& e, const Pattern& s)
{
    require_same_size(e.size(), s.size(), "apply_perturbation");
    return Pattern::from_bits(s.bits() ^ e.flips(), s.size());
}

double hamming_fraction(const Pattern& a, const Pattern& b)
{
    require_same_size(a.size(), b.size(), "hamming_fraction");
    return static_cast<double>(std::popcount(a.bits() ^ b.bits())) / static_cast<double>(a.size());
}

Pattern target_one() { return Pattern::parse("+1 -1 +1 -1 +1 -1 +1 -1 +1 -1"); }

Pattern target_two() { return Pattern::parse("+1 -1 +1 -1 +1 +1 -1 +1 -1 +1"); }

std::vector<std::vector<int>> alternating_block()
{
    std::vector<std::vector<int>> m(5, std::vector<int>(5));
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 5; ++c) m[r][c] = (r + c) % 2 == 0 ? 1 : -1;
    return m;
}

namespace {

// Each block sends all 32 states of a 5-gene module to "+1 -1 +1 -1 +1"
// (a fixed point) within a few steps. Found by search; densest first.
const std::vector<std::vector<std::vector<int>>>& shared_blocks()
{
    static const std::vector<std::vector<std::vector<int>>> blocks = {
        {{0, -1, 0, -1, -1}, {-1, 1, 1, 0, 1}, {-1, -1, -1, -1, 1}, {-1, 1, 1, 1, 1}, {0, -1, -1, -1, 1}},
        {{0, 1, 1, -1, 0}, {-1, -1, -1, 0, 1}, {1, -1, 1, 0, -1}, {1, 1, -1, 0, -1}, {1, 0, 1, -1, -1}},
        {{0, -1, 1, 0, -1}, {1, 0, -1, 0, 0}, {0, 0, 0, -1, 0}, {1, 1, 0, 1, -1}, {1, 1, 1, -1, 1}},
        {{0, 0, 1, 0, 1}, {-1, 0, 0, 0, 0}, {-1, 0, 1, -1, 0}, {0, 0, 0, -1, -1}, {-1, 0, 1, -1, 0}},
        // Genes needing -1 have no inputs; the others read gene 1 inverted.
        {{0, -1, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, -1, 0, 0, 0}, {0, 0, 0, 0, 0}, {0, -1, 0, 0, 0}},
    };
    return blocks;
}

}  // namespace

std::vector<std::vector<int>> shared_module_block(std::size_t variant)
{
    if (variant >= shared_blocks().size()) throw std::out_of_range("shared_module_block: no such variant");
    return shared_blocks()[variant];
}

std::size_t shared_module_variants() { return shared_blocks().size(); }

Grn block_diagonal(const std::vector<std::vector<int>>& top_left, const std::vector<std::vector<int>>& bottom_right)
{
    require_same_size(top_left.size(), 5, "block_diagonal");
    require_same_size(bottom_right.size(), 5, "block_diagonal");
    Grn g(10);
    for (std::size_t r = 0; r < 5; ++r) {
        require_same_size(top_left[r].size(), 5, "block_diagonal");
        require_same_size(bottom_right[r].size(), 5, "block_diagonal");
        for (std::size_t c = 0; c < 5; ++c) {
            g.set(r, c, top_left[r][c]);
            g.set(5 + r, 5 + c, bottom_right[r][c]);
        }
    }
    return g;
}

Grn alternating_block_diagonal() { return block_diagonal(alternating_block(), alternating_block()); }

Grn optimal_two_target_grn(std::size_t variant)
{
    return block_diagonal(shared_module_block(variant), alternating_block());
}

}  // namespace grnlab
