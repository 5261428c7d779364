#pragma once

// Brute-force reference implementations for tests. Plain integer vectors and
// per-mask probabilities; nothing here touches the bit-packed fast path.

#include <cmath>
#include <vector>

namespace oracle {

using Vec = std::vector<int>;
using Mat = std::vector<std::vector<int>>;

inline Vec step(const Mat& w, const Vec& s)
{
    Vec out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        int sum = 0;
        for (std::size_t j = 0; j < s.size(); ++j) sum += w[i][j] * s[j];
        out[i] = sum > 0 ? 1 : -1;
    }
    return out;
}

// A start recovers only by settling on the target, so the regulated end
// state is simply the state after `horizon` synchronous updates.
inline Vec regulate(const Mat& w, Vec s, const Vec& /*target*/, int horizon = 20)
{
    for (int t = 0; t < horizon; ++t) s = step(w, s);
    return s;
}

inline int hamming(const Vec& a, const Vec& b)
{
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
    return d;
}

/// Sum over all 2^N masks of P(mask) * gamma(H / N), P(mask) = p^w (1-p)^(N-w).
inline double expected_reward(const Mat& w, const Vec& target, double p = 0.15, int horizon = 20)
{
    const std::size_t n = target.size();
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        Vec start = target;
        int weight = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1u) {
                start[i] = -start[i];
                ++weight;
            }
        const Vec end = regulate(w, start, target, horizon);
        const double h = static_cast<double>(hamming(end, target)) / static_cast<double>(n);
        total += std::pow(p, weight) * std::pow(1.0 - p, static_cast<double>(n) - weight) * std::pow(1.0 - h, 5);
    }
    return total;
}

inline double fitness(const Mat& w, const Vec& target, double p = 0.15)
{
    return 1.0 - std::exp(-3.0 * expected_reward(w, target, p));
}

inline double two_target_fitness(const Mat& w, const Vec& t1, const Vec& t2)
{
    return 0.5 * (fitness(w, t1) + fitness(w, t2));
}

}  // namespace oracle
