#include "grnlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace grnlab {

double mean(std::span<const double> xs)
{
    if (xs.empty()) throw std::invalid_argument("mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median(std::vector<double> xs)
{
    if (xs.empty()) throw std::invalid_argument("median of empty sample");
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y)
{
    if (x.empty() || y.empty()) throw std::invalid_argument("mann_whitney_u: both samples must be nonempty");
    const double n1 = static_cast<double>(x.size());
    const double n2 = static_cast<double>(y.size());

    std::vector<std::pair<double, int>> pooled;
    pooled.reserve(x.size() + y.size());
    for (double v : x) pooled.emplace_back(v, 0);
    for (double v : y) pooled.emplace_back(v, 1);
    std::sort(pooled.begin(), pooled.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    double rank_sum_x = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
        const double t = static_cast<double>(j - i);
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (pooled[k].second == 0) rank_sum_x += midrank;
        tie_term += t * t * t - t;
        i = j;
    }

    const double u = rank_sum_x - n1 * (n1 + 1.0) / 2.0;
    const double n = n1 + n2;
    const double mu = n1 * n2 / 2.0;
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return {u, 0.0, 1.0};

    const double dev = std::max(0.0, std::abs(u - mu) - 0.5);
    const double z = dev / std::sqrt(var);
    const double p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return {u, u >= mu ? z : -z, p};
}

}  // namespace grnlab
