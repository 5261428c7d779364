#pragma once

#include <span>
#include <vector>

namespace grnlab {

double mean(std::span<const double> xs);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double stddev(std::span<const double> xs);

double median(std::vector<double> xs);

struct MannWhitneyResult {
    double u;  ///< U of the first sample: pairs with x > y, ties counting 1/2
    double z;
    double p;  ///< two-sided
};

/// Mann-Whitney U test with midranks for ties, tie-corrected variance and a
/// 0.5 continuity correction on the normal approximation.
MannWhitneyResult mann_whitney_u(std::span<const double> x, std::span<const double> y);

}  // namespace grnlab
