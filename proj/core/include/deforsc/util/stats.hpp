// Small statistics helpers used across the engines.
#pragma once

#include <cstddef>
#include <vector>

namespace deforsc {

double mean(const std::vector<double>& v);

// Sample standard deviation (n-1 denominator); 0 when fewer than two values.
double sample_sd(const std::vector<double>& v);

// Kahan compensated summation; keeps ledger totals exact to the last ulp even
// for long, badly scaled column sums.
double compensated_sum(const std::vector<double>& v);

// Standard normal CDF.
double normal_cdf(double z);

// Two-sided normal p-value for estimate/se; se <= 0 degenerates to 1 when est
// is 0 and 0 otherwise.
double two_sided_p(double estimate, double se);

}  // namespace deforsc
