#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dmbl {

struct Summary {
  double mean = 0.0;
  std::optional<double> stderr;  // absent below two samples
  std::size_t count = 0;
};

// Sum that does not depend on the order of the inputs: values are sorted
// first, then accumulated with Neumaier compensation.
double order_independent_sum(std::span<const double> values);

// Mean and sample standard deviation / sqrt(N).
Summary summarize(std::span<const double> values);

// Quantile by linear interpolation between order statistics, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace dmbl
