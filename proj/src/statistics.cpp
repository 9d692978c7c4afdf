#include "statistics.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace dmbl {

double order_independent_sum(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  double carry = 0.0;
  for (double v : sorted) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      carry += (sum - t) + v;
    else
      carry += (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

Summary summarize(std::span<const double> values) {
  Summary out;
  out.count = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = order_independent_sum(values) / n;
  if (values.size() >= 2) {
    std::vector<double> sq;
    sq.reserve(values.size());
    for (double v : values) sq.push_back((v - out.mean) * (v - out.mean));
    out.stderr = std::sqrt(order_independent_sum(sq) / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(ErrorCode::invalid_arguments, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace dmbl
