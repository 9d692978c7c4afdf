#include "basis.hpp"

#include <algorithm>
#include <string>

#include "error.hpp"

namespace dmbl {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return result;
}

SectorBasis::SectorBasis(int sites, int n_up) : sites_(sites), n_up_(n_up) {
  if (sites < 2 || sites > kMaxSites)
    fail(ErrorCode::invalid_arguments, "sector basis: L must lie in [2, " + std::to_string(kMaxSites) + "], got " +
                                           std::to_string(sites));
  if (n_up < 0 || n_up > sites)
    fail(ErrorCode::invalid_arguments,
         "sector basis: n_up=" + std::to_string(n_up) + " outside [0, " + std::to_string(sites) + "]");

  configs_.reserve(binomial(sites, n_up));
  lookup_.assign(std::size_t{1} << sites, kAbsent);

  // Gosper's hack walks the n_up-subsets in ascending order.
  const std::uint64_t limit = std::uint64_t{1} << sites;
  std::uint64_t word = (n_up == 0) ? 0 : (std::uint64_t{1} << n_up) - 1;
  while (word < limit) {
    lookup_[word] = static_cast<std::int32_t>(configs_.size());
    configs_.push_back(static_cast<std::uint32_t>(word));
    if (word == 0) break;
    const std::uint64_t lowest = word & (~word + 1);
    const std::uint64_t ripple = word + lowest;
    word = (((ripple ^ word) >> 2) / lowest) | ripple;
  }
}

std::optional<std::size_t> SectorBasis::index_of(std::uint32_t config) const noexcept {
  if (config >= lookup_.size()) return std::nullopt;
  const auto idx = lookup_[config];
  if (idx == kAbsent) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

SectorBasis build_sector_basis(int sites, int n_up) { return SectorBasis(sites, n_up); }

int default_sector_n_up(int sites) { return (sites + 1) / 2; }

namespace {

template <typename Vector>
Vector embed_impl(const Vector& state, const SectorBasis& basis) {
  if (static_cast<std::size_t>(state.size()) != basis.size())
    fail(ErrorCode::dimension_mismatch, "embed_full: state has dimension " + std::to_string(state.size()) +
                                            ", sector has " + std::to_string(basis.size()));
  Vector full = Vector::Zero(static_cast<Eigen::Index>(basis.full_dimension()));
  const auto configs = basis.configs();
  for (std::size_t i = 0; i < configs.size(); ++i) full[configs[i]] = state[static_cast<Eigen::Index>(i)];
  return full;
}

}  // namespace

RealVector embed_full(const RealVector& state, const SectorBasis& basis) { return embed_impl(state, basis); }
ComplexVector embed_full(const ComplexVector& state, const SectorBasis& basis) { return embed_impl(state, basis); }

ComplexVector project_sector(const ComplexVector& full, const SectorBasis& basis) {
  if (static_cast<std::size_t>(full.size()) != basis.full_dimension())
    fail(ErrorCode::dimension_mismatch, "project_sector: expected a 2^L vector");
  ComplexVector out(static_cast<Eigen::Index>(basis.size()));
  const auto configs = basis.configs();
  for (std::size_t i = 0; i < configs.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[configs[i]];
  return out;
}

}  // namespace dmbl
