#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "types.hpp"

namespace dmbl {

// Fixed-magnetization sector of an L-site spin-1/2 chain.
//
// Site k (1-based) lives in bit k-1 of a configuration word; a set bit is an
// up spin. Configurations are stored in ascending integer order.
class SectorBasis {
 public:
  SectorBasis(int sites, int n_up);

  int sites() const noexcept { return sites_; }
  int n_up() const noexcept { return n_up_; }
  std::size_t size() const noexcept { return configs_.size(); }
  std::size_t full_dimension() const noexcept { return std::size_t{1} << sites_; }

  std::span<const std::uint32_t> configs() const noexcept { return configs_; }
  std::uint32_t config(std::size_t index) const { return configs_.at(index); }
  std::optional<std::size_t> index_of(std::uint32_t config) const noexcept;

 private:
  static constexpr std::int32_t kAbsent = -1;

  int sites_;
  int n_up_;
  std::vector<std::uint32_t> configs_;
  std::vector<std::int32_t> lookup_;  // dense 2^L table, kAbsent outside the sector
};

SectorBasis build_sector_basis(int sites, int n_up);

// Sector used for simulations: zero magnetization for even L, n_up = ceil(L/2)
// (total S^z = +1/2) for odd L.
int default_sector_n_up(int sites);

std::uint64_t binomial(int n, int k);

RealVector embed_full(const RealVector& state, const SectorBasis& basis);
ComplexVector embed_full(const ComplexVector& state, const SectorBasis& basis);

// Restriction of a full-space vector onto the sector amplitudes.
ComplexVector project_sector(const ComplexVector& full, const SectorBasis& basis);

}  // namespace dmbl
