#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dynamics.hpp"
#include "types.hpp"

namespace dmbl {

// Subset of environment sites {1..L}, stored as a bitmask (site k -> bit k-1).
class SiteSet {
 public:
  SiteSet() = default;

  static SiteSet from_sites(std::span<const int> one_based, int sites);
  static SiteSet from_mask(std::uint32_t mask, int sites);
  static SiteSet all(int sites) { return from_mask(full_mask(sites), sites); }

  std::uint32_t mask() const noexcept { return mask_; }
  int universe() const noexcept { return universe_; }
  int size() const noexcept;
  std::vector<int> sites() const;
  SiteSet complement() const noexcept { return SiteSet(full_mask(universe_) & ~mask_, universe_); }

  static std::uint32_t full_mask(int sites) noexcept {
    return sites >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << sites) - 1;
  }

 private:
  SiteSet(std::uint32_t mask, int universe) : mask_(mask), universe_(universe) {}
  std::uint32_t mask_ = 0;
  int universe_ = 0;
};

// Reduced state of the system qubit together with an environment fragment, or
// of the fragment alone. With the qubit, index = s * 2^l + f where f packs the
// fragment sites in increasing order into bits 0..l-1.
struct DensityMatrix {
  ComplexMatrix matrix;
  SiteSet fragment;
  bool includes_system = true;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
};

DensityMatrix reduced_system_fragment(const BranchState& branches, const SiteSet& fragment);

// Traces the system qubit out of a system+fragment state.
DensityMatrix trace_out_system(const DensityMatrix& rho_sf);

double vn_entropy(const DensityMatrix& rho);
double vn_entropy(const ComplexMatrix& rho);

double mutual_information(const BranchState& branches, const SiteSet& fragment);

struct ExactEnumeration {};
struct UniformSample {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};
using FragmentSampling = std::variant<ExactEnumeration, UniformSample>;

// Exact enumeration while C(L, l) <= exact_limit, otherwise a uniform sample of
// min(sample_cap, C(L, l)) fragments.
struct FragmentPolicy {
  std::uint64_t exact_limit = 4000;
  std::size_t sample_cap = 2000;
  std::uint64_t seed = 0;
  // Fill sizes l > L/2 from their complements via I(S:F) + I(S:F^c) = 2 H_S.
  bool use_complement_identity = true;

  FragmentSampling mode_for(int sites, int l) const;
};

struct AveragedMI {
  double mean = 0.0;
  double stderr = 0.0;  // zero for exact enumeration
  std::size_t evaluations = 0;
  std::uint64_t population = 0;
  bool exact = true;
};

AveragedMI averaged_mi(const BranchState& branches, int l, const FragmentSampling& mode);

struct RedundancyCurve {
  int sites = 0;
  double system_entropy = 0.0;
  std::vector<double> mi_avg;  // index l-1 for l = 1..L
  std::vector<double> mi_stderr;
  std::vector<double> mi_rescaled;
  std::vector<std::size_t> evaluations;
  std::vector<bool> exact;
  double lack_of_redundancy = 0.0;

  double fraction(int l) const { return static_cast<double>(l) / sites; }
};

inline constexpr double kSystemEntropyThreshold = 1e-6;

RedundancyCurve lack_of_redundancy(const BranchState& branches, const FragmentPolicy& policy = {},
                                   double threshold = kSystemEntropyThreshold);

// Unranks the `rank`-th l-subset of {0..n-1} in colexicographic (ascending mask) order.
std::uint32_t unrank_combination(std::uint64_t rank, int n, int l);

}  // namespace dmbl
