#include "qinfo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "basis.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace dmbl {

int SiteSet::size() const noexcept { return std::popcount(mask_); }

std::vector<int> SiteSet::sites() const {
  std::vector<int> out;
  for (int k = 0; k < universe_; ++k)
    if ((mask_ >> k) & 1U) out.push_back(k + 1);
  return out;
}

SiteSet SiteSet::from_sites(std::span<const int> one_based, int sites) {
  if (sites < 1 || sites > kMaxSites) fail(ErrorCode::invalid_site_set, "site set: bad chain length");
  std::uint32_t mask = 0;
  for (int k : one_based) {
    if (k < 1 || k > sites)
      fail(ErrorCode::invalid_site_set, "site " + std::to_string(k) + " outside 1.." + std::to_string(sites));
    const std::uint32_t bit = std::uint32_t{1} << (k - 1);
    if (mask & bit) fail(ErrorCode::invalid_site_set, "site " + std::to_string(k) + " listed twice");
    mask |= bit;
  }
  return SiteSet(mask, sites);
}

SiteSet SiteSet::from_mask(std::uint32_t mask, int sites) {
  if (sites < 1 || sites > kMaxSites) fail(ErrorCode::invalid_site_set, "site set: bad chain length");
  if (mask & ~full_mask(sites)) fail(ErrorCode::invalid_site_set, "site mask has bits beyond L");
  return SiteSet(mask, sites);
}

namespace {

void check_branches(const BranchState& b) {
  if (b.sites < 1 || b.sites > kMaxSites || b.phi_plus.size() != (Eigen::Index{1} << b.sites) ||
      b.phi_minus.size() != b.phi_plus.size())
    fail(ErrorCode::dimension_mismatch, "branch state does not hold two 2^L vectors");
}

void check_fragment(const BranchState& b, const SiteSet& f) {
  if (f.universe() != b.sites)
    fail(ErrorCode::invalid_site_set, "fragment defined on L=" + std::to_string(f.universe()) + ", branches have L=" +
                                          std::to_string(b.sites));
}

// pdep of every value 0..2^popcount(mask)-1 onto mask.
std::vector<std::uint32_t> deposit_table(std::uint32_t mask) {
  const int bits = std::popcount(mask);
  std::vector<std::uint32_t> out(std::size_t{1} << bits, 0);
  int j = 0;
  for (int k = 0; k < 32 && j < bits; ++k) {
    if (!((mask >> k) & 1U)) continue;
    const std::size_t half = std::size_t{1} << j;
    for (std::size_t r = 0; r < half; ++r) out[r + half] = out[r] | (std::uint32_t{1} << k);
    ++j;
  }
  return out;
}

// Per-branch entropies of fragment marginals, specialized on the scalar type so
// that real branches (lambda = 0 dynamics) use real arithmetic.
template <typename Scalar>
class FragmentEntropies {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  FragmentEntropies(Vector plus, Vector minus, int sites)
      : plus_(std::move(plus)), minus_(std::move(minus)), sites_(sites) {}

  // Rows of each reshaped branch run over the fragment, columns over the rest.
  void reshape(std::uint32_t fragment, Matrix& phi_plus, Matrix& phi_minus) const {
    const std::uint32_t rest = SiteSet::full_mask(sites_) & ~fragment;
    const auto rows = deposit_table(fragment);
    const auto cols = deposit_table(rest);
    phi_plus.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    phi_minus.resize(phi_plus.rows(), phi_plus.cols());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto x = static_cast<Eigen::Index>(rows[r] | cols[c]);
        phi_plus(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = plus_[x];
        phi_minus(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = minus_[x];
      }
    }
  }

  // H(rho_F) and H(rho_SF) for one fragment, each from the smaller Gram matrix.
  std::pair<double, double> entropies(std::uint32_t fragment) const {
    Matrix pp, pm;
    reshape(fragment, pp, pm);
    const Eigen::Index a = pp.rows();  // 2^l
    const Eigen::Index b = pp.cols();  // 2^(L-l)

    Matrix gram;
    // rho_F = (P+ P+^dag + P- P-^dag)/2, nonzero spectrum shared with the 2b x 2b Gram.
    if (a <= 2 * b) {
      gram.noalias() = pp * pp.adjoint();
      gram.noalias() += pm * pm.adjoint();
    } else {
      gram.resize(2 * b, 2 * b);
      gram.topLeftCorner(b, b).noalias() = pp.adjoint() * pp;
      gram.topRightCorner(b, b).noalias() = pp.adjoint() * pm;
      gram.bottomLeftCorner(b, b) = gram.topRightCorner(b, b).adjoint();
      gram.bottomRightCorner(b, b).noalias() = pm.adjoint() * pm;
    }
    gram *= 0.5;
    const double h_f = entropy(gram);

    // rho_SF = M M^dag / 2 with M = [P+; P-], dual Gram (P+^dag P+ + P-^dag P-)/2.
    if (2 * a <= b) {
      gram.resize(2 * a, 2 * a);
      gram.topLeftCorner(a, a).noalias() = pp * pp.adjoint();
      gram.topRightCorner(a, a).noalias() = pp * pm.adjoint();
      gram.bottomLeftCorner(a, a) = gram.topRightCorner(a, a).adjoint();
      gram.bottomRightCorner(a, a).noalias() = pm * pm.adjoint();
    } else {
      gram.noalias() = pp.adjoint() * pp;
      gram.noalias() += pm.adjoint() * pm;
    }
    gram *= 0.5;
    const double h_sf = entropy(gram);
    return {h_f, h_sf};
  }

 private:
  static double entropy(const Matrix& m) {
    if (m.rows() == 1) return linalg::entropy_from_eigenvalues(RealVector::Constant(1, std::real(m(0, 0))));
    if constexpr (std::is_same_v<Scalar, double>)
      return linalg::entropy_from_eigenvalues(linalg::symmetric_eigenvalues(m));
    else
      return linalg::entropy_from_eigenvalues(linalg::hermitian_eigenvalues(m));
  }

  Vector plus_;
  Vector minus_;
  int sites_;
};

// Dispatches to the real or complex evaluator once per branch state.
class MutualInformation {
 public:
  explicit MutualInformation(const BranchState& b) : sites_(b.sites) {
    check_branches(b);
    system_entropy_ = decoherence_factor(b).system_entropy;
    const bool real = (b.phi_plus.imag().array() == 0.0).all() && (b.phi_minus.imag().array() == 0.0).all();
    if (real)
      real_.emplace(b.phi_plus.real(), b.phi_minus.real(), sites_);
    else
      complex_.emplace(b.phi_plus, b.phi_minus, sites_);
  }

  double system_entropy() const noexcept { return system_entropy_; }

  double operator()(std::uint32_t fragment) const {
    if (fragment == 0) return 0.0;
    const auto [h_f, h_sf] = real_ ? real_->entropies(fragment) : complex_->entropies(fragment);
    return system_entropy_ + h_f - h_sf;
  }

 private:
  int sites_;
  double system_entropy_ = 0.0;
  std::optional<FragmentEntropies<double>> real_;
  std::optional<FragmentEntropies<cplx>> complex_;
};

std::vector<std::uint32_t> all_combinations(int n, int l) {
  std::vector<std::uint32_t> out;
  out.reserve(binomial(n, l));
  if (l == 0) return {0U};
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t word = (std::uint64_t{1} << l) - 1;
  while (word < limit) {
    out.push_back(static_cast<std::uint32_t>(word));
    const std::uint64_t lowest = word & (~word + 1);
    const std::uint64_t ripple = word + lowest;
    word = (((ripple ^ word) >> 2) / lowest) | ripple;
  }
  return out;
}

// k distinct ranks in [0, n), Floyd's algorithm, returned ascending.
std::vector<std::uint64_t> sample_ranks(std::uint64_t n, std::size_t k, std::uint64_t seed) {
  Engine engine(seed);
  std::set<std::uint64_t> chosen;
  for (std::uint64_t j = n - k; j < n; ++j) {
    const std::uint64_t t = uniform_index(engine, j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

AveragedMI average_over(const MutualInformation& mi, int sites, int l, const FragmentSampling& mode) {
  if (l < 1 || l > sites)
    fail(ErrorCode::invalid_arguments, "fragment size " + std::to_string(l) + " outside 1.." + std::to_string(sites));
  AveragedMI out;
  out.population = binomial(sites, l);

  std::vector<std::uint32_t> fragments;
  if (std::holds_alternative<ExactEnumeration>(mode)) {
    fragments = all_combinations(sites, l);
  } else {
    const auto& s = std::get<UniformSample>(mode);
    if (s.count > out.population)
      fail(ErrorCode::sample_count_exceeds_population,
           std::to_string(s.count) + " samples requested from " + std::to_string(out.population) + " fragments");
    if (s.count == 0) fail(ErrorCode::invalid_arguments, "sample count must be positive");
    for (auto rank : sample_ranks(out.population, s.count, s.seed))
      fragments.push_back(unrank_combination(rank, sites, l));
    out.exact = false;
  }

  std::vector<double> values;
  values.reserve(fragments.size());
  for (auto f : fragments) values.push_back(mi(f));
  out.evaluations = values.size();
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (!out.exact && values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double population = static_cast<double>(out.population);
    const double fpc = population > 1.0 ? std::sqrt((population - n) / (population - 1.0)) : 0.0;
    out.stderr = sd / std::sqrt(n) * fpc;
  }
  return out;
}

}  // namespace

std::uint32_t unrank_combination(std::uint64_t rank, int n, int l) {
  if (rank >= binomial(n, l)) fail(ErrorCode::invalid_arguments, "combination rank out of range");
  std::uint32_t mask = 0;
  int c = n - 1;
  for (int i = l; i >= 1; --i) {
    while (binomial(c, i) > rank) --c;
    mask |= std::uint32_t{1} << c;
    rank -= binomial(c, i);
    --c;
  }
  return mask;
}

DensityMatrix reduced_system_fragment(const BranchState& branches, const SiteSet& fragment) {
  check_branches(branches);
  check_fragment(branches, fragment);
  FragmentEntropies<cplx> shaper(branches.phi_plus, branches.phi_minus, branches.sites);
  ComplexMatrix pp, pm;
  shaper.reshape(fragment.mask(), pp, pm);
  const Eigen::Index a = pp.rows();
  DensityMatrix out;
  out.fragment = fragment;
  out.includes_system = true;
  out.matrix.resize(2 * a, 2 * a);
  out.matrix.topLeftCorner(a, a).noalias() = pp * pp.adjoint();
  out.matrix.topRightCorner(a, a).noalias() = pp * pm.adjoint();
  out.matrix.bottomLeftCorner(a, a).noalias() = pm * pp.adjoint();
  out.matrix.bottomRightCorner(a, a).noalias() = pm * pm.adjoint();
  out.matrix *= 0.5;
  return out;
}

DensityMatrix trace_out_system(const DensityMatrix& rho_sf) {
  if (!rho_sf.includes_system || rho_sf.matrix.rows() % 2 != 0)
    fail(ErrorCode::invalid_arguments, "trace_out_system needs a system+fragment state");
  const Eigen::Index a = rho_sf.matrix.rows() / 2;
  DensityMatrix out;
  out.fragment = rho_sf.fragment;
  out.includes_system = false;
  out.matrix = rho_sf.matrix.topLeftCorner(a, a) + rho_sf.matrix.bottomRightCorner(a, a);
  return out;
}

double vn_entropy(const ComplexMatrix& rho) {
  return linalg::entropy_from_eigenvalues(linalg::hermitian_eigenvalues(rho));
}

double vn_entropy(const DensityMatrix& rho) { return vn_entropy(rho.matrix); }

double mutual_information(const BranchState& branches, const SiteSet& fragment) {
  check_fragment(branches, fragment);
  return MutualInformation(branches)(fragment.mask());
}

FragmentSampling FragmentPolicy::mode_for(int sites, int l) const {
  const std::uint64_t population = binomial(sites, l);
  if (population <= exact_limit) return ExactEnumeration{};
  return UniformSample{static_cast<std::size_t>(std::min<std::uint64_t>(sample_cap, population)),
                       stable_hash({seed, static_cast<std::uint64_t>(sites), static_cast<std::uint64_t>(l)})};
}

AveragedMI averaged_mi(const BranchState& branches, int l, const FragmentSampling& mode) {
  const MutualInformation mi(branches);
  return average_over(mi, branches.sites, l, mode);
}

RedundancyCurve lack_of_redundancy(const BranchState& branches, const FragmentPolicy& policy, double threshold) {
  const MutualInformation mi(branches);
  const int sites = branches.sites;
  RedundancyCurve curve;
  curve.sites = sites;
  curve.system_entropy = mi.system_entropy();
  if (!(curve.system_entropy > threshold))
    fail(ErrorCode::degenerate_system_entropy,
         "system entropy " + std::to_string(curve.system_entropy) + " nats at or below threshold; redundancy undefined");

  const auto n = static_cast<std::size_t>(sites);
  curve.mi_avg.assign(n, 0.0);
  curve.mi_stderr.assign(n, 0.0);
  curve.evaluations.assign(n, 0);
  curve.exact.assign(n, true);
  const double hs = curve.system_entropy;

  std::vector<bool> done(n, false);
  auto store = [&](int l, const AveragedMI& avg) {
    const auto i = static_cast<std::size_t>(l - 1);
    curve.mi_avg[i] = avg.mean;
    curve.mi_stderr[i] = avg.stderr;
    curve.evaluations[i] = avg.evaluations;
    curve.exact[i] = avg.exact;
    done[i] = true;
  };

  for (int l = 1; l <= sites; ++l) {
    if (done[static_cast<std::size_t>(l - 1)]) continue;
    const auto mode = policy.mode_for(sites, l);
    const bool exact = std::holds_alternative<ExactEnumeration>(mode);
    if (policy.use_complement_identity && l < sites && 2 * l == sites && exact) {
      // Complements pair the size-L/2 fragments among themselves.
      store(l, AveragedMI{hs, 0.0, static_cast<std::size_t>(binomial(sites, l)), binomial(sites, l), true});
      continue;
    }
    const auto avg = average_over(mi, sites, l, mode);
    store(l, avg);
    const int mirror = sites - l;
    if (policy.use_complement_identity && mirror > l && mirror < sites) {
      AveragedMI mirrored = avg;
      mirrored.mean = 2.0 * hs - avg.mean;
      store(mirror, mirrored);
    }
  }

  curve.mi_rescaled.resize(n);
  double lr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    curve.mi_rescaled[i] = curve.mi_avg[i] / hs;
    if (i + 1 < n) lr += std::abs(hs - curve.mi_avg[i]) / hs;
  }
  curve.lack_of_redundancy = lr;
  return curve;
}

}  // namespace dmbl
