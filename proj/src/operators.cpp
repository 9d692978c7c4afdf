#include "operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace dmbl {

namespace {

using Triplet = Eigen::Triplet<cplx>;

void check_sites(int sites, int minimum, const char* what) {
  if (sites < minimum || sites > kMaxSites)
    fail(ErrorCode::invalid_arguments, std::string(what) + ": L=" + std::to_string(sites) + " outside [" +
                                           std::to_string(minimum) + ", " + std::to_string(kMaxSites) + "]");
}

void check_fields(int sites, const DisorderRealization& realization) {
  if (realization.fields.size() != static_cast<std::size_t>(sites))
    fail(ErrorCode::invalid_arguments, "disorder realization has " + std::to_string(realization.fields.size()) +
                                           " fields for L=" + std::to_string(sites));
}

// Diagonal (Ising + field) energy of a configuration word.
double diagonal_energy(std::uint32_t config, int sites, const std::vector<double>& fields) {
  double e = 0.0;
  for (int k = 0; k < sites; ++k) {
    const int next = (k + 1) % sites;
    const bool up_k = (config >> k) & 1U;
    const bool up_next = (config >> next) & 1U;
    e += (up_k == up_next) ? 0.25 : -0.25;
    e += fields[static_cast<std::size_t>(k)] * (up_k ? 0.5 : -0.5);
  }
  return e;
}

SparseMatrix from_triplets(std::size_t dim, const std::vector<Triplet>& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

std::size_t expected_dimension(const SpaceTag& space) {
  return std::visit(
      [](const auto& s) -> std::size_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SectorSpace>) return binomial(s.sites, s.n_up);
        if constexpr (std::is_same_v<T, EnvFullSpace>) return std::size_t{1} << s.sites;
        if constexpr (std::is_same_v<T, SystemEnvSpace>) return std::size_t{1} << (s.sites + 1);
      },
      space);
}

OperatorMatrix::OperatorMatrix(SpaceTag space, RealMatrix dense)
    : space_(space), dim_(expected_dimension(space)), storage_(std::move(dense)) {
  const auto& m = std::get<RealMatrix>(storage_);
  if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_)
    fail(ErrorCode::dimension_mismatch, "operator storage does not match its space tag");
}

OperatorMatrix::OperatorMatrix(SpaceTag space, SparseMatrix sparse)
    : space_(space), dim_(expected_dimension(space)), storage_(std::move(sparse)) {
  const auto& m = std::get<SparseMatrix>(storage_);
  if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_)
    fail(ErrorCode::dimension_mismatch, "operator storage does not match its space tag");
}

std::size_t OperatorMatrix::nnz() const noexcept {
  if (is_dense()) return static_cast<std::size_t>((dense().array() != 0.0).count());
  return static_cast<std::size_t>(sparse().nonZeros());
}

void OperatorMatrix::apply(const ComplexVector& in, ComplexVector& out) const {
  if (static_cast<std::size_t>(in.size()) != dim_)
    fail(ErrorCode::dimension_mismatch, "operator apply: vector dimension mismatch");
  if (is_dense())
    out.noalias() = dense().cast<cplx>() * in;
  else
    out.noalias() = sparse() * in;
}

ComplexVector OperatorMatrix::apply(const ComplexVector& in) const {
  ComplexVector out(in.size());
  apply(in, out);
  return out;
}

ComplexMatrix OperatorMatrix::to_dense() const {
  if (is_dense()) return dense().cast<cplx>();
  return ComplexMatrix(sparse());
}

double OperatorMatrix::hermiticity_residual() const {
  if (is_dense()) return (dense() - dense().transpose()).cwiseAbs().maxCoeff();
  const SparseMatrix diff = sparse() - SparseMatrix(sparse().adjoint());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

DisorderRealization DisorderRealization::draw(int sites, double strength, std::uint64_t seed) {
  if (sites < 1) fail(ErrorCode::invalid_arguments, "disorder draw: L must be positive");
  if (!(strength >= 0.0) || !std::isfinite(strength))
    fail(ErrorCode::invalid_arguments, "disorder draw: strength must be finite and >= 0");
  DisorderRealization out;
  out.strength = strength;
  out.seed = seed;
  out.fields.reserve(static_cast<std::size_t>(sites));
  Engine engine(seed);
  for (int k = 0; k < sites; ++k) out.fields.push_back(strength * (2.0 * uniform01(engine) - 1.0));
  return out;
}

DisorderRealization DisorderRealization::uniform(int sites, double value) {
  DisorderRealization out;
  out.strength = std::abs(value);
  out.fields.assign(static_cast<std::size_t>(sites), value);
  return out;
}

OperatorMatrix build_env_hamiltonian(const SectorBasis& basis, const DisorderRealization& realization) {
  const int sites = basis.sites();
  check_sites(sites, 3, "build_env_hamiltonian");
  check_fields(sites, realization);

  const auto dim = static_cast<Eigen::Index>(basis.size());
  RealMatrix h = RealMatrix::Zero(dim, dim);
  const auto configs = basis.configs();
  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t c = configs[static_cast<std::size_t>(col)];
    h(col, col) = diagonal_energy(c, sites, realization.fields);
    for (int k = 0; k < sites; ++k) {
      const int next = (k + 1) % sites;
      if (((c >> k) & 1U) == ((c >> next) & 1U)) continue;
      const std::uint32_t flipped = c ^ ((1U << k) | (1U << next));
      const auto row = basis.index_of(flipped);
      h(static_cast<Eigen::Index>(*row), col) += 0.5;
    }
  }
  return OperatorMatrix(SectorSpace{sites, basis.n_up()}, std::move(h));
}

OperatorMatrix build_env_hamiltonian_full(int sites, const DisorderRealization& realization) {
  check_sites(sites, 3, "build_env_hamiltonian_full");
  check_fields(sites, realization);

  const std::size_t dim = std::size_t{1} << sites;
  std::vector<Triplet> triplets;
  triplets.reserve(dim * static_cast<std::size_t>(sites / 2 + 1));
  for (std::size_t col = 0; col < dim; ++col) {
    const auto c = static_cast<std::uint32_t>(col);
    triplets.emplace_back(col, col, diagonal_energy(c, sites, realization.fields));
    for (int k = 0; k < sites; ++k) {
      const int next = (k + 1) % sites;
      if (((c >> k) & 1U) == ((c >> next) & 1U)) continue;
      triplets.emplace_back(c ^ ((1U << k) | (1U << next)), col, 0.5);
    }
  }
  return OperatorMatrix(EnvFullSpace{sites}, from_triplets(dim, triplets));
}

OperatorMatrix build_hse(int sites) {
  check_sites(sites, 1, "build_hse");
  const std::size_t dim = std::size_t{1} << sites;
  const cplx i_unit{0.0, 1.0};
  std::vector<Triplet> triplets;
  triplets.reserve(dim * static_cast<std::size_t>(sites));
  // sigma_y in bit order is [[0, -i], [i, 0]]: <1|s|0> = i, <0|s|1> = -i.
  for (std::size_t col = 0; col < dim; ++col) {
    for (int l = 0; l < sites; ++l) {
      const std::size_t row = col ^ (std::size_t{1} << l);
      const bool bit_set = (col >> l) & 1U;
      triplets.emplace_back(row, col, bit_set ? -i_unit : i_unit);
    }
  }
  return OperatorMatrix(EnvFullSpace{sites}, from_triplets(dim, triplets));
}

OperatorMatrix build_total_sz(int sites) {
  check_sites(sites, 1, "build_total_sz");
  const std::size_t dim = std::size_t{1} << sites;
  std::vector<Triplet> triplets;
  triplets.reserve(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    const double sz = 0.5 * (2.0 * std::popcount(x) - sites);
    if (sz != 0.0) triplets.emplace_back(x, x, sz);
  }
  return OperatorMatrix(EnvFullSpace{sites}, from_triplets(dim, triplets));
}

OperatorMatrix build_branch_generator(const OperatorMatrix& env_full, const OperatorMatrix& hse, double lambda,
                                      int sign) {
  if (env_full.dim() != hse.dim() || env_full.is_dense() || hse.is_dense())
    fail(ErrorCode::dimension_mismatch, "branch generator: operators must share the full environment space");
  const double s = sign >= 0 ? 1.0 : -1.0;
  SparseMatrix g = lambda * env_full.sparse() + s * hse.sparse();
  g.prune(cplx{0.0, 0.0});
  return OperatorMatrix(hse.space(), std::move(g));
}

OperatorMatrix build_total_hamiltonian(int sites, const DisorderRealization& realization, double lambda) {
  check_sites(sites, 3, "build_total_hamiltonian");
  const auto env = build_env_hamiltonian_full(sites, realization);
  const auto hse = build_hse(sites);
  const auto top = build_branch_generator(env, hse, lambda, +1);
  const auto bottom = build_branch_generator(env, hse, lambda, -1);

  const std::size_t half = std::size_t{1} << sites;
  std::vector<Triplet> triplets;
  triplets.reserve(top.nnz() + bottom.nnz());
  for (int block = 0; block < 2; ++block) {
    const SparseMatrix& m = (block == 0 ? top : bottom).sparse();
    const std::size_t offset = block * half;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(m, k); it; ++it)
        triplets.emplace_back(offset + it.row(), offset + it.col(), it.value());
  }
  return OperatorMatrix(SystemEnvSpace{sites}, from_triplets(2 * half, triplets));
}

}  // namespace dmbl
