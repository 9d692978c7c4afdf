#include "brute_force.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {

const cplx I{0.0, 1.0};

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

CMat identity2() { return CMat::Identity(2, 2); }

CMat spin_x() {
  CMat m(2, 2);
  m << 0.0, 0.5, 0.5, 0.0;
  return m;
}

CMat spin_y() {
  // Standard S^y in the (up, down) basis, reordered to (down, up).
  CMat m(2, 2);
  m << 0.0, 0.5 * I, -0.5 * I, 0.0;
  return m;
}

CMat spin_z() {
  CMat m(2, 2);
  m << -0.5, 0.0, 0.0, 0.5;
  return m;
}

CMat coupling_y() {
  CMat m(2, 2);
  m << 0.0, -I, I, 0.0;
  return m;
}

CMat system_z() {
  CMat m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

CMat on_bit(const CMat& op, int bit, int bits) {
  // Kronecker order puts the most significant bit leftmost.
  CMat out = CMat::Identity(1, 1);
  for (int b = bits - 1; b >= 0; --b) out = kron(out, b == bit ? op : identity2());
  return out;
}

namespace {

// op on bits a and b (a != b) as one Kronecker chain.
CMat on_two_bits(const CMat& op, int a, int b, int bits) {
  CMat out = CMat::Identity(1, 1);
  for (int q = bits - 1; q >= 0; --q) out = kron(out, (q == a || q == b) ? op : identity2());
  return out;
}

}  // namespace

CMat heisenberg_ring(int sites, const std::vector<double>& fields) {
  const Eigen::Index dim = Eigen::Index{1} << sites;
  CMat h = CMat::Zero(dim, dim);
  const CMat sx = spin_x(), sy = spin_y(), sz = spin_z();
  for (int k = 0; k < sites; ++k) {
    const int n = (k + 1) % sites;
    for (const CMat* s : {&sx, &sy, &sz}) h += on_two_bits(*s, k, n, sites);
    h += fields[static_cast<std::size_t>(k)] * on_bit(sz, k, sites);
  }
  return h;
}

CMat coupling(int sites) {
  const Eigen::Index dim = Eigen::Index{1} << sites;
  CMat h = CMat::Zero(dim, dim);
  for (int k = 0; k < sites; ++k) h += on_bit(coupling_y(), k, sites);
  return h;
}

CMat total_hamiltonian(int sites, const std::vector<double>& fields, double lambda) {
  return kron(system_z(), coupling(sites)) + lambda * kron(identity2(), heisenberg_ring(sites, fields));
}

std::vector<std::uint32_t> sector_words(int sites, int n_up) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t w = 0; w < (1u << sites); ++w)
    if (std::popcount(w) == n_up) out.push_back(w);
  return out;
}

SectorEigenstate eigenstate(int sites, int n_up, const std::vector<double>& fields, double epsilon) {
  const CMat h = heisenberg_ring(sites, fields);
  const auto words = sector_words(sites, n_up);
  const auto n = static_cast<Eigen::Index>(words.size());
  CMat block(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) block(i, j) = h(words[static_cast<std::size_t>(i)], words[static_cast<std::size_t>(j)]);
  Eigen::SelfAdjointEigenSolver<CMat> es(block);
  const RVec& e = es.eigenvalues();
  const double width = e[n - 1] - e[0];
  std::size_t best = 0;
  double best_dist = 1e300;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs((e[i] - e[0]) / width - epsilon);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<std::size_t>(i);
    }
  }
  SectorEigenstate out;
  out.index = best;
  out.epsilon = (e[static_cast<Eigen::Index>(best)] - e[0]) / width;
  out.full = CVec::Zero(Eigen::Index{1} << sites);
  for (Eigen::Index i = 0; i < n; ++i) out.full[words[static_cast<std::size_t>(i)]] = es.eigenvectors()(i, static_cast<Eigen::Index>(best));
  return out;
}

CMat expm_hermitian(const CMat& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  CVec phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases[i] = std::exp(-I * t * es.eigenvalues()[i]);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CVec evolve(const CMat& h, const CVec& v, double t) { return expm_hermitian(h, t) * v; }

CMat partial_trace(const CVec& psi, const std::vector<int>& keep, int bits) {
  const CMat rho = psi * psi.adjoint();
  std::uint32_t keep_mask = 0;
  for (int b : keep) keep_mask |= 1u << b;
  const auto kept = static_cast<int>(keep.size());
  auto packed = [&](std::uint32_t w) {
    std::uint32_t out = 0;
    for (int i = 0; i < kept; ++i)
      if (w >> keep[static_cast<std::size_t>(i)] & 1u) out |= 1u << i;
    return out;
  };
  CMat out = CMat::Zero(Eigen::Index{1} << kept, Eigen::Index{1} << kept);
  const std::uint32_t dim = 1u << bits;
  for (std::uint32_t a = 0; a < dim; ++a)
    for (std::uint32_t b = 0; b < dim; ++b)
      if ((a & ~keep_mask) == (b & ~keep_mask)) out(packed(a), packed(b)) += rho(a, b);
  return out;
}

double entropy(const CMat& rho) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i) {
    const double p = es.eigenvalues()[i];
    if (p > 1e-14) s -= p * std::log(p);
  }
  return s;
}

double reduced_entropy(const CVec& psi, std::uint32_t keep_mask, int bits) {
  const std::uint32_t full = (1u << bits) - 1;
  const std::uint32_t rows_mask = std::popcount(keep_mask) <= bits / 2 ? keep_mask : (full & ~keep_mask);
  const std::uint32_t cols_mask = full & ~rows_mask;
  const int r = std::popcount(rows_mask), c = bits - r;
  auto gather = [](std::uint32_t w, std::uint32_t mask) {
    std::uint32_t out = 0;
    int j = 0;
    for (int b = 0; b < 32; ++b)
      if (mask >> b & 1u) out |= (w >> b & 1u) << j++;
    return out;
  };
  CMat m = CMat::Zero(Eigen::Index{1} << r, Eigen::Index{1} << c);
  for (std::uint32_t w = 0; w <= full; ++w) m(gather(w, rows_mask), gather(w, cols_mask)) = psi[w];
  return entropy(m * m.adjoint());
}

CMat Pipeline::rho_sf(std::uint32_t fragment_mask) const {
  std::vector<int> keep;
  for (int b = 0; b < sites; ++b)
    if (fragment_mask >> b & 1u) keep.push_back(b);
  keep.push_back(sites);
  return partial_trace(psi, keep, sites + 1);
}

double Pipeline::mutual_information(std::uint32_t fragment_mask) const {
  if (reshaped)
    return system_entropy + reduced_entropy(psi, fragment_mask, sites + 1) -
           reduced_entropy(psi, fragment_mask | (1u << sites), sites + 1);
  std::vector<int> frag;
  for (int b = 0; b < sites; ++b)
    if (fragment_mask >> b & 1u) frag.push_back(b);
  return system_entropy + entropy(partial_trace(psi, frag, sites + 1)) - entropy(rho_sf(fragment_mask));
}

std::vector<double> Pipeline::averaged_mi() const {
  std::vector<double> sum(static_cast<std::size_t>(sites), 0.0);
  std::vector<int> count(static_cast<std::size_t>(sites), 0);
  for (std::uint32_t m = 1; m < (1u << sites); ++m) {
    const auto l = static_cast<std::size_t>(std::popcount(m) - 1);
    sum[l] += mutual_information(m);
    ++count[l];
  }
  for (std::size_t l = 0; l < sum.size(); ++l) sum[l] /= count[l];
  return sum;
}

double Pipeline::lack_of_redundancy() const {
  const auto mi = averaged_mi();
  double lr = 0.0;
  for (int l = 1; l < sites; ++l) lr += std::abs(system_entropy - mi[static_cast<std::size_t>(l - 1)]) / system_entropy;
  return lr;
}

Pipeline run(int sites, const std::vector<double>& fields, const CVec& xi_full, double lambda, double t) {
  const Eigen::Index env_dim = Eigen::Index{1} << sites;
  CVec psi0(2 * env_dim);
  psi0.head(env_dim) = xi_full / std::sqrt(2.0);  // system bit 0
  psi0.tail(env_dim) = xi_full / std::sqrt(2.0);  // system bit 1
  Pipeline p;
  p.sites = sites;
  p.psi = evolve(total_hamiltonian(sites, fields, lambda), psi0, t);
  p.reshaped = sites > 7;
  p.system_entropy = p.reshaped ? reduced_entropy(p.psi, 1u << sites, sites + 1)
                                : entropy(partial_trace(p.psi, {sites}, sites + 1));
  return p;
}

double halfchain_entropy(const CVec& full, int sites, int cut) {
  std::vector<int> keep;
  for (int b = 0; b < cut; ++b) keep.push_back(b);
  return entropy(partial_trace(full, keep, sites));
}

}  // namespace oracle
