#pragma once

// Reference implementations for tests. Nothing here calls into the library's
// physics code: operators come from explicit Kronecker products, time
// evolution from a dense eigendecomposition and reduced states from explicit
// partial traces of the full density matrix.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Single-qubit matrices in bit order (row/column 0 = bit value 0).
CMat identity2();
CMat spin_x();  // S^x
CMat spin_y();  // S^y for bit 1 = up
CMat spin_z();  // S^z, bit 1 = up
CMat coupling_y();  // the coupling's sigma_y convention: <0|s|1> = -i
CMat system_z();  // +1 on bit value 0

// Operator acting as `op` on bit `bit` of an n-bit register.
CMat on_bit(const CMat& op, int bit, int bits);

CMat heisenberg_ring(int sites, const std::vector<double>& fields);
CMat coupling(int sites);  // sum_k coupling_y on bit k-1
CMat total_hamiltonian(int sites, const std::vector<double>& fields, double lambda);

// Brute-force search over all 2^L words.
std::vector<std::uint32_t> sector_words(int sites, int n_up);

struct SectorEigenstate {
  std::size_t index = 0;
  double epsilon = 0.0;
  CVec full;  // embedded in 2^L
};
SectorEigenstate eigenstate(int sites, int n_up, const std::vector<double>& fields, double epsilon);

CMat expm_hermitian(const CMat& h, double t);  // exp(-i t h)
CVec evolve(const CMat& h, const CVec& v, double t);

// Keeps the listed bits (packed in increasing bit order) of an n-bit pure state.
CMat partial_trace(const CVec& psi, const std::vector<int>& keep, int bits);
double entropy(const CMat& rho);

// Entropy of the kept bits computed from the reshaped state (rows: kept bits,
// columns: the rest) using whichever side is smaller. For larger registers.
double reduced_entropy(const CVec& psi, std::uint32_t keep_mask, int bits);

struct Pipeline {
  int sites = 0;
  CVec psi;  // |psi(t)> on L+1 bits, system = bit L
  bool reshaped = false;  // entropies via reduced_entropy instead of explicit traces
  double system_entropy = 0.0;
  CMat rho_sf(std::uint32_t fragment_mask) const;
  double mutual_information(std::uint32_t fragment_mask) const;
  std::vector<double> averaged_mi() const;  // l = 1..L, all fragments
  double lack_of_redundancy() const;
};

// |+x> (x) xi evolved with the dense total Hamiltonian.
Pipeline run(int sites, const std::vector<double>& fields, const CVec& xi_full, double lambda, double t);

// Half-chain entropy of a 2^L state, sites 1..cut on the low bits.
double halfchain_entropy(const CVec& full, int sites, int cut);

}  // namespace oracle
