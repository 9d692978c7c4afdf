#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/SparseCore>

#include "basis.hpp"
#include "types.hpp"

namespace dmbl {

struct SectorSpace {
  int sites;
  int n_up;
};
struct EnvFullSpace {
  int sites;
};
struct SystemEnvSpace {
  int sites;
};
using SpaceTag = std::variant<SectorSpace, EnvFullSpace, SystemEnvSpace>;

std::size_t expected_dimension(const SpaceTag& space);

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

// Hermitian operator tagged with the space it acts on. Sector matrices are
// dense and real (they are diagonalized in full); everything acting on 2^L or
// 2^(L+1) amplitudes is sparse and complex.
class OperatorMatrix {
 public:
  OperatorMatrix(SpaceTag space, RealMatrix dense);
  OperatorMatrix(SpaceTag space, SparseMatrix sparse);

  std::size_t dim() const noexcept { return dim_; }
  const SpaceTag& space() const noexcept { return space_; }
  bool is_dense() const noexcept { return std::holds_alternative<RealMatrix>(storage_); }
  std::size_t nnz() const noexcept;

  const RealMatrix& dense() const { return std::get<RealMatrix>(storage_); }
  const SparseMatrix& sparse() const { return std::get<SparseMatrix>(storage_); }

  void apply(const ComplexVector& in, ComplexVector& out) const;
  ComplexVector apply(const ComplexVector& in) const;
  ComplexMatrix to_dense() const;

  // max_ij |A_ij - conj(A_ji)|
  double hermiticity_residual() const;

 private:
  SpaceTag space_;
  std::size_t dim_;
  std::variant<RealMatrix, SparseMatrix> storage_;
};

// Uniform random fields h_k in [-h, h] for each of the L sites.
struct DisorderRealization {
  double strength = 0.0;
  std::vector<double> fields;
  std::uint64_t seed = 0;

  // Consumes exactly L draws of the seeded engine, in site order.
  static DisorderRealization draw(int sites, double strength, std::uint64_t seed);
  static DisorderRealization uniform(int sites, double value);
};

// Periodic Heisenberg ring with spin-1/2 operators S = sigma/2, unit exchange,
// plus random longitudinal fields h_k S^z_k.
OperatorMatrix build_env_hamiltonian(const SectorBasis& basis, const DisorderRealization& realization);
OperatorMatrix build_env_hamiltonian_full(int sites, const DisorderRealization& realization);

// Environment part of the coupling: sum over sites of the bare Pauli sigma_y.
OperatorMatrix build_hse(int sites);

// sigma_z(system) (x) H_SE + lambda 1 (x) H_E on 2^(L+1) amplitudes, system qubit
// in the most significant bit (|0> = sigma_z eigenvalue +1).
OperatorMatrix build_total_hamiltonian(int sites, const DisorderRealization& realization, double lambda);

// Total S^z on the full 2^L space (diagonal).
OperatorMatrix build_total_sz(int sites);

// Branch generators lambda*H_E +/- H_SE; sign = +1 pairs with system |0>.
OperatorMatrix build_branch_generator(const OperatorMatrix& env_full, const OperatorMatrix& hse, double lambda,
                                      int sign);

}  // namespace dmbl
