#pragma once

#include <cstddef>

#include "types.hpp"

// Thin LAPACK-backed dense Hermitian eigensolvers.
namespace dmbl::linalg {

// Ascending eigenvalues. The argument is used as workspace.
RealVector symmetric_eigenvalues(RealMatrix a);
RealVector hermitian_eigenvalues(ComplexMatrix a);

// Ascending eigenvalues; `a` is overwritten by the orthonormal eigenvectors.
RealVector symmetric_eigensystem(RealMatrix& a);
RealVector hermitian_eigensystem(ComplexMatrix& a);

// Reduces a real symmetric matrix to tridiagonal form once, then serves the
// full spectrum and individual eigenvectors without a full back-transform.
class TridiagonalEigensolver {
 public:
  explicit TridiagonalEigensolver(RealMatrix a);

  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  RealVector eigenvector(std::size_t index) const;

 private:
  RealMatrix reflectors_;
  RealVector diagonal_;
  RealVector off_diagonal_;
  RealVector tau_;
  RealVector eigenvalues_;
};

// -sum p ln p over eigenvalues above `cutoff`.
double entropy_from_eigenvalues(const RealVector& p, double cutoff = 1e-12);

}  // namespace dmbl::linalg
