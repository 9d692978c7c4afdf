#include "linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <lapacke.h>

#include "error.hpp"

namespace dmbl::linalg {

namespace {

void check_info(lapack_int info, const char* routine) {
  if (info != 0) fail(ErrorCode::non_convergence, std::string(routine) + " failed with info=" + std::to_string(info));
}

lapack_int as_int(Eigen::Index n) { return static_cast<lapack_int>(n); }

lapack_complex_double* as_lapack(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }

}  // namespace

RealVector symmetric_eigenvalues(RealMatrix a) {
  const auto n = as_int(a.rows());
  RealVector w(a.rows());
  if (n == 0) return w;
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data()), "dsyevd");
  return w;
}

RealVector hermitian_eigenvalues(ComplexMatrix a) {
  const auto n = as_int(a.rows());
  RealVector w(a.rows());
  if (n == 0) return w;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, as_lapack(a.data()), n, w.data()), "zheevd");
  return w;
}

RealVector symmetric_eigensystem(RealMatrix& a) {
  const auto n = as_int(a.rows());
  RealVector w(a.rows());
  if (n == 0) return w;
  check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, w.data()), "dsyevd");
  return w;
}

RealVector hermitian_eigensystem(ComplexMatrix& a) {
  const auto n = as_int(a.rows());
  RealVector w(a.rows());
  if (n == 0) return w;
  check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, as_lapack(a.data()), n, w.data()), "zheevd");
  return w;
}

TridiagonalEigensolver::TridiagonalEigensolver(RealMatrix a) : reflectors_(std::move(a)) {
  const auto n = as_int(reflectors_.rows());
  diagonal_.resize(n);
  off_diagonal_.resize(std::max<lapack_int>(n - 1, 1));
  tau_.resize(std::max<lapack_int>(n - 1, 1));
  if (n == 0) return;
  check_info(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, reflectors_.data(), n, diagonal_.data(), off_diagonal_.data(),
                            tau_.data()),
             "dsytrd");
  eigenvalues_ = diagonal_;
  RealVector e = off_diagonal_;
  check_info(LAPACKE_dsterf(n, eigenvalues_.data(), e.data()), "dsterf");
}

RealVector TridiagonalEigensolver::eigenvector(std::size_t index) const {
  const auto n = as_int(reflectors_.rows());
  if (index >= static_cast<std::size_t>(n)) fail(ErrorCode::invalid_arguments, "eigenvector index out of range");

  // dstein wants block structure for the requested eigenvalue; one block covering
  // the whole matrix is valid input.
  // LAPACKE NaN-checks n entries of w regardless of m.
  std::vector<double> w(static_cast<std::size_t>(n), eigenvalues_[static_cast<Eigen::Index>(index)]);
  std::vector<lapack_int> iblock{1};
  std::vector<lapack_int> isplit{n};
  std::vector<lapack_int> ifail(1);
  RealVector z(n);
  check_info(LAPACKE_dstein(LAPACK_COL_MAJOR, n, diagonal_.data(), off_diagonal_.data(), 1, w.data(), iblock.data(),
                            isplit.data(), z.data(), n, ifail.data()),
             "dstein");
  if (n > 1)
    check_info(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, 1, reflectors_.data(), n, tau_.data(), z.data(), n),
               "dormtr");
  return z;
}

double entropy_from_eigenvalues(const RealVector& p, double cutoff) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > cutoff) s -= p[i] * std::log(p[i]);
  return s;
}

}  // namespace dmbl::linalg
