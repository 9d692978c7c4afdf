#pragma once

#include <cstdint>

#include "basis.hpp"
#include "operators.hpp"
#include "types.hpp"

namespace dmbl {

// Global state (|0> (x) phi_plus + |1> (x) phi_minus)/sqrt(2) of the qubit and
// its environment, evolved from |+x> (x) xi.
struct BranchState {
  ComplexVector phi_plus;
  ComplexVector phi_minus;
  int sites = 0;
  double t = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;  // provenance of the environment realization, 0 if none
};

struct DecoherenceResult {
  cplx r;
  double purity = 1.0;
  double system_entropy = 0.0;  // nats
};

struct KrylovOptions {
  int subspace_dim = 30;
  double tol = 1e-8;
  int max_steps = 100000;
};

struct KrylovStats {
  int steps = 0;
  int rejected = 0;
  int matvecs = 0;
};

// Applies exp(-i t G) to v for Hermitian G using Lanczos with adaptive steps.
// The accumulated error estimate stays below opts.tol; the output norm is
// reset to the input norm.
ComplexVector krylov_expm(const OperatorMatrix& generator, const ComplexVector& v, double t,
                          const KrylovOptions& opts = {}, KrylovStats* stats = nullptr);

// lambda*H_E +/- H_SE on the full environment space.
class BranchGenerators {
 public:
  BranchGenerators(const OperatorMatrix& env_full, const OperatorMatrix& hse, double lambda);

  const OperatorMatrix& plus() const noexcept { return plus_; }
  const OperatorMatrix& minus() const noexcept { return minus_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
  OperatorMatrix plus_;
  OperatorMatrix minus_;
};

// lambda = 0: phi_+/- are product rotations exp(-/+ i t sigma_y) on every site.
BranchState propagate_lambda0(const ComplexVector& xi_full, int sites, double t);

BranchState propagate_krylov(const ComplexVector& xi_full, const BranchGenerators& generators, double t,
                             const KrylovOptions& opts = {});
BranchState propagate_krylov(const ComplexVector& xi_full, double lambda, const OperatorMatrix& env_full,
                             const OperatorMatrix& hse, double t, const KrylovOptions& opts = {});

DecoherenceResult decoherence_factor(const BranchState& branches);

// Binary entropy of a qubit whose Bloch vector has length |r|.
double qubit_entropy(double abs_r);

// <xi|exp(-2itH_SE)|xi> next to its truncated form cos 2t - i sin 2t <xi|H_SE|xi>.
struct TruncatedExpansion {
  cplx exact;
  cplx expanded;
};
TruncatedExpansion truncated_expansion(const RealVector& xi_sector, const SectorBasis& basis, double t);

}  // namespace dmbl
