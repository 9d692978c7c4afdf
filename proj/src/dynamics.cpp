#include "dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "error.hpp"

namespace dmbl {

namespace {

// In-place product of per-site rotations [[c, -s*sign], [s*sign, c]] in bit order,
// i.e. exp(-i sign t sigma_y) on every site.
void apply_product_rotation(ComplexVector& v, int sites, double t, int sign) {
  const double c = std::cos(t);
  const double s = std::sin(t) * (sign >= 0 ? 1.0 : -1.0);
  const Eigen::Index dim = v.size();
  for (int l = 0; l < sites; ++l) {
    const Eigen::Index stride = Eigen::Index{1} << l;
    for (Eigen::Index base = 0; base < dim; base += 2 * stride) {
      for (Eigen::Index x = base; x < base + stride; ++x) {
        const cplx a0 = v[x];
        const cplx a1 = v[x + stride];
        v[x] = c * a0 - s * a1;
        v[x + stride] = s * a0 + c * a1;
      }
    }
  }
}

// Residual below which the Krylov space is invariant and the step is exact.
constexpr double kBreakdown = 1e-12;

void check_full(const ComplexVector& v, int sites) {
  if (sites < 1 || sites > kMaxSites || v.size() != (Eigen::Index{1} << sites))
    fail(ErrorCode::dimension_mismatch, "expected a 2^L environment vector");
}

}  // namespace

ComplexVector krylov_expm(const OperatorMatrix& generator, const ComplexVector& v, double t,
                          const KrylovOptions& opts, KrylovStats* stats) {
  if (static_cast<std::size_t>(v.size()) != generator.dim())
    fail(ErrorCode::dimension_mismatch, "krylov_expm: vector dimension mismatch");
  if (!(opts.tol > 0.0) || opts.subspace_dim < 2 || opts.max_steps < 1)
    fail(ErrorCode::invalid_arguments, "krylov_expm: invalid options");

  KrylovStats local;
  ComplexVector w = v;
  const double norm0 = v.norm();
  const double total = std::abs(t);
  const double direction = t >= 0.0 ? 1.0 : -1.0;
  if (norm0 == 0.0 || total == 0.0) return w;

  const Eigen::Index n = v.size();
  const int m_max = static_cast<int>(std::min<Eigen::Index>(opts.subspace_dim, n));
  ComplexMatrix basis(n, m_max);
  ComplexVector work(n);
  std::vector<double> alpha, beta;
  double remaining = total;
  double dt_try = total;

  while (remaining > 0.0) {
    if (++local.steps > opts.max_steps)
      fail(ErrorCode::non_convergence, "krylov_expm: exceeded " + std::to_string(opts.max_steps) + " steps");

    const double w_norm = w.norm();
    basis.col(0) = w / w_norm;
    alpha.clear();
    beta.clear();
    int k = 0;
    double next_beta = 0.0;
    bool exact_subspace = false;

    // Lanczos with full reorthogonalization.
    for (k = 0; k < m_max; ++k) {
      generator.apply(basis.col(k), work);
      ++local.matvecs;
      const double a = basis.col(k).dot(work).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        const ComplexVector overlaps = basis.leftCols(k + 1).adjoint() * work;
        work.noalias() -= basis.leftCols(k + 1) * overlaps;
      }
      next_beta = work.norm();
      if (next_beta < kBreakdown) {
        exact_subspace = true;
        ++k;
        break;
      }
      if (k + 1 < m_max) {
        beta.push_back(next_beta);
        basis.col(k + 1) = work / next_beta;
      }
    }
    const int dim_k = exact_subspace ? k : m_max;

    Eigen::VectorXd diag(dim_k), sub(std::max(dim_k - 1, 0));
    for (int i = 0; i < dim_k; ++i) diag[i] = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < dim_k; ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = tri.eigenvectors();
    const Eigen::VectorXd& theta = tri.eigenvalues();

    double dt = std::min(dt_try, remaining);
    ComplexVector y(dim_k);
    for (;;) {
      // y = exp(-i dir dt T) e1
      ComplexVector phase(dim_k);
      for (int i = 0; i < dim_k; ++i)
        phase[i] = std::polar(q(0, i), -direction * dt * theta[i]);
      y = q.cast<cplx>() * phase;
      const double allowed = 0.5 * opts.tol * dt / total;
      const double err = exact_subspace ? 0.0 : w_norm * next_beta * std::abs(y[dim_k - 1]) / norm0;
      if (err <= allowed || dt < 1e-300) {
        if (!exact_subspace && err > 0.0)
          dt_try = dt * std::min(2.0, 0.9 * std::pow(allowed / err, 1.0 / dim_k));
        else
          dt_try = 2.0 * dt;
        break;
      }
      ++local.rejected;
      dt *= std::clamp(0.9 * std::pow(allowed / err, 1.0 / dim_k), 0.1, 0.9);
    }
    w = w_norm * (basis.leftCols(dim_k) * y);
    remaining -= dt;
    if (remaining < 1e-15 * total) remaining = 0.0;
  }

  w *= norm0 / w.norm();
  if (stats) *stats = local;
  return w;
}

BranchGenerators::BranchGenerators(const OperatorMatrix& env_full, const OperatorMatrix& hse, double lambda)
    : lambda_(lambda),
      plus_(build_branch_generator(env_full, hse, lambda, +1)),
      minus_(build_branch_generator(env_full, hse, lambda, -1)) {
  if (!(lambda >= 0.0)) fail(ErrorCode::invalid_arguments, "lambda must be >= 0");
}

BranchState propagate_lambda0(const ComplexVector& xi_full, int sites, double t) {
  check_full(xi_full, sites);
  BranchState out;
  out.sites = sites;
  out.t = t;
  out.phi_plus = xi_full;
  out.phi_minus = xi_full;
  apply_product_rotation(out.phi_plus, sites, t, +1);
  apply_product_rotation(out.phi_minus, sites, t, -1);
  return out;
}

BranchState propagate_krylov(const ComplexVector& xi_full, const BranchGenerators& generators, double t,
                             const KrylovOptions& opts) {
  const auto* tag = std::get_if<EnvFullSpace>(&generators.plus().space());
  if (tag == nullptr) fail(ErrorCode::invalid_arguments, "propagate_krylov: generators must act on env_full");
  check_full(xi_full, tag->sites);
  BranchState out;
  out.sites = tag->sites;
  out.t = t;
  out.lambda = generators.lambda();
  out.phi_plus = krylov_expm(generators.plus(), xi_full, t, opts);
  out.phi_minus = krylov_expm(generators.minus(), xi_full, t, opts);
  return out;
}

BranchState propagate_krylov(const ComplexVector& xi_full, double lambda, const OperatorMatrix& env_full,
                             const OperatorMatrix& hse, double t, const KrylovOptions& opts) {
  return propagate_krylov(xi_full, BranchGenerators(env_full, hse, lambda), t, opts);
}

double qubit_entropy(double abs_r) {
  const double r = std::clamp(abs_r, 0.0, 1.0);
  double h = 0.0;
  for (double p : {0.5 * (1.0 + r), 0.5 * (1.0 - r)})
    if (p > 1e-12) h -= p * std::log(p);
  return h;
}

DecoherenceResult decoherence_factor(const BranchState& branches) {
  if (branches.phi_plus.size() != branches.phi_minus.size())
    fail(ErrorCode::dimension_mismatch, "branch vectors differ in dimension");
  DecoherenceResult out;
  out.r = branches.phi_minus.dot(branches.phi_plus);
  const double abs_r = std::abs(out.r);
  out.purity = 0.5 * (1.0 + abs_r * abs_r);
  out.system_entropy = qubit_entropy(abs_r);
  return out;
}

TruncatedExpansion truncated_expansion(const RealVector& xi_sector, const SectorBasis& basis, double t) {
  const ComplexVector xi = embed_full(RealVector(xi_sector), basis).cast<cplx>();
  ComplexVector rotated = xi;
  apply_product_rotation(rotated, basis.sites(), 2.0 * t, +1);
  const cplx hse_mean = xi.dot(build_hse(basis.sites()).apply(xi));
  TruncatedExpansion out;
  out.exact = xi.dot(rotated);
  out.expanded = std::cos(2.0 * t) - cplx{0.0, 1.0} * std::sin(2.0 * t) * hse_mean;
  return out;
}

}  // namespace dmbl
