#include "spectral.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "error.hpp"
#include "linalg.hpp"

namespace dmbl {

namespace {

void check_sector_operator(const OperatorMatrix& h, std::size_t cap) {
  if (!std::holds_alternative<SectorSpace>(h.space()) || !h.is_dense())
    fail(ErrorCode::invalid_arguments, "diagonalize expects a dense sector-restricted operator");
  if (h.dim() > cap)
    fail(ErrorCode::dimension_cap_exceeded,
         "sector dimension " + std::to_string(h.dim()) + " exceeds cap " + std::to_string(cap));
}

constexpr double kMinimumWidth = 1e-12;

EigenstateSelection make_selection(const RealVector& energies, double epsilon) {
  EigenstateSelection sel;
  sel.epsilon_target = epsilon;
  sel.chosen_index = nearest_normalized_index(energies, epsilon);
  const double e_min = energies[0];
  const double e_max = energies[energies.size() - 1];
  sel.energy = energies[static_cast<Eigen::Index>(sel.chosen_index)];
  sel.epsilon_achieved = (sel.energy - e_min) / (e_max - e_min);
  return sel;
}

}  // namespace

SectorSpectrum diagonalize(const OperatorMatrix& h, std::size_t dimension_cap) {
  check_sector_operator(h, dimension_cap);
  SectorSpectrum out;
  out.states = h.dense();
  out.energies = linalg::symmetric_eigensystem(out.states);
  return out;
}

std::size_t nearest_normalized_index(const RealVector& energies, double epsilon) {
  if (energies.size() == 0) fail(ErrorCode::invalid_arguments, "empty spectrum");
  const double e_min = energies[0];
  const double width = energies[energies.size() - 1] - e_min;
  if (!(width >= kMinimumWidth))
    fail(ErrorCode::degenerate_spectrum_width, "spectrum width below 1e-12; normalized energy undefined");
  std::size_t best = 0;
  double best_gap = std::abs((energies[0] - e_min) / width - epsilon);
  for (Eigen::Index i = 1; i < energies.size(); ++i) {
    const double gap = std::abs((energies[i] - e_min) / width - epsilon);
    if (gap < best_gap) {
      best_gap = gap;
      best = static_cast<std::size_t>(i);
    }
  }
  return best;
}

EigenstateSelection select_eigenstate(const SectorSpectrum& spectrum, double epsilon) {
  auto sel = make_selection(spectrum.energies, epsilon);
  sel.state = spectrum.states.col(static_cast<Eigen::Index>(sel.chosen_index));
  return sel;
}

EigenstateSelection select_eigenstate(const OperatorMatrix& h, double epsilon, std::size_t dimension_cap) {
  check_sector_operator(h, dimension_cap);
  linalg::TridiagonalEigensolver solver(h.dense());
  auto sel = make_selection(solver.eigenvalues(), epsilon);
  sel.state = solver.eigenvector(sel.chosen_index);
  return sel;
}

double bipartite_entropy(const ComplexVector& full_state, int sites, int cut) {
  if (sites < 1 || sites > kMaxSites || cut < 0 || cut > sites)
    fail(ErrorCode::invalid_arguments, "bipartite_entropy: bad cut");
  if (full_state.size() != (Eigen::Index{1} << sites))
    fail(ErrorCode::dimension_mismatch, "bipartite_entropy: expected a 2^L vector");
  // Low bits are sites 1..cut, so column-major reshape puts subsystem A on rows.
  const Eigen::Index rows = Eigen::Index{1} << cut;
  const Eigen::Index cols = Eigen::Index{1} << (sites - cut);
  const Eigen::Map<const ComplexMatrix> psi(full_state.data(), rows, cols);
  const RealVector singular = Eigen::BDCSVD<ComplexMatrix>(psi).singularValues();
  return linalg::entropy_from_eigenvalues(singular.array().square().matrix());
}

double halfchain_entropy(const RealVector& sector_state, const SectorBasis& basis) {
  const RealVector full = embed_full(sector_state, basis);
  const int sites = basis.sites();
  const int cut = sites / 2;
  const Eigen::Map<const RealMatrix> psi(full.data(), Eigen::Index{1} << cut, Eigen::Index{1} << (sites - cut));
  const RealVector singular = Eigen::BDCSVD<RealMatrix>(psi).singularValues();
  return linalg::entropy_from_eigenvalues(singular.array().square().matrix());
}

}  // namespace dmbl
