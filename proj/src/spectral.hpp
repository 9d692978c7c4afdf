#pragma once

#include <cstddef>

#include "basis.hpp"
#include "operators.hpp"
#include "types.hpp"

namespace dmbl {

inline constexpr std::size_t kDefaultDimensionCap = 3432;  // C(14, 7)

struct SectorSpectrum {
  RealVector energies;  // ascending
  RealMatrix states;    // column i pairs with energies[i]

  double e_min() const { return energies[0]; }
  double e_max() const { return energies[energies.size() - 1]; }
};

struct EigenstateSelection {
  double epsilon_target = 0.0;
  std::size_t chosen_index = 0;
  double epsilon_achieved = 0.0;
  double energy = 0.0;
  RealVector state;
};

SectorSpectrum diagonalize(const OperatorMatrix& h, std::size_t dimension_cap = kDefaultDimensionCap);

// Index minimizing |(E_i - E_min)/(E_max - E_min) - epsilon|, lower index on ties.
std::size_t nearest_normalized_index(const RealVector& ascending_energies, double epsilon);

EigenstateSelection select_eigenstate(const SectorSpectrum& spectrum, double epsilon);

// Same selection without forming the whole eigenbasis: one tridiagonal
// reduction, all eigenvalues, and a single back-transformed eigenvector.
EigenstateSelection select_eigenstate(const OperatorMatrix& h, double epsilon,
                                      std::size_t dimension_cap = kDefaultDimensionCap);

// Von Neumann entropy (nats) of sites {1..cut} for a full-space pure state.
double bipartite_entropy(const ComplexVector& full_state, int sites, int cut);

// Half-chain entropy with cut floor(L/2).
double halfchain_entropy(const RealVector& sector_state, const SectorBasis& basis);

}  // namespace dmbl
