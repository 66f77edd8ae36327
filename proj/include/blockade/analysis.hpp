#pragma once

#include <vector>

#include "blockade/fock.hpp"
#include "blockade/types.hpp"

namespace blockade {

// Diagonal of rho as real probabilities.
RealVec photon_probabilities(const DensityOperator& rho);

// Total population of the listed Fock levels (the blockade manifold).
double blockade_fidelity(const DensityOperator& rho,
                         const std::vector<int>& manifold);

double mean_photon(const DensityOperator& rho);
double mean_photon(const StateVector& psi);

// 0.5 * sum |eig(rho - sigma)|.
double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);

// values(i, j) = W(q_axis(i), p_axis(j)).
struct WignerGrid {
  RealVec q_axis;
  RealVec p_axis;
  RealMat values;
};

RealVec linspace(double lo, double hi, int count);

// Displaced-parity form over beta = q + i p:
//   W(q, p) = (1/pi) sum_n (-1)^n <n| D^dag(alpha) rho D(alpha) |n>,
//   alpha = beta / sqrt(2),
// so the vacuum peaks at 1/pi, a single photon dips to -1/pi, and
// integral W dq dp = 1. P a P = -a folds the two displacements into one,
// leaving a single Laguerre walk contracted against rho per point; rows
// are distributed over the worker pool. Warns if the grid does not cover
// sqrt(2 <n>) plus tails.
WignerGrid wigner(const DensityOperator& rho, const RealVec& q_axis,
                  const RealVec& p_axis);

// Riemann sum of the grid times the cell area, for normalization checks.
double wigner_integral(const WignerGrid& grid);

}  // namespace blockade
