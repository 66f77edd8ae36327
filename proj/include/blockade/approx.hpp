#pragma once

#include "blockade/fock.hpp"
#include "blockade/types.hpp"

namespace blockade {

// The two tuned two-photon-driven models with closed-form weak-drive
// steady states: TwoLevel02 couples |0> and |2> (tuning k,l = 0,2),
// TwoLevel13 couples |1> and |3> (tuning 1,3).
enum class ApproxModel { TwoLevel02, TwoLevel13 };

// Small parameters delta = epsilon / chi and delta_prime = gamma2 / epsilon.
// Even-sector coefficients are second-order expansions; odd-sector ones are
// the exact rational forms unless leading_order asks for their expansions.
// Values above 1/4 leave the validity domain and warn.
struct ApproxCoefficients {
  ApproxModel model;
  Parity parity;
  double delta = 0.0;
  double delta_prime = 0.0;
  // Sector state layout (upper triangle):
  //   even: diag(p, q, r[, s]) on levels 0,2,4[,6], off-diagonals
  //         a+ib at (0,2), c+id at (0,4), e+if at (2,4)
  //   odd:  diag(p, 1-p) on levels 1,3, off-diagonal a+ib at (1,3)
  double p = 0.0, q = 0.0, r = 0.0, s = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0, f = 0.0;
};

ApproxCoefficients approx_coefficients(ApproxModel model, Parity parity,
                                       double delta, double delta_prime,
                                       bool leading_order = false);

// Assembles the sector density matrix from the coefficients. The TwoLevel13
// even state carries weight s on level 6; below dim 7 it is folded back by
// renormalization with a warning.
DensityOperator approx_steady(ApproxModel model, Parity parity, double delta,
                              double delta_prime, FockSpace space);

// Parity mixture p_even rho_even + p_odd rho_odd with weights from rho0.
DensityOperator approx_mixture(ApproxModel model, const DensityOperator& rho0,
                               double delta, double delta_prime,
                               FockSpace space);

enum class RabiModel { TwoLevel02, TwoLevel13, SinglePhoton };

struct RabiSolution {
  StateVector state;
  // Initial levels outside the resonant pairs do not oscillate at leading
  // order; those come back as the frozen |m> with this flag set.
  bool frozen = false;
};

// Dissipation-free two-level solutions at leading order:
//   TwoLevel02:  |0> <-> |2> at angular frequency sqrt(2) epsilon
//   TwoLevel13:  |1> <-> |3> at sqrt(6) epsilon, |0> <-> |4> at epsilon/5
//   SinglePhoton: |0> <-> |1> at epsilon
RabiSolution rabi_solution(FockSpace space, RabiModel model, int initial_m,
                           double epsilon, double t);

}  // namespace blockade
