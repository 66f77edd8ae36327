#pragma once

#include "blockade/fock.hpp"
#include "blockade/types.hpp"

namespace blockade {

// Weights of the even and odd photon-number sectors plus their ratio
// r = p_odd / p_even. A state with no even-sector weight gets ratio_r = +inf.
struct ParitySplit {
  double p_even = 0.0;
  double p_odd = 0.0;
  double ratio_r = 0.0;
};

ParitySplit parity_split(const StateVector& psi);
ParitySplit parity_split(const DensityOperator& rho);

StateVector fock_state(FockSpace space, int m);

// c_n = e^{-|alpha|^2/2} alpha^n / sqrt(n!), renormalized after truncation.
// Warns when |alpha|^2 + 5|alpha| >= dim or the discarded weight exceeds 1e-8.
StateVector coherent_state(FockSpace space, Cplx alpha);

// N (|alpha> + e^{i phi} |-alpha>); phi = 0 keeps even photon numbers only,
// phi = pi keeps odd ones. alpha = 0 with phi = pi has no odd component and
// is rejected.
StateVector cat_state(FockSpace space, Cplx alpha, double phi);

// Displaced squeezed state D(alpha) S(xi) |0>, xi = |xi| e^{i arg xi}.
// Amplitudes follow the Hermite-polynomial form; xi = 0 reduces to the
// coherent state, alpha = 0 to squeezed vacuum (odd amplitudes exactly zero).
StateVector squeezed_state(FockSpace space, Cplx alpha, Cplx xi);

// D(alpha) |n0>: column n0 of the displacement matrix.
StateVector displaced_number_state(FockSpace space, Cplx alpha, int n0);

// Geometric photon-number distribution with mean mean_n >= 0.
DensityOperator thermal_state(FockSpace space, double mean_n);

// a^dag rho_thermal a, renormalized: p_n proportional to n q^n with
// q = (mean_n - 1)/(mean_n + 1). Needs mean_n >= 1; mean_n = 1 is |1><1|.
DensityOperator photon_added_thermal_state(FockSpace space, double mean_n);

enum class StateFamily { Coherent, Thermal, PhotonAddedThermal, Cat };

struct FamilyParams {
  Cplx alpha{0.0, 0.0};
  double phi = 0.0;
  double mean_n = 0.0;
};

// Closed-form parity weights, no truncation involved:
//   coherent:            p_even = (1 + e^{-2|alpha|^2}) / 2
//   thermal:             p_even = (1 + mean_n) / (1 + 2 mean_n)
//   photon-added thermal p_even = 2q / (1+q)^2,  q as above
//   cat:                 p_even = cos^2(phi/2)(1 + e^{-2|a|^2}) / (1 + cos phi e^{-2|a|^2})
ParitySplit closed_form_parity(StateFamily family, const FamilyParams& params);

}  // namespace blockade
