#pragma once

#include <vector>

#include "blockade/fock.hpp"
#include "blockade/model.hpp"
#include "blockade/types.hpp"

namespace blockade {

// gamma2: two-photon absorption D[a^2]; gamma1: single-photon loss D[a];
// gamma_perp: pure dephasing D[n]. All rates >= 0.
struct DissipationRates {
  double gamma2 = 0.0;
  double gamma1 = 0.0;
  double gamma_perp = 0.0;
};

void validate(const DissipationRates& rates);

// True when the generator commutes with photon parity: two-photon drive
// (or no drive) and no single-photon loss. Single-photon drives and
// gamma1 > 0 mix the sectors.
bool parity_preserving(const ModelSpec& spec, const DissipationRates& rates);

// d rho/dt = -i [H, rho] + gamma_perp D[n] rho + gamma1 D[a] rho
//          + gamma2 D[a^2] rho, with D[L] rho = L rho L^dag - {L^dag L, rho}/2.
// Straightforward dense-matrix evaluation; the integrator uses an
// equivalent banded form, and tests hold the two together.
Mat lindblad_rhs(const ModelSpec& spec, const DissipationRates& rates,
                 const DensityOperator& rho);

// Column-stacking convention throughout: vec(rho)(m + dim * n) = rho(m, n),
// so vec(A rho B) = (B^T (x) A) vec(rho).
Vec vec_density(const Mat& rho);
Mat unvec_density(const Vec& v, int dim);

// Dense superoperator, dim^2 x dim^2. Refuses dim > 64 (the matrix would
// pass 256 MB); use liouvillian_sparse or lindblad_rhs beyond that.
Mat liouvillian_matrix(const ModelSpec& spec, const DissipationRates& rates,
                       FockSpace space);
SpMat liouvillian_sparse(const ModelSpec& spec, const DissipationRates& rates,
                         FockSpace space);

// Orthonormal basis of the (numerical) null space: right singular vectors
// with sigma <= rel_tol * sigma_max. A count different from
// expected_nullity emits a degenerate-spectrum warning listing the smallest
// singular values; pass expected_nullity < 0 to skip the check.
std::vector<Vec> null_space_basis(const Mat& superop, int expected_nullity,
                                  double rel_tol = 1e-8);

// One null vector of a sparse generator by inverse-power iteration on
// (L - shift I); fallback for sizes where the bordered solve is not wanted.
Vec inverse_power_null_vector(const SpMat& superop, int iterations = 30);

// Steady state restricted to one parity sector, normalized to unit trace
// within the sector. Requires a parity-preserving generator with
// gamma2 > 0. Solved by replacing one population row of the sector block
// with the trace condition and LU-factoring; residual of the full
// generator is checked afterwards.
DensityOperator steady_state_sector(const ModelSpec& spec,
                                    const DissipationRates& rates,
                                    Parity parity, FockSpace space);

// p_even rho_even + p_odd rho_odd with the sector weights of rho0, which
// the parity-preserving evolution conserves.
DensityOperator steady_state_general(const ModelSpec& spec,
                                     const DissipationRates& rates,
                                     const DensityOperator& rho0);

// Unique steady state of a parity-breaking generator (single-photon drive
// or gamma1 > 0).
DensityOperator steady_state_unique(const ModelSpec& spec,
                                    const DissipationRates& rates,
                                    FockSpace space);

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  bool store_states = true;  // photon probabilities are recorded regardless
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityOperator> states;        // empty if store_states off
  std::vector<RealVec> photon_probs;          // diagonal at every grid time
};

// Adaptive embedded Runge-Kutta pair integrating in the interaction picture
// of the diagonal (Kerr + detuning) part, so the step size is set by the
// drive and the rates instead of the O(chi dim^2) level splittings. States
// are rotated back, re-hermitized and trace-checked (drift above 1e-8 is a
// SolverError) at every grid time. t_grid starts at 0 and ascends.
Trajectory evolve(const ModelSpec& spec, const DissipationRates& rates,
                  const DensityOperator& rho0,
                  const std::vector<double>& t_grid,
                  const IntegratorOptions& options = {});

}  // namespace blockade
