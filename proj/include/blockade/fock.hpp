#pragma once

#include "blockade/types.hpp"

namespace blockade {

// Truncated single-mode Fock basis {|0>, ..., |dim-1>}. Every operator and
// state carries its space; mixing dimensions throws DimensionError. Even dim
// keeps the even and odd photon-number sectors the same size, which the
// parity solvers rely on, but odd dims are accepted.
class FockSpace {
public:
  explicit FockSpace(int dim);
  int dim() const noexcept { return dim_; }
  friend bool operator==(const FockSpace&, const FockSpace&) = default;

private:
  int dim_;
};

FockSpace make_space(int dim);

// Dense operator on a FockSpace. hermitian_hint marks operators that are
// Hermitian by construction; the constructor verifies ||A - A^dag|| <= 1e-10
// when the hint is set.
class OperatorMatrix {
public:
  OperatorMatrix(FockSpace space, Mat matrix, bool hermitian_hint = false);
  const FockSpace& space() const noexcept { return space_; }
  const Mat& matrix() const noexcept { return matrix_; }
  bool hermitian_hint() const noexcept { return hermitian_; }

private:
  FockSpace space_;
  Mat matrix_;
  bool hermitian_;
};

// Pure state; the main constructor normalizes (zero vectors are rejected).
// raw() skips normalization so operator application can return unscaled
// results like a^dag a |3> = 3 |3>.
class StateVector {
public:
  StateVector(FockSpace space, Vec amplitudes);
  static StateVector raw(FockSpace space, Vec amplitudes);
  const FockSpace& space() const noexcept { return space_; }
  const Vec& amplitudes() const noexcept { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

private:
  struct RawTag {};
  StateVector(FockSpace space, Vec amplitudes, RawTag);
  FockSpace space_;
  Vec amplitudes_;
};

// Hermitian, unit-trace matrix (both verified to 1e-10 at construction;
// callers integrate/solve, then hermitize before constructing). Positivity
// is not checked here because it costs an eigendecomposition; tests and the
// acceptance suite check min_eigenvalue() where it matters.
class DensityOperator {
public:
  DensityOperator(FockSpace space, Mat matrix);
  static DensityOperator pure(const StateVector& psi);
  const FockSpace& space() const noexcept { return space_; }
  const Mat& matrix() const noexcept { return matrix_; }
  double min_eigenvalue() const;

private:
  FockSpace space_;
  Mat matrix_;
};

OperatorMatrix annihilation(FockSpace space);
OperatorMatrix creation(FockSpace space);
OperatorMatrix number_operator(FockSpace space);
OperatorMatrix identity_operator(FockSpace space);

// Matrix elements <n| D(beta) |n0> of the displacement operator
// D(beta) = exp(beta a^dag - conj(beta) a), evaluated through associated
// Laguerre polynomials with log-factorial prefactors so large dims stay
// finite. Unitary up to truncation leakage in the last few rows.
OperatorMatrix displacement_matrix(FockSpace space, Cplx beta);

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix adjoint(const OperatorMatrix& a);
StateVector apply(const OperatorMatrix& a, const StateVector& psi);
Cplx expectation(const OperatorMatrix& a, const StateVector& psi);
Cplx expectation(const OperatorMatrix& a, const DensityOperator& rho);

void require_same_space(const FockSpace& a, const FockSpace& b,
                        const char* context);

}  // namespace blockade
