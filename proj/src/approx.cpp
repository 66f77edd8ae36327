#include "blockade/approx.hpp"

#include <cmath>
#include <string>

#include "blockade/states.hpp"
#include "blockade/util.hpp"

namespace blockade {

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt3 = std::sqrt(3.0);
const double kSqrt6 = std::sqrt(6.0);

void check_validity(double delta, double delta_prime) {
  if (delta > 0.25 || delta_prime > 0.25) {
    emit_warning("approx_coefficients: delta = " + format_double(delta) +
                 ", delta_prime = " + format_double(delta_prime) +
                 " outside the weak-drive validity range (<= 1/4)");
  }
  if (delta < 0.0 || delta_prime < 0.0) {
    throw std::invalid_argument(
        "approx_coefficients: delta and delta_prime must be >= 0");
  }
}

}  // namespace

ApproxCoefficients approx_coefficients(ApproxModel model, Parity parity,
                                       double delta, double delta_prime,
                                       bool leading_order) {
  check_validity(delta, delta_prime);
  ApproxCoefficients co;
  co.model = model;
  co.parity = parity;
  co.delta = delta;
  co.delta_prime = delta_prime;
  const double d2 = delta * delta;
  const double dp2 = delta_prime * delta_prime;

  if (model == ApproxModel::TwoLevel02 && parity == Parity::Even) {
    co.p = 0.5 - 9.0 / 32.0 * d2 + 0.125 * dp2;
    co.r = 3.0 / 32.0 * d2;
    co.q = 1.0 - co.p - co.r;
    co.a = -3.0 * kSqrt2 / 8.0 * delta;
    co.b = kSqrt2 / 4.0 * delta_prime;
    co.c = 5.0 * kSqrt6 / 64.0 * d2;
    co.d = -kSqrt6 / 16.0 * delta * delta_prime;
    co.e = -kSqrt3 / 8.0 * delta;
    co.f = 0.0;
  } else if (model == ApproxModel::TwoLevel02 && parity == Parity::Odd) {
    if (leading_order) {
      co.p = 1.0 - 3.0 / 8.0 * d2;
      co.a = -kSqrt6 / 4.0 * delta;
      co.b = 3.0 * kSqrt6 / 16.0 * d2 * delta_prime;
    } else {
      // Exact two-level balance between |1> and |3>, no expansion:
      // scaled by chi^2, M = 16 chi^2 + 12 eps^2 + 9 gamma^2.
      const double m = 16.0 + 12.0 * d2 + 9.0 * d2 * dp2;
      co.p = 1.0 - 6.0 * d2 / m;
      co.a = -4.0 * kSqrt6 * delta / m;
      co.b = 3.0 * kSqrt6 * d2 * delta_prime / m;
    }
    co.q = 1.0 - co.p;
  } else if (model == ApproxModel::TwoLevel13 && parity == Parity::Even) {
    // Derived with the loss tied to the drive (delta_prime = delta); other
    // ratios are an extrapolation.
    if (std::abs(delta - delta_prime) > 1e-9) {
      emit_warning(
          "approx_coefficients: even-sector series assumes delta_prime = "
          "delta; evaluating at delta");
    }
    co.p = 25.0 / 32.0 - 107.0 / 512.0 * d2;
    co.q = 3.0 / 16.0 + 15.0 / 128.0 * d2;
    co.s = 5.0 / 768.0 * d2;
    co.r = 1.0 - co.p - co.q - co.s;
    co.a = 19.0 / 128.0 * kSqrt2 * delta;
    co.b = 3.0 / 32.0 * kSqrt2 * delta;
    co.c = -37.0 / 4608.0 * kSqrt6 * d2;
    co.d = kSqrt6 / 16.0 - 49.0 / 768.0 * kSqrt6 * d2;
    co.e = -5.0 / 64.0 * kSqrt3 * delta;
    co.f = kSqrt3 / 32.0 * delta;
  } else {  // TwoLevel13, odd: saturated resonant pair, chi drops out.
    if (leading_order) {
      co.p = 0.5 + 3.0 / 8.0 * dp2;
      co.b = kSqrt6 / 4.0 * delta_prime;
    } else {
      const double m = 4.0 + 3.0 * dp2;  // M = 4 eps^2 + 3 gamma^2 over eps^2
      co.p = 1.0 - 2.0 / m;
      co.b = kSqrt6 * delta_prime / m;
    }
    co.a = 0.0;
    co.q = 1.0 - co.p;
  }
  return co;
}

DensityOperator approx_steady(ApproxModel model, Parity parity, double delta,
                              double delta_prime, FockSpace space) {
  ApproxCoefficients co =
      approx_coefficients(model, parity, delta, delta_prime);
  const int dim = space.dim();
  Mat rho = Mat::Zero(dim, dim);

  if (parity == Parity::Odd) {
    if (dim < 4) {
      throw DimensionError("approx_steady: odd sector needs dim >= 4");
    }
    rho(1, 1) = co.p;
    rho(3, 3) = co.q;
    rho(1, 3) = Cplx(co.a, co.b);
    rho(3, 1) = Cplx(co.a, -co.b);
  } else {
    if (dim < 5) {
      throw DimensionError("approx_steady: even sector needs dim >= 5");
    }
    rho(0, 0) = co.p;
    rho(2, 2) = co.q;
    rho(4, 4) = co.r;
    rho(0, 2) = Cplx(co.a, co.b);
    rho(2, 0) = Cplx(co.a, -co.b);
    rho(0, 4) = Cplx(co.c, co.d);
    rho(4, 0) = Cplx(co.c, -co.d);
    rho(2, 4) = Cplx(co.e, co.f);
    rho(4, 2) = Cplx(co.e, -co.f);
    if (co.s != 0.0) {
      if (dim >= 7) {
        rho(6, 6) = co.s;
      } else {
        emit_warning("approx_steady: level 6 weight " + format_double(co.s) +
                     " does not fit dim " + std::to_string(dim) +
                     "; renormalizing");
        rho /= 1.0 - co.s;
      }
    }
  }
  return DensityOperator(space, std::move(rho));
}

DensityOperator approx_mixture(ApproxModel model, const DensityOperator& rho0,
                               double delta, double delta_prime,
                               FockSpace space) {
  ParitySplit split = parity_split(rho0);
  if (split.p_odd < 1e-12) {
    return approx_steady(model, Parity::Even, delta, delta_prime, space);
  }
  if (split.p_even < 1e-12) {
    return approx_steady(model, Parity::Odd, delta, delta_prime, space);
  }
  DensityOperator even =
      approx_steady(model, Parity::Even, delta, delta_prime, space);
  DensityOperator odd =
      approx_steady(model, Parity::Odd, delta, delta_prime, space);
  return DensityOperator(
      space, split.p_even * even.matrix() + split.p_odd * odd.matrix());
}

RabiSolution rabi_solution(FockSpace space, RabiModel model, int initial_m,
                           double epsilon, double t) {
  if (initial_m < 0 || initial_m >= space.dim()) {
    throw DimensionError("rabi_solution: initial level outside space");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("rabi_solution: epsilon must be >= 0");
  }
  auto pair_state = [&](int lo, int hi, double freq,
                        bool start_low) -> RabiSolution {
    if (hi >= space.dim()) {
      throw DimensionError("rabi_solution: level " + std::to_string(hi) +
                           " outside space");
    }
    Vec c = Vec::Zero(space.dim());
    const double angle = freq * t;
    if (start_low) {
      c(lo) = std::cos(angle);
      c(hi) = -kI * std::sin(angle);
    } else {
      c(lo) = -kI * std::sin(angle);
      c(hi) = std::cos(angle);
    }
    return {StateVector(space, std::move(c)), false};
  };

  switch (model) {
    case RabiModel::TwoLevel02:
      if (initial_m == 0) return pair_state(0, 2, kSqrt2 * epsilon, true);
      if (initial_m == 2) return pair_state(0, 2, kSqrt2 * epsilon, false);
      break;
    case RabiModel::TwoLevel13:
      if (initial_m == 1) return pair_state(1, 3, kSqrt6 * epsilon, true);
      if (initial_m == 3) return pair_state(1, 3, kSqrt6 * epsilon, false);
      if (initial_m == 0) return pair_state(0, 4, epsilon / 5.0, true);
      if (initial_m == 4) return pair_state(0, 4, epsilon / 5.0, false);
      break;
    case RabiModel::SinglePhoton:
      if (initial_m == 0) return pair_state(0, 1, epsilon, true);
      if (initial_m == 1) return pair_state(0, 1, epsilon, false);
      break;
  }
  return {fock_state(space, initial_m), true};
}

}  // namespace blockade
