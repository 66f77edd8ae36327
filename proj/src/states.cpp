#include "blockade/states.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "blockade/util.hpp"

namespace blockade {

namespace {

constexpr double kDiscardTol = 1e-8;

ParitySplit split_from_probs(const RealVec& probs) {
  ParitySplit s;
  for (int n = 0; n < probs.size(); ++n) {
    (n % 2 == 0 ? s.p_even : s.p_odd) += probs(n);
  }
  s.ratio_r = s.p_even > 1e-15
                  ? s.p_odd / s.p_even
                  : std::numeric_limits<double>::infinity();
  return s;
}

void warn_discarded(const char* what, double discarded) {
  if (discarded > kDiscardTol) {
    emit_warning(std::string(what) + ": truncation discards weight " +
                 format_double(discarded));
  }
}

}  // namespace

ParitySplit parity_split(const StateVector& psi) {
  RealVec probs = psi.amplitudes().cwiseAbs2();
  probs /= probs.sum();
  return split_from_probs(probs);
}

ParitySplit parity_split(const DensityOperator& rho) {
  return split_from_probs(rho.matrix().diagonal().real());
}

StateVector fock_state(FockSpace space, int m) {
  if (m < 0 || m >= space.dim()) {
    throw DimensionError("fock_state: level " + std::to_string(m) +
                         " outside space of dim " + std::to_string(space.dim()));
  }
  Vec c = Vec::Zero(space.dim());
  c(m) = 1.0;
  return StateVector(space, std::move(c));
}

StateVector coherent_state(FockSpace space, Cplx alpha) {
  double a2 = std::norm(alpha);
  if (a2 + 5.0 * std::abs(alpha) >= space.dim()) {
    emit_warning("coherent_state: |alpha|^2 + 5|alpha| = " +
                 format_double(a2 + 5.0 * std::abs(alpha)) +
                 " does not fit dim " + std::to_string(space.dim()));
  }
  Vec c(space.dim());
  c(0) = std::exp(-0.5 * a2);
  for (int n = 1; n < space.dim(); ++n) {
    c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  }
  warn_discarded("coherent_state", 1.0 - c.squaredNorm());
  return StateVector(space, std::move(c));
}

StateVector cat_state(FockSpace space, Cplx alpha, double phi) {
  double a2 = std::norm(alpha);
  if (a2 + 5.0 * std::abs(alpha) >= space.dim()) {
    emit_warning("cat_state: support of |alpha| = " +
                 format_double(std::abs(alpha)) + " does not fit dim " +
                 std::to_string(space.dim()));
  }
  Cplx rel = std::polar(1.0, phi);
  Vec c(space.dim());
  Cplx plus = std::exp(-0.5 * a2);   // e^{-|a|^2/2} alpha^n / sqrt(n!)
  Cplx minus = plus;                 // same for -alpha
  c(0) = plus + rel * minus;
  for (int n = 1; n < space.dim(); ++n) {
    double rn = std::sqrt(static_cast<double>(n));
    plus *= alpha / rn;
    minus *= -alpha / rn;
    c(n) = plus + rel * minus;
  }
  // Exact squared norm of |alpha> + e^{i phi} |-alpha> before truncation.
  double full = 2.0 * (1.0 + std::cos(phi) * std::exp(-2.0 * a2));
  if (c.norm() < 1e-12 || full < 1e-24) {
    throw std::invalid_argument(
        "cat_state: superposition destructively cancels (alpha ~ 0 with "
        "phi ~ pi)");
  }
  warn_discarded("cat_state", 1.0 - c.squaredNorm() / full);
  return StateVector(space, std::move(c));
}

StateVector squeezed_state(FockSpace space, Cplx alpha, Cplx xi) {
  double rsq = std::abs(xi);
  // x is the squeezing factor tanh|xi| carrying the squeezing phase; u and
  // z complete the generating-function form of the amplitudes. The scaled
  // recurrence g_{n+1} = (u g_n - x sqrt(n) g_{n-1}) / sqrt(n+1) evaluates
  // (tanh/2)^{n/2} H_n / sqrt(n!) without overflow, and collapses to the
  // coherent series at xi = 0.
  Cplx x = std::tanh(rsq) * std::polar(1.0, std::arg(xi));
  Cplx u = alpha + std::conj(alpha) * x;
  Cplx z = std::norm(alpha) + std::conj(alpha) * std::conj(alpha) * x;
  Cplx prefactor = std::exp(-0.5 * z) / std::sqrt(std::cosh(rsq));

  Vec c(space.dim());
  Cplx g_prev = 0.0;
  Cplx g = 1.0;
  c(0) = prefactor;
  for (int n = 1; n < space.dim(); ++n) {
    Cplx g_next =
        (u * g - x * std::sqrt(n - 1.0) * g_prev) / std::sqrt(static_cast<double>(n));
    g_prev = g;
    g = g_next;
    c(n) = prefactor * g;
  }
  double top = c.tail(2).squaredNorm();
  if (top > kDiscardTol) {
    emit_warning("squeezed_state: top-level weight " + format_double(top) +
                 " at dim " + std::to_string(space.dim()));
  }
  return StateVector(space, std::move(c));
}

StateVector displaced_number_state(FockSpace space, Cplx alpha, int n0) {
  if (n0 < 0 || n0 >= space.dim()) {
    throw DimensionError("displaced_number_state: n0 = " + std::to_string(n0) +
                         " outside space of dim " + std::to_string(space.dim()));
  }
  Vec c = displacement_matrix(space, alpha).matrix().col(n0);
  warn_discarded("displaced_number_state", 1.0 - c.squaredNorm());
  return StateVector(space, std::move(c));
}

DensityOperator thermal_state(FockSpace space, double mean_n) {
  if (mean_n < 0.0) {
    throw std::invalid_argument("thermal_state: mean_n must be >= 0");
  }
  double q = mean_n / (1.0 + mean_n);
  Mat rho = Mat::Zero(space.dim(), space.dim());
  double w = 1.0;
  double total = 0.0;
  for (int n = 0; n < space.dim(); ++n) {
    rho(n, n) = w;
    total += w;
    w *= q;
  }
  warn_discarded("thermal_state", w / (1.0 - q) / (total + w / (1.0 - q)));
  rho /= total;
  return DensityOperator(space, std::move(rho));
}

DensityOperator photon_added_thermal_state(FockSpace space, double mean_n) {
  if (mean_n < 1.0) {
    throw std::invalid_argument(
        "photon_added_thermal_state: mean photon number is >= 1 by "
        "construction");
  }
  double q = (mean_n - 1.0) / (mean_n + 1.0);
  Mat rho = Mat::Zero(space.dim(), space.dim());
  double total = 0.0;
  double qn = q;  // q^n
  for (int n = 1; n < space.dim(); ++n) {
    rho(n, n) = n * qn;
    total += n * qn;
    qn *= q;
  }
  if (total <= 0.0) {  // mean_n == 1 collapses onto the single-photon state
    rho.setZero();
    rho(1, 1) = 1.0;
    return DensityOperator(space, std::move(rho));
  }
  // Tail sum_{n>=dim} n q^n of the untruncated distribution.
  int d = space.dim();
  double tail = qn * (d * (1.0 - q) + q) / ((1.0 - q) * (1.0 - q));
  warn_discarded("photon_added_thermal_state", tail / (total + tail));
  rho /= total;
  return DensityOperator(space, std::move(rho));
}

ParitySplit closed_form_parity(StateFamily family, const FamilyParams& params) {
  ParitySplit s;
  switch (family) {
    case StateFamily::Coherent: {
      double e = std::exp(-2.0 * std::norm(params.alpha));
      s.p_even = 0.5 * (1.0 + e);
      s.p_odd = 0.5 * (1.0 - e);
      break;
    }
    case StateFamily::Thermal: {
      if (params.mean_n < 0.0) {
        throw std::invalid_argument("closed_form_parity: thermal mean_n < 0");
      }
      s.p_even = (1.0 + params.mean_n) / (1.0 + 2.0 * params.mean_n);
      s.p_odd = params.mean_n / (1.0 + 2.0 * params.mean_n);
      break;
    }
    case StateFamily::PhotonAddedThermal: {
      if (params.mean_n < 1.0) {
        throw std::invalid_argument(
            "closed_form_parity: photon-added thermal needs mean_n >= 1");
      }
      double q = (params.mean_n - 1.0) / (params.mean_n + 1.0);
      double denom = (1.0 + q) * (1.0 + q);
      s.p_even = 2.0 * q / denom;
      s.p_odd = (1.0 + q * q) / denom;
      break;
    }
    case StateFamily::Cat: {
      double e = std::exp(-2.0 * std::norm(params.alpha));
      double denom = 1.0 + std::cos(params.phi) * e;
      if (denom < 1e-24) {
        throw std::invalid_argument(
            "closed_form_parity: cat superposition cancels");
      }
      double half = 0.5 * params.phi;
      s.p_even = std::cos(half) * std::cos(half) * (1.0 + e) / denom;
      s.p_odd = std::sin(half) * std::sin(half) * (1.0 - e) / denom;
      break;
    }
  }
  s.ratio_r = s.p_even > 1e-15 ? s.p_odd / s.p_even
                               : std::numeric_limits<double>::infinity();
  return s;
}

}  // namespace blockade
