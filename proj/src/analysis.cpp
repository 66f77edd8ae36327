#include "blockade/analysis.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "blockade/util.hpp"

namespace blockade {

RealVec photon_probabilities(const DensityOperator& rho) {
  return rho.matrix().diagonal().real();
}

double blockade_fidelity(const DensityOperator& rho,
                         const std::vector<int>& manifold) {
  RealVec probs = photon_probabilities(rho);
  double f = 0.0;
  for (int level : manifold) {
    if (level < 0 || level >= probs.size()) {
      throw DimensionError("blockade_fidelity: level " +
                           std::to_string(level) + " outside space");
    }
    f += probs(level);
  }
  return f;
}

double mean_photon(const DensityOperator& rho) {
  RealVec probs = photon_probabilities(rho);
  double n = 0.0;
  for (int k = 0; k < probs.size(); ++k) n += k * probs(k);
  return n;
}

double mean_photon(const StateVector& psi) {
  RealVec probs = psi.amplitudes().cwiseAbs2();
  double n = 0.0, total = 0.0;
  for (int k = 0; k < probs.size(); ++k) {
    n += k * probs(k);
    total += probs(k);
  }
  return n / total;
}

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_space(rho.space(), sigma.space(), "trace_distance");
  Eigen::SelfAdjointEigenSolver<Mat> es(rho.matrix() - sigma.matrix(),
                                        Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

RealVec linspace(double lo, double hi, int count) {
  if (count < 2) {
    throw std::invalid_argument("linspace: need at least 2 points");
  }
  RealVec axis(count);
  double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) axis(i) = lo + i * step;
  return axis;
}

namespace {

// W(beta) = (1/pi) tr[rho D(alpha) P D^dag(alpha)] with alpha = beta/sqrt2.
// P a P = -a gives D(alpha) P D^dag(alpha) = D(2 alpha) P, so each grid
// point is one displacement-matrix evaluation contracted with rho. The
// matrix elements are walked per offset with the associated Laguerre
// recurrence; sqrt(nlo!/nhi!) comes from a shared table.
double wigner_point(const Mat& rho, const RealMat& fact_table, Cplx beta) {
  const int dim = static_cast<int>(rho.rows());
  const Cplx alpha2 = std::sqrt(2.0) * beta;  // 2 alpha
  const double r = std::abs(alpha2);
  const double x = r * r;
  const double logr = r > 0.0 ? std::log(r) : 0.0;
  const Cplx step_phase = r > 0.0 ? alpha2 / r : Cplx(1.0, 0.0);

  Cplx acc(0.0, 0.0);
  Cplx phase(1.0, 0.0);  // e^{i off arg}
  for (int off = 0; off < dim; ++off) {
    // r^off kills every off-diagonal at the exact origin; the log form
    // cannot represent that, so stop instead of exponentiating the guard.
    if (off > 0 && r == 0.0) break;
    if (off > 0) phase *= step_phase;
    const double pref = std::exp(-0.5 * x + off * logr);
    double lk_prev = 0.0;
    double lk = 1.0;
    for (int nlo = 0; nlo + off < dim; ++nlo) {
      const int nhi = nlo + off;
      if (nlo > 0) {
        const int k = nlo - 1;
        const double lk_next =
            ((2.0 * k + 1.0 + off - x) * lk - (k + off) * lk_prev) / (k + 1.0);
        lk_prev = lk;
        lk = lk_next;
      }
      const double mag = pref * fact_table(nlo, off) * lk;
      const double par_lo = nlo % 2 == 0 ? 1.0 : -1.0;
      // D2(nhi, nlo) paired with rho(nlo, nhi), parity sign (-1)^nlo.
      acc += rho(nlo, nhi) * (par_lo * mag) * phase;
      if (off > 0) {
        // D2(nlo, nhi) = (-1)^off mag conj(phase) and the parity column
        // sign is (-1)^nhi, whose product collapses to (-1)^nlo again.
        acc += rho(nhi, nlo) * (par_lo * mag) * std::conj(phase);
      }
    }
  }
  return acc.real() / kPi;
}

}  // namespace

WignerGrid wigner(const DensityOperator& rho, const RealVec& q_axis,
                  const RealVec& p_axis) {
  const int dim = rho.space().dim();
  if (q_axis.size() < 1 || p_axis.size() < 1) {
    throw std::invalid_argument("wigner: empty axis");
  }

  double reach = std::sqrt(2.0 * mean_photon(rho)) + 3.0;
  double extent = std::min(std::min(-q_axis.minCoeff(), q_axis.maxCoeff()),
                           std::min(-p_axis.minCoeff(), p_axis.maxCoeff()));
  if (extent < reach) {
    emit_warning("wigner: grid extent " + format_double(extent) +
                 " is inside the state support radius " + format_double(reach));
  }

  RealMat fact_table(dim, dim);  // sqrt(nlo! / (nlo + off)!)
  {
    std::vector<double> lgam(2 * dim);
    for (int n = 0; n < 2 * dim; ++n) lgam[n] = std::lgamma(n + 1.0);
    for (int off = 0; off < dim; ++off) {
      for (int nlo = 0; nlo + off < dim; ++nlo) {
        fact_table(nlo, off) = std::exp(0.5 * (lgam[nlo] - lgam[nlo + off]));
      }
    }
  }

  WignerGrid grid;
  grid.q_axis = q_axis;
  grid.p_axis = p_axis;
  grid.values.resize(q_axis.size(), p_axis.size());
  const Mat& r = rho.matrix();
  parallel_for(static_cast<int>(q_axis.size()), [&](int i) {
    for (int j = 0; j < p_axis.size(); ++j) {
      grid.values(i, j) = wigner_point(r, fact_table, {q_axis(i), p_axis(j)});
    }
  });

  const double bound = 1.0 / kPi + 1e-6;
  double lo = grid.values.minCoeff();
  double hi = grid.values.maxCoeff();
  if (lo < -bound || hi > bound) {
    throw SolverError("wigner: value escaped [-1/pi, 1/pi] by " +
                      format_double(std::max(hi - bound, -bound - lo)));
  }
  return grid;
}

double wigner_integral(const WignerGrid& grid) {
  if (grid.q_axis.size() < 2 || grid.p_axis.size() < 2) {
    throw std::invalid_argument("wigner_integral: need a 2-d grid");
  }
  double dq = grid.q_axis(1) - grid.q_axis(0);
  double dp = grid.p_axis(1) - grid.p_axis(0);
  return grid.values.sum() * dq * dp;
}

}  // namespace blockade
