#include "blockade/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "blockade/states.hpp"
#include "blockade/util.hpp"

namespace blockade {

namespace {

constexpr double kSteadyResidTol = 1e-10;

// Every term of the generator is a diagonal plus a few single-offset bands
// (drive at offset 1 or 2, losses at offset 1 and 2), so the right-hand
// side costs O(dim^2) instead of O(dim^3) and the interaction-picture
// phases attach to band coefficients elementwise.
struct BandTerm {
  int offset = 0;
  RealVec coeff;  // B(m, m + offset) = coeff(m)
};

struct GeneratorBands {
  int dim = 0;
  RealVec energies;  // diagonal of H
  bool has_drive = false;
  BandTerm drive;  // H = diag(energies) + drive + drive^dag
  struct JumpTerm {
    double rate;
    BandTerm band;
  };
  std::vector<JumpTerm> jumps;
  // Anticommutator + dephasing weights: the generator contributes
  // -damp(m, n) * sigma(m, n) elementwise, identical in both pictures.
  RealMat damp;
};

GeneratorBands make_bands(FockSpace space, const ModelSpec& spec,
                          const DissipationRates& rates) {
  validate(spec);
  validate(rates);
  const int dim = space.dim();
  GeneratorBands g;
  g.dim = dim;
  g.energies.resize(dim);
  if (spec.kind == ModelKind::TwoPhotonDrive) {
    for (int n = 0; n < dim; ++n) {
      g.energies(n) = spec.omega_tune * n +
                      spec.chi * (n - spec.k) * (n - spec.l) + spec.sigma_tune;
    }
  } else {
    const int shift = spec.kind == ModelKind::SinglePhotonDrive ? 1 : 2;
    for (int n = 0; n < dim; ++n) {
      g.energies(n) = spec.chi * n * (n - shift);
    }
  }

  const int ds = spec.kind == ModelKind::TwoPhotonDrive ? 2 : 1;
  if (spec.epsilon > 0.0) {
    g.has_drive = true;
    g.drive.offset = ds;
    g.drive.coeff.resize(dim - ds);
    for (int m = 0; m + ds < dim; ++m) {
      g.drive.coeff(m) = ds == 2
                             ? spec.epsilon * std::sqrt((m + 1.0) * (m + 2.0))
                             : spec.epsilon * std::sqrt(m + 1.0);
    }
  }
  if (rates.gamma1 > 0.0) {
    BandTerm b;
    b.offset = 1;
    b.coeff.resize(dim - 1);
    for (int m = 0; m + 1 < dim; ++m) b.coeff(m) = std::sqrt(m + 1.0);
    g.jumps.push_back({rates.gamma1, std::move(b)});
  }
  if (rates.gamma2 > 0.0) {
    BandTerm b;
    b.offset = 2;
    b.coeff.resize(dim - 2);
    for (int m = 0; m + 2 < dim; ++m)
      b.coeff(m) = std::sqrt((m + 1.0) * (m + 2.0));
    g.jumps.push_back({rates.gamma2, std::move(b)});
  }

  g.damp = RealMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      double d = 0.0;
      d += 0.5 * rates.gamma1 * (m + n);
      d += 0.5 * rates.gamma2 * (m * (m - 1.0) + n * (n - 1.0));
      d += 0.5 * rates.gamma_perp * (m - n) * (m - n);
      g.damp(m, n) = d;
    }
  }
  return g;
}

// exp(i (E_m - E_{m+offset}) t) for each band row.
Vec band_phases(const RealVec& energies, int offset, double t) {
  const int n = static_cast<int>(energies.size()) - offset;
  Vec ph(n);
  for (int m = 0; m < n; ++m) {
    ph(m) = std::polar(1.0, (energies(m) - energies(m + offset)) * t);
  }
  return ph;
}

// Interaction-picture right-hand side; with phases = 1 (t = 0 and energies
// ignored) this is the Schroedinger dissipative part plus drive, which the
// superoperator assembly below mirrors.
void band_rhs(const GeneratorBands& g, double t, const Mat& sigma, Mat& out) {
  const int dim = g.dim;
  out = -g.damp.cast<Cplx>().cwiseProduct(sigma);

  if (g.has_drive) {
    const int s = g.drive.offset;
    Vec tv = band_phases(g.energies, s, t);
    for (int m = 0; m + s < dim; ++m) tv(m) *= g.drive.coeff(m);
    const int r = dim - s;
    out.topRows(r).noalias() -= kI * (tv.asDiagonal() * sigma.bottomRows(r));
    out.bottomRows(r).noalias() -=
        kI * (tv.conjugate().asDiagonal() * sigma.topRows(r));
    out.rightCols(r).noalias() += kI * (sigma.leftCols(r) * tv.asDiagonal());
    out.leftCols(r).noalias() +=
        kI * (sigma.rightCols(r) * tv.conjugate().asDiagonal());
  }

  for (const auto& jump : g.jumps) {
    const int s = jump.band.offset;
    Vec lt = band_phases(g.energies, s, t);
    for (int m = 0; m + s < dim; ++m) lt(m) *= jump.band.coeff(m);
    const int r = dim - s;
    for (int n = 0; n < r; ++n) {
      const Cplx cn = jump.rate * std::conj(lt(n));
      for (int m = 0; m < r; ++m) {
        out(m, n) += lt(m) * cn * sigma(m + s, n + s);
      }
    }
  }
}

int vec_index(int m, int n, int dim) { return m + dim * n; }

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int j = 0; j < a.cols(); ++j) {
    for (int i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void add_dissipator(Mat& superop, const Mat& l, double rate) {
  if (rate <= 0.0) return;
  const Mat eye = Mat::Identity(l.rows(), l.cols());
  const Mat ldl = l.adjoint() * l;
  superop += rate * (kron(l.conjugate(), l) - 0.5 * kron(eye, ldl) -
                     0.5 * kron(ldl.transpose(), eye));
}

std::vector<int> sector_levels(int dim, Parity parity) {
  std::vector<int> levels;
  for (int n = parity == Parity::Even ? 0 : 1; n < dim; n += 2) {
    levels.push_back(n);
  }
  return levels;
}

// Generic bordered solve: take the (restricted) generator as triplets,
// overwrite row 0 -- the population row of the first kept diagonal element,
// which is linearly dependent on the others through trace conservation --
// with the trace functional, and LU-solve against e_0. Two rounds of
// iterative refinement keep the residual near roundoff.
Vec solve_steady_system(int size, std::vector<Eigen::Triplet<Cplx>> triplets,
                        const std::vector<int>& trace_positions) {
  std::vector<Eigen::Triplet<Cplx>> kept;
  kept.reserve(triplets.size() + trace_positions.size());
  for (const auto& t : triplets) {
    if (t.row() != 0) kept.push_back(t);
  }
  for (int pos : trace_positions) {
    kept.emplace_back(0, pos, Cplx(1.0, 0.0));
  }
  SpMat a(size, size);
  a.setFromTriplets(kept.begin(), kept.end());
  a.makeCompressed();

  Eigen::SparseLU<SpMat> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw SolverError(
        "steady-state solve: LU factorization failed (generator singular "
        "after trace bordering; is the steady state unique here?)");
  }
  Vec b = Vec::Zero(size);
  b(0) = 1.0;
  Vec x = lu.solve(b);
  for (int round = 0; round < 2; ++round) {
    Vec r = b - a * x;
    x += lu.solve(r);
  }
  return x;
}

DensityOperator embed_sector_state(FockSpace space,
                                   const std::vector<int>& levels,
                                   const Vec& x) {
  const int s = static_cast<int>(levels.size());
  Mat rho = Mat::Zero(space.dim(), space.dim());
  for (int b = 0; b < s; ++b) {
    for (int a = 0; a < s; ++a) {
      rho(levels[a], levels[b]) = x(a + s * b);
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Cplx tr = rho.trace();
  if (std::abs(tr) < 1e-12) {
    throw SolverError("steady-state solve: returned trace ~ 0");
  }
  rho /= tr.real();
  return DensityOperator(space, std::move(rho));
}

void check_steady_residual(const ModelSpec& spec, const DissipationRates& rates,
                           const DensityOperator& rho) {
  double resid =
      lindblad_rhs(spec, rates, rho).cwiseAbs().maxCoeff();
  if (resid > kSteadyResidTol) {
    throw SolverError("steady-state solve: residual " + format_double(resid) +
                      " exceeds " + format_double(kSteadyResidTol));
  }
}

std::vector<Eigen::Triplet<Cplx>> generator_triplets(const GeneratorBands& g) {
  const int dim = g.dim;
  std::vector<Eigen::Triplet<Cplx>> trip;
  trip.reserve(static_cast<size_t>(dim) * dim * 7);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      const int row = vec_index(m, n, dim);
      Cplx diag = -kI * (g.energies(m) - g.energies(n)) - g.damp(m, n);
      trip.emplace_back(row, row, diag);
      if (g.has_drive) {
        const int s = g.drive.offset;
        if (m + s < dim)
          trip.emplace_back(row, vec_index(m + s, n, dim),
                            -kI * g.drive.coeff(m));
        if (m - s >= 0)
          trip.emplace_back(row, vec_index(m - s, n, dim),
                            -kI * g.drive.coeff(m - s));
        if (n - s >= 0)
          trip.emplace_back(row, vec_index(m, n - s, dim),
                            kI * g.drive.coeff(n - s));
        if (n + s < dim)
          trip.emplace_back(row, vec_index(m, n + s, dim),
                            kI * g.drive.coeff(n));
      }
      for (const auto& jump : g.jumps) {
        const int s = jump.band.offset;
        if (m + s < dim && n + s < dim) {
          trip.emplace_back(
              row, vec_index(m + s, n + s, dim),
              Cplx(jump.rate * jump.band.coeff(m) * jump.band.coeff(n), 0.0));
        }
      }
    }
  }
  return trip;
}

}  // namespace

void validate(const DissipationRates& rates) {
  if (rates.gamma1 < 0.0 || rates.gamma2 < 0.0 || rates.gamma_perp < 0.0) {
    throw std::invalid_argument("DissipationRates: rates must be >= 0");
  }
}

bool parity_preserving(const ModelSpec& spec, const DissipationRates& rates) {
  if (rates.gamma1 > 0.0) return false;
  if (spec.kind != ModelKind::TwoPhotonDrive && spec.epsilon > 0.0) return false;
  return true;
}

Mat lindblad_rhs(const ModelSpec& spec, const DissipationRates& rates,
                 const DensityOperator& rho) {
  validate(rates);
  FockSpace space = rho.space();
  const Mat& r = rho.matrix();
  const Mat h = hamiltonian(space, spec).matrix();
  Mat out = -kI * (h * r - r * h);
  auto dissipate = [&](const Mat& l, double rate) {
    if (rate <= 0.0) return;
    Mat ldl = l.adjoint() * l;
    out += rate * (l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl));
  };
  const Mat a = annihilation(space).matrix();
  dissipate(a, rates.gamma1);
  dissipate(a * a, rates.gamma2);
  dissipate(number_operator(space).matrix(), rates.gamma_perp);
  return out;
}

Vec vec_density(const Mat& rho) {
  return Eigen::Map<const Vec>(rho.data(), rho.size());
}

Mat unvec_density(const Vec& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw DimensionError("unvec_density: length is not dim^2");
  }
  return Eigen::Map<const Mat>(v.data(), dim, dim);
}

Mat liouvillian_matrix(const ModelSpec& spec, const DissipationRates& rates,
                       FockSpace space) {
  if (space.dim() > 64) {
    throw std::length_error(
        "liouvillian_matrix: dense superoperator beyond dim 64; use "
        "liouvillian_sparse or lindblad_rhs");
  }
  validate(rates);
  const Mat h = hamiltonian(space, spec).matrix();
  const Mat eye = Mat::Identity(space.dim(), space.dim());
  Mat superop = -kI * (kron(eye, h) - kron(h.transpose(), eye));
  const Mat a = annihilation(space).matrix();
  add_dissipator(superop, a, rates.gamma1);
  add_dissipator(superop, a * a, rates.gamma2);
  add_dissipator(superop, number_operator(space).matrix(), rates.gamma_perp);
  return superop;
}

SpMat liouvillian_sparse(const ModelSpec& spec, const DissipationRates& rates,
                         FockSpace space) {
  GeneratorBands g = make_bands(space, spec, rates);
  auto trip = generator_triplets(g);
  SpMat l(space.dim() * space.dim(), space.dim() * space.dim());
  l.setFromTriplets(trip.begin(), trip.end());
  l.makeCompressed();
  return l;
}

std::vector<Vec> null_space_basis(const Mat& superop, int expected_nullity,
                                  double rel_tol) {
  if (superop.rows() != superop.cols()) {
    throw DimensionError("null_space_basis: matrix must be square");
  }
  Eigen::BDCSVD<Mat> svd(superop, Eigen::ComputeFullV);
  const RealVec& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rel_tol * sv(0) : 0.0;
  std::vector<Vec> basis;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) basis.push_back(svd.matrixV().col(i));
  }
  if (expected_nullity >= 0 &&
      static_cast<int>(basis.size()) != expected_nullity) {
    std::string tail;
    for (int i = std::max<int>(0, sv.size() - 4); i < sv.size(); ++i) {
      tail += ' ' + format_double(sv(i));
    }
    emit_warning("null_space_basis: found " + std::to_string(basis.size()) +
                 " null vectors, expected " + std::to_string(expected_nullity) +
                 "; smallest singular values:" + tail);
  }
  return basis;
}

Vec inverse_power_null_vector(const SpMat& superop, int iterations) {
  const int n = superop.rows();
  double scale = 0.0;
  for (int k = 0; k < superop.outerSize(); ++k) {
    for (SpMat::InnerIterator it(superop, k); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  SpMat shifted = superop;
  SpMat eye(n, n);
  eye.setIdentity();
  shifted -= Cplx(1e-12 * std::max(scale, 1.0), 0.0) * eye;
  Eigen::SparseLU<SpMat> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) {
    throw SolverError("inverse_power_null_vector: factorization failed");
  }
  Vec x = Vec::Constant(n, Cplx(1.0, 0.0) / std::sqrt(double(n)));
  for (int it = 0; it < iterations; ++it) {
    x = lu.solve(x);
    double nrm = x.norm();
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
      throw SolverError("inverse_power_null_vector: iteration diverged");
    }
    x /= nrm;
  }
  return x;
}

DensityOperator steady_state_sector(const ModelSpec& spec,
                                    const DissipationRates& rates,
                                    Parity parity, FockSpace space) {
  validate(rates);
  if (!parity_preserving(spec, rates)) {
    throw std::invalid_argument(
        "steady_state_sector: generator does not conserve parity "
        "(single-photon drive or gamma1 > 0)");
  }
  if (rates.gamma2 <= 0.0) {
    throw std::invalid_argument(
        "steady_state_sector: needs gamma2 > 0 for a unique sector steady "
        "state");
  }
  const int dim = space.dim();
  GeneratorBands g = make_bands(space, spec, rates);
  auto full = generator_triplets(g);

  auto levels = sector_levels(dim, parity);
  const int s = static_cast<int>(levels.size());
  std::vector<int> lookup(static_cast<size_t>(dim) * dim, -1);
  for (int b = 0; b < s; ++b) {
    for (int a = 0; a < s; ++a) {
      lookup[vec_index(levels[a], levels[b], dim)] = a + s * b;
    }
  }
  std::vector<Eigen::Triplet<Cplx>> restricted;
  restricted.reserve(full.size() / 2);
  for (const auto& t : full) {
    int pr = lookup[t.row()];
    int pc = lookup[t.col()];
    if (pr >= 0 && pc >= 0) restricted.emplace_back(pr, pc, t.value());
  }
  std::vector<int> trace_positions(s);
  for (int a = 0; a < s; ++a) trace_positions[a] = a + s * a;

  Vec x = solve_steady_system(s * s, std::move(restricted), trace_positions);
  DensityOperator rho = embed_sector_state(space, levels, x);
  check_steady_residual(spec, rates, rho);
  return rho;
}

DensityOperator steady_state_general(const ModelSpec& spec,
                                     const DissipationRates& rates,
                                     const DensityOperator& rho0) {
  ParitySplit split = parity_split(rho0);
  FockSpace space = rho0.space();
  if (split.p_odd < 1e-12) {
    return steady_state_sector(spec, rates, Parity::Even, space);
  }
  if (split.p_even < 1e-12) {
    return steady_state_sector(spec, rates, Parity::Odd, space);
  }
  DensityOperator even = steady_state_sector(spec, rates, Parity::Even, space);
  DensityOperator odd = steady_state_sector(spec, rates, Parity::Odd, space);
  return DensityOperator(
      space, split.p_even * even.matrix() + split.p_odd * odd.matrix());
}

DensityOperator steady_state_unique(const ModelSpec& spec,
                                    const DissipationRates& rates,
                                    FockSpace space) {
  validate(rates);
  if (parity_preserving(spec, rates)) {
    throw std::invalid_argument(
        "steady_state_unique: generator conserves parity, so the steady "
        "state is a sector mixture; use steady_state_general");
  }
  if (rates.gamma1 <= 0.0 && rates.gamma2 <= 0.0) {
    throw std::invalid_argument(
        "steady_state_unique: needs photon loss (gamma1 or gamma2)");
  }
  const int dim = space.dim();
  GeneratorBands g = make_bands(space, spec, rates);
  std::vector<int> trace_positions(dim);
  for (int n = 0; n < dim; ++n) trace_positions[n] = vec_index(n, n, dim);
  Vec x = solve_steady_system(dim * dim, generator_triplets(g), trace_positions);
  std::vector<int> levels(dim);
  for (int n = 0; n < dim; ++n) levels[n] = n;
  DensityOperator rho = embed_sector_state(space, levels, x);
  check_steady_residual(spec, rates, rho);
  return rho;
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Trajectory evolve(const ModelSpec& spec, const DissipationRates& rates,
                  const DensityOperator& rho0,
                  const std::vector<double>& t_grid,
                  const IntegratorOptions& options) {
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("evolve: t_grid must start at 0");
  }
  for (size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("evolve: t_grid must be strictly ascending");
    }
  }
  FockSpace space = rho0.space();
  const int dim = space.dim();
  GeneratorBands g = make_bands(space, spec, rates);

  Trajectory traj;
  traj.times = t_grid;
  traj.photon_probs.reserve(t_grid.size());
  if (options.store_states) traj.states.reserve(t_grid.size());

  Mat sigma = rho0.matrix();
  Mat k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), k5(dim, dim),
      k6(dim, dim), k7(dim, dim), ytmp(dim, dim), ynew(dim, dim);

  auto emit = [&](double t) {
    Vec back(dim);
    for (int m = 0; m < dim; ++m) back(m) = std::polar(1.0, -g.energies(m) * t);
    Mat rho = back.asDiagonal() * sigma * back.conjugate().asDiagonal();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-8) {
      throw SolverError("evolve: trace drifted to " + format_double(tr) +
                        " at t = " + format_double(t));
    }
    rho /= tr;
    traj.photon_probs.push_back(rho.diagonal().real());
    if (options.store_states) {
      traj.states.emplace_back(space, std::move(rho));
    }
  };

  emit(0.0);
  double t = 0.0;
  band_rhs(g, t, sigma, k1);

  // First-step guess h = 0.01 ||y||/||f|| in the scaled RMS norm; rejected
  // steps shrink it fast, so a rough value is enough. A zero derivative
  // (free Kerr evolution is exact in this picture) allows the full span.
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (int n = 0; n < dim; ++n) {
      for (int m = 0; m < dim; ++m) {
        double denom =
            options.abs_tol + options.rel_tol * std::abs(sigma(m, n));
        d0 += std::norm(sigma(m, n)) / (denom * denom);
        d1 += std::norm(k1(m, n)) / (denom * denom);
      }
    }
    double span = t_grid.back();
    h = d1 > 1e-30 * d0 ? std::min(0.01 * std::sqrt(d0 / d1), span) : span;
  }

  long steps = 0;
  for (size_t idx = 1; idx < t_grid.size(); ++idx) {
    const double target = t_grid[idx];
    while (target - t > 1e-12 * std::max(1.0, target)) {
      bool clamped = h >= target - t;
      double hs = clamped ? target - t : h;
      if (++steps > 20'000'000) {
        throw SolverError("evolve: step budget exhausted (generator too "
                          "stiff for the explicit stepper)");
      }
      if (hs < 1e-13 * std::max(1.0, std::abs(t))) {
        throw SolverError("evolve: step size collapsed at t = " +
                          format_double(t));
      }

      ytmp = sigma + hs * (a21 * k1);
      band_rhs(g, t + c2 * hs, ytmp, k2);
      ytmp = sigma + hs * (a31 * k1 + a32 * k2);
      band_rhs(g, t + c3 * hs, ytmp, k3);
      ytmp = sigma + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      band_rhs(g, t + c4 * hs, ytmp, k4);
      ytmp = sigma + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      band_rhs(g, t + c5 * hs, ytmp, k5);
      ytmp = sigma + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      band_rhs(g, t + hs, ytmp, k6);
      ynew = sigma + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      band_rhs(g, t + hs, ynew, k7);

      ytmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = 0.0;
      for (int n = 0; n < dim; ++n) {
        for (int m = 0; m < dim; ++m) {
          double denom = options.abs_tol +
                         options.rel_tol * std::max(std::abs(sigma(m, n)),
                                                    std::abs(ynew(m, n)));
          err = std::max(err, std::abs(ytmp(m, n)) / denom);
        }
      }

      if (err <= 1.0) {
        t += hs;
        sigma.swap(ynew);
        k1.swap(k7);
        double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        if (!clamped) {
          h = hs * factor;
        } else if (factor > 1.0) {
          h = std::max(h, hs * factor);
        }
      } else {
        h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
    }
    t = target;
    emit(t);
  }
  return traj;
}

}  // namespace blockade
