#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "blockade/analysis.hpp"
#include "blockade/liouville.hpp"
#include "blockade/states.hpp"
#include "blockade/util.hpp"

using namespace blockade;

namespace {

// Quiet sink for tests that intentionally use undersized grids.
struct MuteWarnings {
  WarningHandler previous;
  MuteWarnings() {
    previous = set_warning_handler([](const std::string&) {});
  }
  ~MuteWarnings() { set_warning_handler(previous); }
};

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("photon probabilities and manifold fidelity") {
  FockSpace space = make_space(10);
  DensityOperator rho = thermal_state(space, 1.0);
  RealVec probs = photon_probabilities(rho);
  CHECK(probs.sum() == doctest::Approx(1.0));
  double f = blockade_fidelity(rho, {0, 1});
  CHECK(f == doctest::Approx(probs(0) + probs(1)));
  CHECK_THROWS_AS(blockade_fidelity(rho, {0, 10}), DimensionError);
  CHECK_THROWS_AS(blockade_fidelity(rho, {-1}), DimensionError);
}

TEST_CASE("mean photon number for reference states") {
  FockSpace space = make_space(60);
  CHECK(mean_photon(DensityOperator::pure(fock_state(space, 5))) ==
        doctest::Approx(5.0));
  CHECK(mean_photon(thermal_state(space, 2.0)) ==
        doctest::Approx(2.0).epsilon(1e-8));
  CHECK(mean_photon(coherent_state(space, Cplx(1.4, -0.3))) ==
        doctest::Approx(std::norm(Cplx(1.4, -0.3))).epsilon(1e-9));
}

TEST_CASE("trace distance basics") {
  FockSpace space = make_space(8);
  DensityOperator zero = DensityOperator::pure(fock_state(space, 0));
  DensityOperator one = DensityOperator::pure(fock_state(space, 1));
  CHECK(trace_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
  CHECK(trace_distance(zero, one) == doctest::Approx(trace_distance(one, zero)));
  DensityOperator mixed = thermal_state(space, 0.5);
  double d = trace_distance(zero, mixed);
  CHECK(d > 0.0);
  CHECK(d < 1.0);
  CHECK_THROWS_AS(trace_distance(zero, thermal_state(make_space(9), 0.5)),
                  DimensionError);
}

TEST_CASE("linspace endpoints and spacing") {
  RealVec axis = linspace(-2.0, 3.0, 11);
  CHECK(axis.size() == 11);
  CHECK(axis(0) == doctest::Approx(-2.0));
  CHECK(axis(10) == doctest::Approx(3.0));
  CHECK(axis(1) - axis(0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("wigner of vacuum is the known gaussian") {
  FockSpace space = make_space(20);
  DensityOperator vac = DensityOperator::pure(fock_state(space, 0));
  WignerGrid grid = wigner(vac, linspace(-4.0, 4.0, 33), linspace(-4.0, 4.0, 33));
  // W(q, p) = exp(-(q^2 + p^2)) / pi
  for (int i = 0; i < grid.q_axis.size(); i += 4) {
    for (int j = 0; j < grid.p_axis.size(); j += 4) {
      double q = grid.q_axis(i), p = grid.p_axis(j);
      double expect = std::exp(-(q * q + p * p)) / kPi;
      CHECK(grid.values(i, j) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("wigner central values follow the parity expectation") {
  FockSpace space = make_space(40);
  MuteWarnings mute;
  RealVec axis = linspace(-1.0, 1.0, 3);  // midpoint is the origin

  DensityOperator one = DensityOperator::pure(fock_state(space, 1));
  CHECK(wigner(one, axis, axis).values(1, 1) ==
        doctest::Approx(-1.0 / kPi).epsilon(1e-10));

  // parity eigenstates pin W(0) at +-1/pi
  DensityOperator even_cat =
      DensityOperator::pure(cat_state(space, Cplx(1.7, 0.0), 0.0));
  CHECK(wigner(even_cat, axis, axis).values(1, 1) ==
        doctest::Approx(1.0 / kPi).epsilon(1e-10));
  DensityOperator odd_cat =
      DensityOperator::pure(cat_state(space, Cplx(1.7, 0.0), kPi));
  CHECK(wigner(odd_cat, axis, axis).values(1, 1) ==
        doctest::Approx(-1.0 / kPi).epsilon(1e-10));

  // thermal mixture interpolates: sum (-1)^n p_n = 1 / (1 + 2 nbar)
  DensityOperator th = thermal_state(space, 1.0);
  CHECK(wigner(th, axis, axis).values(1, 1) ==
        doctest::Approx(1.0 / (3.0 * kPi)).epsilon(1e-8));
}

TEST_CASE("wigner of a displaced state peaks at the displacement") {
  FockSpace space = make_space(35);
  Cplx alpha(1.0, -0.5);
  DensityOperator coh = DensityOperator::pure(coherent_state(space, alpha));
  // beta = q + i p, alpha = beta / sqrt(2): peak at q = sqrt(2) Re alpha
  double q0 = std::sqrt(2.0) * alpha.real();
  double p0 = std::sqrt(2.0) * alpha.imag();
  RealVec qa = linspace(q0 - 3.0, q0 + 3.0, 25);
  RealVec pa = linspace(p0 - 3.0, p0 + 3.0, 25);
  MuteWarnings mute;
  WignerGrid grid = wigner(coh, qa, pa);
  CHECK(grid.values(12, 12) == doctest::Approx(1.0 / kPi).epsilon(1e-8));
  CHECK(grid.values.maxCoeff() == doctest::Approx(1.0 / kPi).epsilon(1e-8));
}

TEST_CASE("wigner integral is normalized") {
  FockSpace space = make_space(25);
  RealVec axis = linspace(-5.0, 5.0, 81);
  DensityOperator vac = DensityOperator::pure(fock_state(space, 0));
  CHECK(wigner_integral(wigner(vac, axis, axis)) ==
        doctest::Approx(1.0).epsilon(1e-4));
  DensityOperator two = DensityOperator::pure(fock_state(space, 2));
  CHECK(wigner_integral(wigner(two, axis, axis)) ==
        doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("undersized grids warn about missing support") {
  FockSpace space = make_space(30);
  DensityOperator big = DensityOperator::pure(coherent_state(space, {2.0, 0.0}));
  int fired = 0;
  WarningHandler prev =
      set_warning_handler([&fired](const std::string&) { ++fired; });
  wigner(big, linspace(-1.0, 1.0, 5), linspace(-1.0, 1.0, 5));
  set_warning_handler(prev);
  CHECK(fired > 0);
}

TEST_CASE("grid values are identical across worker counts") {
  FockSpace space = make_space(25);
  DensityOperator rho = thermal_state(space, 1.2);
  RealVec axis = linspace(-3.0, 3.0, 21);

  setenv("BLOCKADE_THREADS", "1", 1);
  WignerGrid serial = wigner(rho, axis, axis);
  setenv("BLOCKADE_THREADS", "4", 1);
  WignerGrid pooled = wigner(rho, axis, axis);
  unsetenv("BLOCKADE_THREADS");

  CHECK((serial.values - pooled.values).cwiseAbs().maxCoeff() == 0.0);
}

}  // TEST_SUITE
