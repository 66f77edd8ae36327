#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "blockade/analysis.hpp"
#include "blockade/states.hpp"
#include "blockade/util.hpp"

using namespace blockade;

namespace {

// RAII capture of emit_warning for tests that expect (or forbid) warnings.
struct CaptureWarnings {
  std::vector<std::string> messages;
  WarningHandler previous;
  CaptureWarnings() {
    previous = set_warning_handler(
        [this](const std::string& m) { messages.push_back(m); });
  }
  ~CaptureWarnings() { set_warning_handler(previous); }
};

double lfact(int n) { return std::lgamma(n + 1.0); }

}  // namespace

TEST_SUITE("states") {

TEST_CASE("fock state basis vectors") {
  FockSpace space = make_space(5);
  StateVector psi = fock_state(space, 3);
  for (int n = 0; n < 5; ++n) {
    CHECK(std::abs(psi.amplitudes()(n)) ==
          doctest::Approx(n == 3 ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(fock_state(space, 5), DimensionError);
  CHECK_THROWS_AS(fock_state(space, -1), DimensionError);
}

TEST_CASE("coherent amplitudes match the explicit formula") {
  FockSpace space = make_space(35);
  Cplx alpha(0.8, 0.6);
  StateVector psi = coherent_state(space, alpha);
  for (int n = 0; n < 12; ++n) {
    Cplx direct = std::pow(alpha, n) *
                  std::exp(-0.5 * std::norm(alpha) - 0.5 * lfact(n));
    CHECK(std::abs(psi.amplitudes()(n) - direct) < 1e-12);
  }
  CHECK(psi.norm() == doctest::Approx(1.0));
  CHECK(mean_photon(psi) == doctest::Approx(std::norm(alpha)).epsilon(1e-10));
}

TEST_CASE("coherent truncation warns when the tail is cut") {
  CaptureWarnings capture;
  coherent_state(make_space(8), Cplx(3.0, 0.0));
  CHECK(capture.messages.size() > 0);
}

TEST_CASE("coherent parity split matches the closed form") {
  FockSpace space = make_space(50);
  for (double a : {0.25, 0.75, 1.5, 2.0}) {
    ParitySplit numeric = parity_split(coherent_state(space, Cplx(a, 0.0)));
    ParitySplit exact =
        closed_form_parity(StateFamily::Coherent, {.alpha = Cplx(a, 0.0)});
    CHECK(numeric.p_even == doctest::Approx(exact.p_even).epsilon(1e-10));
    CHECK(numeric.ratio_r == doctest::Approx(exact.ratio_r).epsilon(1e-9));
  }
}

TEST_CASE("closed-form parity reference values") {
  ParitySplit coh =
      closed_form_parity(StateFamily::Coherent, {.alpha = Cplx(0.75, 0.0)});
  CHECK(coh.p_even == doctest::Approx(0.5 * (1.0 + std::exp(-1.125)))
                          .epsilon(1e-12));
  CHECK(coh.ratio_r == doctest::Approx(0.50983).epsilon(1e-4));

  ParitySplit th = closed_form_parity(StateFamily::Thermal, {.mean_n = 1.0});
  CHECK(th.p_even == doctest::Approx(2.0 / 3.0));
  CHECK(th.p_odd == doctest::Approx(1.0 / 3.0));
  CHECK(th.ratio_r == doctest::Approx(0.5));

  ParitySplit pat = closed_form_parity(StateFamily::PhotonAddedThermal,
                                       {.mean_n = 2.0});
  CHECK(pat.p_even == doctest::Approx(0.375));
  CHECK(pat.p_odd == doctest::Approx(0.625));
  CHECK(pat.ratio_r == doctest::Approx(5.0 / 3.0));

  ParitySplit cat = closed_form_parity(
      StateFamily::Cat, {.alpha = Cplx(2.0, 0.0), .phi = kPi / 4.0});
  CHECK(cat.ratio_r == doctest::Approx(0.1714578).epsilon(1e-5));
}

TEST_CASE("cat states sit in one parity sector at phi = 0 and pi") {
  FockSpace space = make_space(40);
  StateVector even = cat_state(space, Cplx(1.5, 0.0), 0.0);
  StateVector odd = cat_state(space, Cplx(1.5, 0.0), kPi);
  for (int n = 0; n < 40; ++n) {
    if (n % 2 == 1) CHECK(std::abs(even.amplitudes()(n)) < 1e-14);
    if (n % 2 == 0) CHECK(std::abs(odd.amplitudes()(n)) < 1e-14);
  }
  CHECK(parity_split(even).p_even == doctest::Approx(1.0));
  CHECK(parity_split(odd).p_odd == doctest::Approx(1.0));
}

TEST_CASE("cat state with no surviving component is rejected") {
  FockSpace space = make_space(20);
  CHECK_THROWS_AS(cat_state(space, Cplx(0.0, 0.0), kPi),
                  std::invalid_argument);
  // alpha = 0, phi = 0 is just the vacuum
  StateVector vac = cat_state(space, Cplx(0.0, 0.0), 0.0);
  CHECK(std::abs(vac.amplitudes()(0)) == doctest::Approx(1.0));
}

TEST_CASE("cat parity interpolates between the sectors") {
  FockSpace space = make_space(45);
  Cplx alpha(2.0, 0.0);
  for (double phi : {0.3, kPi / 4.0, 1.9, 2.8}) {
    ParitySplit numeric = parity_split(cat_state(space, alpha, phi));
    ParitySplit exact =
        closed_form_parity(StateFamily::Cat, {.alpha = alpha, .phi = phi});
    CHECK(numeric.p_even == doctest::Approx(exact.p_even).epsilon(1e-10));
  }
}

TEST_CASE("squeezed state reduces to coherent at zero squeezing") {
  FockSpace space = make_space(35);
  Cplx alpha(1.1, -0.4);
  StateVector sq = squeezed_state(space, alpha, Cplx(0.0, 0.0));
  StateVector coh = coherent_state(space, alpha);
  CHECK((sq.amplitudes() - coh.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("squeezed vacuum keeps even levels and the known mean") {
  FockSpace space = make_space(60);
  double r = 0.9;
  StateVector sq = squeezed_state(space, Cplx(0.0, 0.0), Cplx(r, 0.0));
  for (int n = 1; n < 60; n += 2) {
    CHECK(std::abs(sq.amplitudes()(n)) == doctest::Approx(0.0));
  }
  CHECK(sq.norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean_photon(sq) ==
        doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-8));
}

TEST_CASE("squeezed vacuum level populations follow the exact law") {
  FockSpace space = make_space(40);
  double r = 0.6;
  StateVector sq = squeezed_state(space, Cplx(0.0, 0.0), Cplx(r, 0.0));
  // |c_{2m}|^2 = (2m)! tanh^{2m} r / ((2^m m!)^2 cosh r)
  for (int m = 0; m < 6; ++m) {
    double expect = std::exp(lfact(2 * m) - 2.0 * m * std::log(2.0) -
                             2.0 * lfact(m)) *
                    std::pow(std::tanh(r), 2 * m) / std::cosh(r);
    CHECK(std::norm(sq.amplitudes()(2 * m)) ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("displaced number state is a displacement column") {
  FockSpace space = make_space(30);
  Cplx alpha(0.9, 0.3);
  StateVector d0 = displaced_number_state(space, alpha, 0);
  StateVector coh = coherent_state(space, alpha);
  CHECK((d0.amplitudes() - coh.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

  StateVector d2 = displaced_number_state(space, alpha, 2);
  CHECK(d2.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mean_photon(d2) ==
        doctest::Approx(2.0 + std::norm(alpha)).epsilon(1e-8));
}

TEST_CASE("thermal state is geometric with the requested mean") {
  FockSpace space = make_space(80);
  DensityOperator th = thermal_state(space, 1.5);
  RealVec probs = photon_probabilities(th);
  double ratio = 1.5 / 2.5;
  for (int n = 0; n + 1 < 20; ++n) {
    CHECK(probs(n + 1) / probs(n) == doctest::Approx(ratio).epsilon(1e-10));
  }
  CHECK(mean_photon(th) == doctest::Approx(1.5).epsilon(1e-8));
  ParitySplit split = parity_split(th);
  CHECK(split.p_even == doctest::Approx(2.5 / 4.0).epsilon(1e-9));
  CHECK_THROWS_AS(thermal_state(space, -0.1), std::invalid_argument);
}

TEST_CASE("photon-added thermal distribution and parity") {
  FockSpace space = make_space(100);
  DensityOperator pat = photon_added_thermal_state(space, 2.0);
  RealVec probs = photon_probabilities(pat);
  CHECK(probs(0) == doctest::Approx(0.0));
  // p_n proportional to n q^n with q = (mean-1)/(mean+1)
  double q = 1.0 / 3.0;
  for (int n = 1; n + 1 < 15; ++n) {
    CHECK(probs(n + 1) / probs(n) ==
          doctest::Approx(q * (n + 1.0) / n).epsilon(1e-9));
  }
  ParitySplit split = parity_split(pat);
  ParitySplit exact =
      closed_form_parity(StateFamily::PhotonAddedThermal, {.mean_n = 2.0});
  CHECK(split.p_even == doctest::Approx(exact.p_even).epsilon(1e-9));

  DensityOperator edge = photon_added_thermal_state(space, 1.0);
  CHECK(photon_probabilities(edge)(1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(photon_added_thermal_state(space, 0.5),
                  std::invalid_argument);
}

TEST_CASE("parity split ratio handles an empty even sector") {
  FockSpace space = make_space(10);
  ParitySplit odd_only = parity_split(fock_state(space, 1));
  CHECK(odd_only.p_odd == doctest::Approx(1.0));
  CHECK(std::isinf(odd_only.ratio_r));
}

}  // TEST_SUITE
