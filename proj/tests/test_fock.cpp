#include <doctest.h>

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "blockade/fock.hpp"
#include "blockade/states.hpp"

using namespace blockade;

namespace {

double hermiticity_defect(const Mat& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Reference displacement operator through the eigendecomposition of the
// anti-Hermitian generator beta a^dag - conj(beta) a = i H.
Mat displacement_by_expm(FockSpace space, Cplx beta) {
  Mat gen = beta * creation(space).matrix() -
            std::conj(beta) * annihilation(space).matrix();
  Mat h = -kI * gen;
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec phases(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    phases(i) = std::polar(1.0, es.eigenvalues()(i));
  }
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

TEST_SUITE("fock") {

TEST_CASE("space rejects dimensions below two") {
  CHECK_THROWS_AS(make_space(1), DimensionError);
  CHECK_THROWS_AS(make_space(0), DimensionError);
  CHECK_THROWS_AS(make_space(-3), DimensionError);
  CHECK(make_space(2).dim() == 2);
}

TEST_CASE("ladder operators carry sqrt(n) matrix elements") {
  FockSpace space = make_space(8);
  Mat a = annihilation(space).matrix();
  Mat ad = creation(space).matrix();
  for (int n = 1; n < 8; ++n) {
    CHECK(a(n - 1, n).real() == doctest::Approx(std::sqrt(double(n))));
    CHECK(ad(n, n - 1).real() == doctest::Approx(std::sqrt(double(n))));
  }
  CHECK(a.cwiseAbs().sum() == doctest::Approx(ad.cwiseAbs().sum()));
  CHECK((ad - a.adjoint()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("commutator equals identity except the truncation corner") {
  FockSpace space = make_space(12);
  Mat a = annihilation(space).matrix();
  Mat comm = a * a.adjoint() - a.adjoint() * a;
  // Truncation turns [a, a^dag] into I - dim |d-1><d-1|.
  for (int n = 0; n < 11; ++n) {
    CHECK(comm(n, n).real() == doctest::Approx(1.0));
  }
  CHECK(comm(11, 11).real() == doctest::Approx(1.0 - 12.0));
  comm.diagonal().setZero();
  CHECK(comm.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("number operator is a^dag a") {
  FockSpace space = make_space(9);
  Mat n_direct = number_operator(space).matrix();
  Mat n_product = creation(space).matrix() * annihilation(space).matrix();
  CHECK((n_direct - n_product).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(number_operator(space).hermitian_hint());
}

TEST_CASE("state vector constructor normalizes") {
  FockSpace space = make_space(4);
  Vec v(4);
  v << 3.0, 0.0, 4.0, 0.0;
  StateVector psi(space, v);
  CHECK(psi.norm() == doctest::Approx(1.0));
  CHECK(std::abs(psi.amplitudes()(0)) == doctest::Approx(0.6));

  Vec zero = Vec::Zero(4);
  CHECK_THROWS_AS(StateVector(space, zero), std::invalid_argument);
}

TEST_CASE("raw state keeps operator scaling") {
  FockSpace space = make_space(6);
  StateVector three = fock_state(space, 3);
  StateVector result = apply(number_operator(space), three);
  CHECK(std::abs(result.amplitudes()(3)) == doctest::Approx(3.0));
  CHECK(result.norm() == doctest::Approx(3.0));
}

TEST_CASE("density operator validates hermiticity and trace") {
  FockSpace space = make_space(3);
  Mat bad = Mat::Zero(3, 3);
  bad(0, 1) = 0.5;
  bad(0, 0) = 1.0;
  CHECK_THROWS_AS(DensityOperator(space, bad), std::invalid_argument);

  Mat half = Mat::Zero(3, 3);
  half(0, 0) = 0.5;
  CHECK_THROWS_AS(DensityOperator(space, half), std::invalid_argument);

  DensityOperator rho = DensityOperator::pure(fock_state(space, 1));
  CHECK(rho.matrix()(1, 1).real() == doctest::Approx(1.0));
  CHECK(rho.min_eigenvalue() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("operators on mismatched spaces are rejected") {
  OperatorMatrix a = annihilation(make_space(5));
  OperatorMatrix b = creation(make_space(6));
  CHECK_THROWS_AS(multiply(a, b), DimensionError);
  CHECK_THROWS_AS(apply(a, fock_state(make_space(6), 0)), DimensionError);
}

TEST_CASE("expectation values against known states") {
  FockSpace space = make_space(40);
  StateVector coh = coherent_state(space, Cplx(1.2, -0.7));
  double nbar = std::norm(Cplx(1.2, -0.7));
  CHECK(expectation(number_operator(space), coh).real() ==
        doctest::Approx(nbar).epsilon(1e-9));
  CHECK(expectation(annihilation(space), coh).real() ==
        doctest::Approx(1.2).epsilon(1e-9));
  CHECK(expectation(annihilation(space), coh).imag() ==
        doctest::Approx(-0.7).epsilon(1e-9));

  DensityOperator rho = DensityOperator::pure(fock_state(space, 4));
  CHECK(expectation(number_operator(space), rho).real() ==
        doctest::Approx(4.0));
}

TEST_CASE("displacement at zero is the identity") {
  FockSpace space = make_space(15);
  Mat d = displacement_matrix(space, Cplx(0.0, 0.0)).matrix();
  CHECK((d - Mat::Identity(15, 15)).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("displacement matches the exponentiated generator") {
  // The walk gives exact matrix elements at any dim; the exponentiated
  // truncated generator only matches deep inside the space, so the oracle
  // runs at dim 40 and the comparison stays in the 15 x 15 corner.
  FockSpace space = make_space(40);
  for (Cplx beta : {Cplx(0.7, 0.3), Cplx(-1.1, 0.0), Cplx(0.0, 0.9)}) {
    Mat walk = displacement_matrix(space, beta).matrix();
    Mat expm = displacement_by_expm(space, beta);
    CHECK((walk - expm).topLeftCorner(15, 15).cwiseAbs().maxCoeff() <
          1e-10);
  }
}

TEST_CASE("displacement column zero is the coherent expansion") {
  FockSpace space = make_space(30);
  Cplx beta(0.8, -0.4);
  Mat d = displacement_matrix(space, beta).matrix();
  Vec coh = coherent_state(space, beta).amplitudes();
  CHECK((d.col(0) - coh).cwiseAbs().maxCoeff() < 1e-12);
}

// The entries are exact, but products of truncated matrices leak through
// the missing rows above dim, so D^dag D only looks unitary in a corner
// well below the edge. dim 60 buries the 25 x 25 corner deep enough for
// 1e-10 at |beta| about 1.
TEST_CASE("displacement is unitary away from the truncation corner") {
  FockSpace space = make_space(60);
  Mat d = displacement_matrix(space, Cplx(0.9, 0.5)).matrix();
  Mat gram = d.adjoint() * d;
  CHECK((gram - Mat::Identity(60, 60)).topLeftCorner(25, 25)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK(hermiticity_defect(gram) < 1e-12);
}

TEST_CASE("displacements compose to the identity") {
  FockSpace space = make_space(60);
  Cplx beta(0.6, 0.2);
  Mat d = displacement_matrix(space, beta).matrix();
  Mat dinv = displacement_matrix(space, -beta).matrix();
  CHECK(((d * dinv) - Mat::Identity(60, 60)).topLeftCorner(18, 18)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

}  // TEST_SUITE
