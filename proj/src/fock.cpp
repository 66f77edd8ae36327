#include "blockade/fock.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace blockade {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;

}  // namespace

FockSpace::FockSpace(int dim) : dim_(dim) {
  if (dim < 2) {
    throw DimensionError("FockSpace needs dim >= 2, got " +
                         std::to_string(dim));
  }
}

FockSpace make_space(int dim) { return FockSpace(dim); }

void require_same_space(const FockSpace& a, const FockSpace& b,
                        const char* context) {
  if (!(a == b)) {
    throw DimensionError(std::string(context) + ": dimension mismatch (" +
                         std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + ")");
  }
}

OperatorMatrix::OperatorMatrix(FockSpace space, Mat matrix, bool hermitian_hint)
    : space_(space), matrix_(std::move(matrix)), hermitian_(hermitian_hint) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw DimensionError("OperatorMatrix: matrix shape does not match space");
  }
  if (hermitian_) {
    double dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermTol) {
      throw std::invalid_argument(
          "OperatorMatrix: hermitian hint set but ||A - A^dag|| = " +
          std::to_string(dev));
    }
  }
}

StateVector::StateVector(FockSpace space, Vec amplitudes)
    : space_(space), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != space_.dim()) {
    throw DimensionError("StateVector: length does not match space");
  }
  double n = amplitudes_.norm();
  if (n < 1e-14) {
    throw std::invalid_argument("StateVector: vector has (near-)zero norm");
  }
  amplitudes_ /= n;
}

StateVector::StateVector(FockSpace space, Vec amplitudes, RawTag)
    : space_(space), amplitudes_(std::move(amplitudes)) {}

StateVector StateVector::raw(FockSpace space, Vec amplitudes) {
  if (amplitudes.size() != space.dim()) {
    throw DimensionError("StateVector: length does not match space");
  }
  return StateVector(space, std::move(amplitudes), RawTag{});
}

DensityOperator::DensityOperator(FockSpace space, Mat matrix)
    : space_(space), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.dim() || matrix_.cols() != space_.dim()) {
    throw DimensionError("DensityOperator: matrix shape does not match space");
  }
  double herm_dev = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm_dev > kHermTol) {
    throw std::invalid_argument(
        "DensityOperator: not Hermitian, ||rho - rho^dag|| = " +
        std::to_string(herm_dev));
  }
  double trace_dev = std::abs(matrix_.trace() - Cplx(1.0, 0.0));
  if (trace_dev > kTraceTol) {
    throw std::invalid_argument("DensityOperator: trace deviates by " +
                                std::to_string(trace_dev));
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  const Vec& c = psi.amplitudes();
  double n2 = c.squaredNorm();
  if (n2 < 1e-14) {
    throw std::invalid_argument("DensityOperator::pure: zero state");
  }
  return DensityOperator(psi.space(), (c * c.adjoint()) / n2);
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(matrix_,
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

OperatorMatrix annihilation(FockSpace space) {
  Mat a = Mat::Zero(space.dim(), space.dim());
  for (int n = 1; n < space.dim(); ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return OperatorMatrix(space, std::move(a));
}

OperatorMatrix creation(FockSpace space) { return adjoint(annihilation(space)); }

OperatorMatrix number_operator(FockSpace space) {
  Mat n = Mat::Zero(space.dim(), space.dim());
  for (int k = 0; k < space.dim(); ++k) n(k, k) = static_cast<double>(k);
  return OperatorMatrix(space, std::move(n), true);
}

OperatorMatrix identity_operator(FockSpace space) {
  return OperatorMatrix(space, Mat::Identity(space.dim(), space.dim()), true);
}

OperatorMatrix displacement_matrix(FockSpace space, Cplx beta) {
  const int dim = space.dim();
  Mat d(dim, dim);
  double r = std::abs(beta);
  if (r == 0.0) {
    return OperatorMatrix(space, Mat::Identity(dim, dim));
  }
  double x = r * r;
  double phase_angle = std::arg(beta);

  // One associated Laguerre recurrence per |n - n0| offset fills the matrix
  // in O(dim^2):
  //   <n|D|n0> = sqrt(nlo! / nhi!) * (+-r e^{i phi})^{nhi-nlo}
  //              * e^{-x/2} L_nlo^{(nhi-nlo)}(x)
  // with nlo = min(n, n0), nhi = max(n, n0); the sign is - for n < n0.
  std::vector<double> lgam(dim + 1);
  for (int n = 0; n <= dim; ++n) lgam[n] = std::lgamma(n + 1.0);

  for (int off = 0; off < dim; ++off) {
    double lk_prev = 0.0;  // L_{k-1}^{(off)}(x)
    double lk = 1.0;       // L_k^{(off)}(x), starting at k = 0
    for (int nlo = 0; nlo + off < dim; ++nlo) {
      int nhi = nlo + off;
      if (nlo > 0) {
        // (k+1) L_{k+1} = (2k+1+off-x) L_k - (k+off) L_{k-1}, stepping k = nlo-1.
        int k = nlo - 1;
        double lk_next =
            ((2.0 * k + 1.0 + off - x) * lk - (k + off) * lk_prev) / (k + 1.0);
        lk_prev = lk;
        lk = lk_next;
      }
      double magnitude = std::exp(-0.5 * x + off * std::log(r) +
                                  0.5 * (lgam[nlo] - lgam[nhi])) *
                         lk;
      Cplx up = magnitude * std::polar(1.0, off * phase_angle);
      d(nhi, nlo) = up;
      if (off > 0) {
        // Lowering column: extra (-1)^{n0-n} and conjugated phase.
        double sign = (off % 2 == 0) ? 1.0 : -1.0;
        d(nlo, nhi) = sign * magnitude * std::polar(1.0, -off * phase_angle);
      }
    }
  }
  return OperatorMatrix(space, std::move(d));
}

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_space(a.space(), b.space(), "multiply");
  return OperatorMatrix(a.space(), a.matrix() * b.matrix());
}

OperatorMatrix adjoint(const OperatorMatrix& a) {
  return OperatorMatrix(a.space(), a.matrix().adjoint(), a.hermitian_hint());
}

StateVector apply(const OperatorMatrix& a, const StateVector& psi) {
  require_same_space(a.space(), psi.space(), "apply");
  return StateVector::raw(psi.space(), a.matrix() * psi.amplitudes());
}

Cplx expectation(const OperatorMatrix& a, const StateVector& psi) {
  require_same_space(a.space(), psi.space(), "expectation");
  return psi.amplitudes().dot(a.matrix() * psi.amplitudes());
}

Cplx expectation(const OperatorMatrix& a, const DensityOperator& rho) {
  require_same_space(a.space(), rho.space(), "expectation");
  return (a.matrix() * rho.matrix()).trace();
}

}  // namespace blockade
