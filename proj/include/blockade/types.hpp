#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace blockade {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<Cplx>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr Cplx kI{0.0, 1.0};

enum class Parity { Even, Odd };

// Operands built on different truncated spaces must never be combined.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed run description (config file or command line).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed to reach its stated tolerance.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Requested state or evolution does not fit in the truncated basis.
class TruncationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace blockade
