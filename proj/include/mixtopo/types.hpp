#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mixtopo {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Chain axis of a 1D decomposition of the 2D lattice.
enum class Direction { x, y };

inline const char* to_string(Direction d) { return d == Direction::x ? "x" : "y"; }
Direction direction_from_string(const std::string& s);

// Error hierarchy. Everything thrown by the library derives from Error so
// the CLI can map it onto an exit code.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input (configuration, file contents, argument ranges).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed: gap closing, vanishing overlaps,
/// non-Hermitian input, rank deficiency.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A sampled phase profile or path is too coarse; the message carries a
/// refinement hint.
class UnderResolvedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The ensemble-geometric-phase amplitude vanished (generalized gap violated).
class ZeroAmplitudeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Principal value of an angle in (-pi, pi].
inline double principal_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace mixtopo
