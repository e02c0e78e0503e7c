#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mixtopo/gaussian.hpp"
#include "mixtopo/geometry.hpp"

namespace mixtopo {

/// Tr{rho exp(i sum_a theta_a n_a)} held as log-modulus and phase, so chains of
/// hundreds of modes neither underflow nor overflow.
struct TraceAmplitude {
  double log_modulus = 0.0;
  double phase = 0.0;  // (-pi, pi]
  /// Smallest / largest LU pivot magnitude; tiny values mean a vanishing trace.
  double pivot_ratio = 1.0;

  double modulus() const { return std::exp(log_modulus); }
  cplx value() const { return std::polar(modulus(), phase); }
};

/// Pivot ratio below which the amplitude is treated as zero.
inline constexpr double kZeroAmplitudeTolerance = 1e-12;

/// det[1 + C (D - 1)] with D = diag(e^{i theta}) and C_ab = <c^dagger_a c_b>:
/// the trace of a number-conserving Gaussian state against a diagonal
/// single-particle unitary.
TraceAmplitude gaussian_trace_diagonal_unitary(const Matrix& correlation,
                                               std::span<const double> angles);

/// theta_(j, lambda) = 2 pi j / N for cells j = 0..N-1, identical within a cell.
std::vector<double> position_angles(int cells, int orbitals);

struct EgpResult {
  Direction direction = Direction::x;
  double transverse_k = 0.0;
  int cells = 0;
  double phase = 0.0;
  double log_modulus = 0.0;

  double modulus() const { return std::exp(log_modulus); }
};

/// Ensemble geometric phase Im ln Tr{rho e^{2 pi i X / N}} of the chain along
/// `direction` at fixed transverse momentum. Throws ZeroAmplitudeError when the
/// trace vanishes.
EgpResult egp_component(const GaussianStateSpec& spec, Direction direction, double transverse_k,
                        int cells);

/// egp_component over `transverse_points` uniform samples of the transverse
/// momentum. `temperature` is recorded as metadata only.
PhaseProfile egp_profile(const GaussianStateSpec& spec, Direction direction, int cells,
                         int transverse_points, int jobs = 1);

/// (Cx, Cy) from the windings of the x-phase over ky and minus the y-phase
/// over kx. Throws NumericalError when the two disagree.
ChernPair egp_windings(const GaussianStateSpec& spec, int cells, int transverse_points,
                       int jobs = 1);

/// Resta phase of the ground state of the fictitious Hamiltonian on the same
/// N-cell chain: the N-point Wilson loop of the filled fictitious frame plus the
/// Slater-determinant ordering sign (-1)^{filled (N - 1)}. This is what the EGP
/// reduces to at zero temperature.
double fictitious_ground_state_phase(const GaussianStateSpec& spec, Direction direction,
                                     double transverse_k, int cells);

struct GaugeReductionPoint {
  int cells = 0;
  double egp_phase = 0.0;
  double reference_phase = 0.0;
  double deviation = 0.0;  // |principal(egp - reference)|
  double log_modulus = 0.0;
};

std::vector<GaugeReductionPoint> gauge_reduction_deviation(const GaussianStateSpec& spec,
                                                           Direction direction,
                                                           double transverse_k,
                                                           const std::vector<int>& cells);

/// Least-squares slope of log(deviation) against log(N), negated: an estimate
/// of the decay exponent. Needs two or more points with nonzero deviation.
double fit_decay_exponent(const std::vector<GaugeReductionPoint>& points);

/// A closed loop t in [-pi, pi) of chain states.
using StateFamily = std::function<GaussianStateSpec(double t)>;

/// EGP phase of family(t) along x at zero transverse momentum, sampled on the loop.
PhaseProfile pump_profile(const StateFamily& family, int cells, int t_points, int jobs = 1);

/// Winding of the EGP over the loop.
int pump_winding(const StateFamily& family, int cells, int t_points, int jobs = 1);

}  // namespace mixtopo
