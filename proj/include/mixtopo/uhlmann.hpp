#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixtopo/geometry.hpp"
#include "mixtopo/model.hpp"

namespace mixtopo {

/// A density matrix kept in spectral form rho = basis diag(weights) basis^dagger.
/// Square roots are taken on the weights, so nearly pure states keep full
/// relative accuracy in their small eigenvalues.
struct DensityPoint {
  Matrix basis;
  RealVector weights;

  Matrix rho() const;
  Matrix sqrt_rho() const;
};

/// Decomposes a user-supplied density matrix. Requires Hermitian, unit trace
/// (1e-12) and eigenvalues >= -1e-12.
DensityPoint density_point(const Matrix& rho);

/// Thermal single-particle state e^{-beta (h(k) - mu)} / Tr at one momentum,
/// with Boltzmann weights computed from the spectrum of h.
DensityPoint thermal_density_point(const BlochModel& model, double beta, double mu,
                                   const MomentumPoint& k);
Matrix thermal_density_k(const BlochModel& model, double beta, double mu, const MomentumPoint& k);

/// Closed loop of density matrices; point M+1 is identified with point 1.
struct DensityMatrixPath {
  std::vector<DensityPoint> points;
};

DensityMatrixPath thermal_loop(const BlochModel& model, double beta, double mu, Direction direction,
                               double transverse_k, int samples);

/// Unitary polar factor of sqrt(rho_b) sqrt(rho_a): the discrete Uhlmann
/// parallel-transport step from a to b. Both states must be full rank.
Matrix uhlmann_link(const DensityPoint& a, const DensityPoint& b);
Matrix uhlmann_link(const Matrix& rho_a, const Matrix& rho_b);

struct UhlmannHolonomy {
  Matrix unitary;
  /// Largest Frobenius distance of a link from the identity.
  double max_link_deviation = 0.0;
};

inline constexpr double kLinkDeviationLimit = 0.5;

/// Ordered product V_M ... V_1 of the links around the loop.
UhlmannHolonomy uhlmann_holonomy(const DensityMatrixPath& path);

struct UhlmannPhase {
  double phase = 0.0;
  double modulus = 0.0;
  int samples = 0;
};

/// Im ln Tr[rho(0) H_U]. Throws UnderResolvedError when a link is far from the
/// identity and NumericalError when the trace vanishes (below 1e-12).
UhlmannPhase uhlmann_phase(const DensityMatrixPath& path);

/// Independent route: parallel-transports arbitrary purifications w_i
/// (rho_i = w_i w_i^dagger, any right unitary gauge) and returns
/// arg Tr[w_1^dagger w_transported].
double uhlmann_phase_from_amplitudes(std::span<const Matrix> amplitudes);

struct PathRefinement {
  int initial_samples = 512;
  int max_samples = 8192;
  double tolerance = 1e-4;
};

/// Doubles the loop resolution until the phase changes by less than the
/// tolerance between successive resolutions.
UhlmannPhase converged_uhlmann_phase(const BlochModel& model, double beta, double mu,
                                     Direction direction, double transverse_k,
                                     const PathRefinement& refinement = {});

PhaseProfile uhlmann_profile(const BlochModel& model, double beta, double mu, Direction direction,
                             int transverse_points, const PathRefinement& refinement = {},
                             int jobs = 1);

/// Cx^U from the x-phase over ky, Cy^U = -winding of the y-phase over kx. No
/// equality is enforced.
ChernPair uhlmann_windings(const BlochModel& model, double beta, double mu, int transverse_points,
                           const PathRefinement& refinement = {}, int jobs = 1);

struct ScanOptions {
  int transverse_points = 64;
  /// Under-resolved profiles are retried with doubled sampling up to this.
  int max_transverse_points = 1024;
  int chain_length = 10;
  int ground_grid = 32;
  PathRefinement refinement{};
  int jobs = 1;
};

/// One temperature of a scan; missing fields mean that quantity failed and the
/// reason is in `status`.
struct InvariantReport {
  double temperature = 0.0;
  double beta = 0.0;
  double gap = 0.0;
  std::optional<int> cx_uhlmann;
  std::optional<int> cy_uhlmann;
  std::optional<int> cx_egp;
  std::optional<int> cy_egp;
  std::optional<int> c_ground;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
  bool uhlmann_asymmetric() const {
    return cx_uhlmann && cy_uhlmann && *cx_uhlmann != *cy_uhlmann;
  }
  bool egp_symmetric() const { return cx_egp && cy_egp && *cx_egp == *cy_egp; }
};

/// Uhlmann and EGP windings per temperature plus the ground-state Chern number.
/// Per-row failures are recorded and the scan continues.
std::vector<InvariantReport> uhlmann_temperature_scan(const BlochModel& model, double mu,
                                                      const std::vector<double>& temperatures,
                                                      const ScanOptions& options = {});

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace mixtopo
