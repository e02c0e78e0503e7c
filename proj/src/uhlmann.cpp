#include "mixtopo/uhlmann.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mixtopo/egp.hpp"
#include "mixtopo/parallel.hpp"

namespace mixtopo {

Matrix DensityPoint::rho() const {
  return basis * weights.cast<cplx>().asDiagonal() * basis.adjoint();
}

Matrix DensityPoint::sqrt_rho() const {
  return basis * weights.cwiseSqrt().cast<cplx>().asDiagonal() * basis.adjoint();
}

DensityPoint density_point(const Matrix& rho) {
  if (hermiticity_defect(rho) > kHermitianTolerance) throw NumericalError("density matrix is not Hermitian");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > 1e-12) {
    throw NumericalError("density matrix trace " + std::to_string(trace) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-12) throw NumericalError("density matrix is not positive");
  return {solver.eigenvectors(), solver.eigenvalues().cwiseMax(0.0)};
}

DensityPoint thermal_density_point(const BlochModel& model, double beta, double mu,
                                   const MomentumPoint& k) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("thermal density matrices need a finite positive beta (pure states are rank deficient)");
  }
  (void)mu;  // cancels in the normalization
  const BandSystem bands = band_system(model(k));
  const double lowest = bands.energies(0);
  RealVector weights = (-beta * (bands.energies.array() - lowest)).exp().matrix();
  weights /= weights.sum();
  return {bands.states, weights};
}

Matrix thermal_density_k(const BlochModel& model, double beta, double mu, const MomentumPoint& k) {
  return thermal_density_point(model, beta, mu, k).rho();
}

DensityMatrixPath thermal_loop(const BlochModel& model, double beta, double mu, Direction direction,
                               double transverse_k, int samples) {
  if (samples < 2) throw ConfigError("Uhlmann loop needs at least 2 samples");
  DensityMatrixPath path;
  path.points.reserve(static_cast<std::size_t>(samples));
  for (double k : loop_parameters(samples)) {
    path.points.push_back(thermal_density_point(model, beta, mu, chain_point(direction, k, transverse_k)));
  }
  return path;
}

static void require_full_rank(const DensityPoint& p) {
  // Any positive double is accepted: the weights carry full relative precision.
  if (!(p.weights.minCoeff() >= std::numeric_limits<double>::min())) {
    throw NumericalError("density matrix is rank deficient; the Uhlmann holonomy is undefined at exact purity");
  }
}

Matrix uhlmann_link(const DensityPoint& a, const DensityPoint& b) {
  require_full_rank(a);
  require_full_rank(b);
  // sqrt(rho_b) sqrt(rho_a) = Vb [diag(sb) Vb^dag Va diag(sa)] Va^dag. The bracket
  // is graded, so its SVD resolves the small singular directions accurately.
  const RealVector sa = a.weights.cwiseSqrt();
  const RealVector sb = b.weights.cwiseSqrt();
  const Matrix graded = sb.cast<cplx>().asDiagonal() * (b.basis.adjoint() * a.basis) *
                        sa.cast<cplx>().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(graded, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return b.basis * (svd.matrixU() * svd.matrixV().adjoint()) * a.basis.adjoint();
}

Matrix uhlmann_link(const Matrix& rho_a, const Matrix& rho_b) {
  return uhlmann_link(density_point(rho_a), density_point(rho_b));
}

UhlmannHolonomy uhlmann_holonomy(const DensityMatrixPath& path) {
  const std::size_t m = path.points.size();
  if (m < 2) throw ConfigError("Uhlmann loop needs at least 2 points");
  const Eigen::Index p = path.points.front().basis.rows();
  UhlmannHolonomy out{Matrix::Identity(p, p), 0.0};
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix link = uhlmann_link(path.points[i], path.points[(i + 1) % m]);
    out.max_link_deviation = std::max(out.max_link_deviation, (link - Matrix::Identity(p, p)).norm());
    out.unitary = link * out.unitary;
  }
  return out;
}

UhlmannPhase uhlmann_phase(const DensityMatrixPath& path) {
  const UhlmannHolonomy h = uhlmann_holonomy(path);
  const int samples = static_cast<int>(path.points.size());
  if (h.max_link_deviation >= kLinkDeviationLimit) {
    std::ostringstream os;
    os << "Uhlmann loop under-resolved: link deviates by " << h.max_link_deviation
       << " from identity with " << samples << " samples; try " << 2 * samples;
    throw UnderResolvedError(os.str());
  }
  const cplx trace = (path.points.front().rho() * h.unitary).trace();
  if (!(std::abs(trace) >= 1e-12)) throw NumericalError("Uhlmann phase undefined: Tr[rho H] vanishes");
  return {principal_angle(std::arg(trace)), std::abs(trace), samples};
}

double uhlmann_phase_from_amplitudes(std::span<const Matrix> amplitudes) {
  const std::size_t m = amplitudes.size();
  if (m < 2) throw ConfigError("Uhlmann loop needs at least 2 amplitudes");
  // Each amplitude is kept factored as P diag(s) Q^dag, so that the overlap
  // w^dag t = Q_w [diag(s_w) P_w^dag P_t diag(s_t)] Q_t^dag stays graded.
  struct Factored {
    Matrix p, q;
    RealVector s;
  };
  auto factor = [](const Matrix& w) {
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return Factored{svd.matrixU(), svd.matrixV(), svd.singularValues()};
  };
  const Factored first = factor(amplitudes.front());
  Factored transported = first;
  for (std::size_t i = 1; i <= m; ++i) {
    const Factored w = factor(amplitudes[i % m]);
    // Rotate w on the right so that w^dag * transported is positive.
    const Matrix graded = w.s.cast<cplx>().asDiagonal() * (w.p.adjoint() * transported.p) *
                          transported.s.cast<cplx>().asDiagonal();
    Eigen::JacobiSVD<Matrix> svd(graded, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix v = w.q * svd.matrixU() * svd.matrixV().adjoint() * transported.q.adjoint();
    transported = {w.p, v.adjoint() * w.q, w.s};
  }
  const Matrix overlap = first.s.cast<cplx>().asDiagonal() * (first.p.adjoint() * transported.p) *
                         transported.s.cast<cplx>().asDiagonal();
  return principal_angle(std::arg((first.q * overlap * transported.q.adjoint()).trace()));
}

UhlmannPhase converged_uhlmann_phase(const BlochModel& model, double beta, double mu,
                                     Direction direction, double transverse_k,
                                     const PathRefinement& refinement) {
  auto attempt = [&](int samples) -> std::optional<UhlmannPhase> {
    try {
      return uhlmann_phase(thermal_loop(model, beta, mu, direction, transverse_k, samples));
    } catch (const UnderResolvedError&) {
      return std::nullopt;
    }
  };
  int samples = refinement.initial_samples;
  std::optional<UhlmannPhase> previous = attempt(samples);
  while (2 * samples <= refinement.max_samples) {
    samples *= 2;
    std::optional<UhlmannPhase> current = attempt(samples);
    if (previous && current &&
        std::abs(principal_angle(current->phase - previous->phase)) < refinement.tolerance) {
      return *current;
    }
    previous = current;
  }
  std::ostringstream os;
  os << "Uhlmann phase along " << to_string(direction) << " at transverse k=" << transverse_k
     << " did not converge to " << refinement.tolerance << " within " << refinement.max_samples
     << " samples";
  throw UnderResolvedError(os.str());
}

PhaseProfile uhlmann_profile(const BlochModel& model, double beta, double mu, Direction direction,
                             int transverse_points, const PathRefinement& refinement, int jobs) {
  PhaseProfile profile;
  profile.kind = PhaseKind::uhlmann;
  profile.direction = direction;
  profile.temperature = 1.0 / beta;
  profile.parameters = loop_parameters(transverse_points);
  const auto results = parallel_map(profile.parameters.size(), jobs, [&](std::size_t i) {
    return converged_uhlmann_phase(model, beta, mu, direction, profile.parameters[i], refinement);
  });
  for (const UhlmannPhase& r : results) {
    profile.phases.push_back(r.phase);
    profile.moduli.push_back(r.modulus);
  }
  return profile;
}

ChernPair uhlmann_windings(const BlochModel& model, double beta, double mu, int transverse_points,
                           const PathRefinement& refinement, int jobs) {
  const PhaseProfile x = uhlmann_profile(model, beta, mu, Direction::x, transverse_points, refinement, jobs);
  const PhaseProfile y = uhlmann_profile(model, beta, mu, Direction::y, transverse_points, refinement, jobs);
  return chern_from_zak_windings(x, y);
}

namespace {

/// Winding of the profile, doubling the transverse sampling while it is
/// under-resolved.
int refined_winding(const ScanOptions& options, const std::function<PhaseProfile(int)>& profile) {
  for (int n = options.transverse_points;; n *= 2) {
    try {
      return winding_of_phase_profile(profile(n));
    } catch (const UnderResolvedError&) {
      if (2 * n > options.max_transverse_points) throw;
    }
  }
}

}  // namespace

std::vector<InvariantReport> uhlmann_temperature_scan(const BlochModel& model, double mu,
                                                      const std::vector<double>& temperatures,
                                                      const ScanOptions& options) {
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    if (!(temperatures[i] > 0.0) || (i > 0 && temperatures[i] <= temperatures[i - 1])) {
      throw ConfigError("scan temperatures must be positive and strictly ascending");
    }
  }
  const MomentumGrid grid(options.ground_grid, options.ground_grid);
  const double gap = band_gap(model, grid, mu);
  std::optional<int> ground;
  std::string ground_error;
  try {
    ground = chern_number(berry_curvature_plaquette(sample_frames(occupied_frame(model, mu), grid)));
  } catch (const Error& e) {
    ground_error = e.what();
  }

  std::vector<InvariantReport> rows;
  for (double t : temperatures) {
    InvariantReport row;
    row.temperature = t;
    row.beta = 1.0 / t;
    row.gap = gap;
    row.c_ground = ground;
    std::vector<std::string> problems;
    if (!ground) problems.push_back("ground: " + ground_error);
    try {
      row.cx_uhlmann = refined_winding(options, [&](int n) {
        return uhlmann_profile(model, row.beta, mu, Direction::x, n, options.refinement, options.jobs);
      });
      row.cy_uhlmann = -refined_winding(options, [&](int n) {
        return uhlmann_profile(model, row.beta, mu, Direction::y, n, options.refinement, options.jobs);
      });
    } catch (const Error& e) {
      problems.push_back(std::string("uhlmann: ") + e.what());
    }
    try {
      const GaussianStateSpec spec = GaussianStateSpec::thermal(model, row.beta, mu);
      row.cx_egp = refined_winding(options, [&](int n) {
        return egp_profile(spec, Direction::x, options.chain_length, n, options.jobs);
      });
      row.cy_egp = -refined_winding(options, [&](int n) {
        return egp_profile(spec, Direction::y, options.chain_length, n, options.jobs);
      });
      if (*row.cx_egp != *row.cy_egp) problems.push_back("egp: Chern inconsistency");
    } catch (const Error& e) {
      problems.push_back(std::string("egp: ") + e.what());
    }
    if (!problems.empty()) {
      row.status.clear();
      for (const auto& p : problems) row.status += (row.status.empty() ? "" : "; ") + p;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("log spacing needs 0 < lo < hi and n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (n - 1));
  out.back() = hi;
  return out;
}

}  // namespace mixtopo
