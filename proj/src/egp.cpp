#include "mixtopo/egp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mixtopo/parallel.hpp"

namespace mixtopo {

TraceAmplitude gaussian_trace_diagonal_unitary(const Matrix& correlation,
                                               std::span<const double> angles) {
  const Eigen::Index n = correlation.rows();
  if (correlation.cols() != n || static_cast<Eigen::Index>(angles.size()) != n) {
    throw ConfigError("angle vector length must match the correlation matrix");
  }
  Vector shift(n);
  for (Eigen::Index a = 0; a < n; ++a) shift(a) = std::polar(1.0, angles[static_cast<std::size_t>(a)]) - 1.0;

  Matrix system = correlation * shift.asDiagonal();
  system.diagonal().array() += 1.0;

  Eigen::FullPivLU<Matrix> lu(system);
  const auto diag = lu.matrixLU().diagonal();
  TraceAmplitude out;
  double phase = 0.0;
  double largest = 0.0;
  double smallest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = std::abs(diag(i));
    largest = std::max(largest, m);
    smallest = std::min(smallest, m);
    out.log_modulus += std::log(m);
    phase += std::arg(diag(i));
  }
  if (lu.permutationP().determinant() * lu.permutationQ().determinant() < 0) phase += kPi;
  out.phase = principal_angle(phase);
  out.pivot_ratio = largest > 0.0 ? smallest / largest : 0.0;
  return out;
}

std::vector<double> position_angles(int cells, int orbitals) {
  std::vector<double> theta;
  theta.reserve(static_cast<std::size_t>(cells) * orbitals);
  for (int j = 0; j < cells; ++j) {
    const double angle = kTwoPi * j / cells;
    for (int a = 0; a < orbitals; ++a) theta.push_back(angle);
  }
  return theta;
}

EgpResult egp_component(const GaussianStateSpec& spec, Direction direction, double transverse_k,
                        int cells) {
  const ChainCorrelationMatrix chain = chain_correlation_matrix(spec, direction, transverse_k, cells);
  const std::vector<double> theta = position_angles(cells, chain.orbitals);
  const TraceAmplitude z = gaussian_trace_diagonal_unitary(chain.entries, theta);
  if (!(z.pivot_ratio >= kZeroAmplitudeTolerance) || !std::isfinite(z.log_modulus)) {
    std::ostringstream os;
    os << "EGP undefined (zero amplitude) along " << to_string(direction)
       << " at transverse k=" << transverse_k << ", N=" << cells
       << ": generalized gap condition violated";
    throw ZeroAmplitudeError(os.str());
  }
  return {direction, transverse_k, cells, z.phase, z.log_modulus};
}

static double spec_temperature(const GaussianStateSpec& spec) {
  if (!spec.is_thermal()) return std::numeric_limits<double>::quiet_NaN();
  return spec.is_pure() ? 0.0 : 1.0 / spec.beta();
}

PhaseProfile egp_profile(const GaussianStateSpec& spec, Direction direction, int cells,
                         int transverse_points, int jobs) {
  PhaseProfile profile;
  profile.kind = PhaseKind::egp;
  profile.direction = direction;
  profile.temperature = spec_temperature(spec);
  profile.cells = cells;
  profile.parameters = loop_parameters(transverse_points);
  const auto results = parallel_map(profile.parameters.size(), jobs, [&](std::size_t i) {
    return egp_component(spec, direction, profile.parameters[i], cells);
  });
  for (const EgpResult& r : results) {
    profile.phases.push_back(r.phase);
    profile.moduli.push_back(r.modulus());
  }
  return profile;
}

ChernPair egp_windings(const GaussianStateSpec& spec, int cells, int transverse_points, int jobs) {
  const PhaseProfile x = egp_profile(spec, Direction::x, cells, transverse_points, jobs);
  const PhaseProfile y = egp_profile(spec, Direction::y, cells, transverse_points, jobs);
  const ChernPair c = chern_from_zak_windings(x, y);
  if (!c.consistent()) {
    throw NumericalError("EGP Chern inconsistency: Cx=" + std::to_string(c.cx) +
                         " but Cy=" + std::to_string(c.cy) + " (N=" + std::to_string(cells) + ")");
  }
  return c;
}

double fictitious_ground_state_phase(const GaussianStateSpec& spec, Direction direction,
                                     double transverse_k, int cells) {
  const FrameFunction frame = filled_fictitious_frame(spec);
  std::vector<Matrix> frames;
  for (double k : chain_momenta(cells)) frames.push_back(frame(chain_point(direction, k, transverse_k)));
  const long filled = frames.front().cols();
  const double ordering = ((filled * (cells - 1)) % 2 == 0) ? 0.0 : kPi;
  return principal_angle(zak_phase_wilson(frames) + ordering);
}

std::vector<GaugeReductionPoint> gauge_reduction_deviation(const GaussianStateSpec& spec,
                                                           Direction direction,
                                                           double transverse_k,
                                                           const std::vector<int>& cells) {
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (cells[i] <= cells[i - 1]) throw ConfigError("chain lengths must be strictly ascending");
  }
  std::vector<GaugeReductionPoint> out;
  for (int n : cells) {
    const EgpResult egp = egp_component(spec, direction, transverse_k, n);
    const double reference = fictitious_ground_state_phase(spec, direction, transverse_k, n);
    out.push_back({n, egp.phase, reference, std::abs(principal_angle(egp.phase - reference)),
                   egp.log_modulus});
  }
  return out;
}

double fit_decay_exponent(const std::vector<GaugeReductionPoint>& points) {
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : points) {
    if (p.deviation > 0.0) xy.emplace_back(std::log(static_cast<double>(p.cells)), std::log(p.deviation));
  }
  if (xy.size() < 2) throw NumericalError("decay fit needs two nonzero deviations");
  double mx = 0.0, my = 0.0;
  for (auto [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxy = 0.0, sxx = 0.0;
  for (auto [x, y] : xy) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return -sxy / sxx;
}

PhaseProfile pump_profile(const StateFamily& family, int cells, int t_points, int jobs) {
  PhaseProfile profile;
  profile.kind = PhaseKind::egp;
  profile.direction = Direction::x;
  profile.cells = cells;
  profile.parameters = loop_parameters(t_points);
  const auto results = parallel_map(profile.parameters.size(), jobs, [&](std::size_t i) {
    return egp_component(family(profile.parameters[i]), Direction::x, 0.0, cells);
  });
  for (const EgpResult& r : results) {
    profile.phases.push_back(r.phase);
    profile.moduli.push_back(r.modulus());
  }
  if (!results.empty()) profile.temperature = spec_temperature(family(profile.parameters.front()));
  return profile;
}

int pump_winding(const StateFamily& family, int cells, int t_points, int jobs) {
  return winding_of_phase_profile(pump_profile(family, cells, t_points, jobs));
}

}  // namespace mixtopo
