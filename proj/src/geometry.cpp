#include "mixtopo/geometry.hpp"

#include <cmath>
#include <sstream>

namespace mixtopo {

namespace {

// det(<b|a>) for frames a, b.
cplx overlap_det(const Matrix& a, const Matrix& b) {
  const Matrix o = b.adjoint() * a;
  return o.size() == 1 ? o(0, 0) : o.determinant();
}

cplx checked_overlap(const Matrix& a, const Matrix& b) {
  const cplx d = overlap_det(a, b);
  if (!(std::abs(d) >= kOverlapTolerance)) {
    std::ostringstream os;
    os << "ill-conditioned loop: overlap determinant " << std::abs(d)
       << " below " << kOverlapTolerance << " (grid too coarse or gap closing)";
    throw NumericalError(os.str());
  }
  return d;
}

}  // namespace

double zak_phase_wilson(std::span<const Matrix> frames) {
  if (frames.size() < 2) throw ConfigError("Wilson loop needs at least 2 frames");
  // Accumulate the phase link by link; the normalized running product cannot
  // underflow on long loops.
  cplx product = 1.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Matrix& next = frames[(i + 1) % frames.size()];
    const cplx link = checked_overlap(frames[i], next);
    product *= link / std::abs(link);
  }
  return principal_angle(std::arg(product));
}

FrameGrid sample_frames(const FrameFunction& frame, const MomentumGrid& grid) {
  FrameGrid out;
  out.grid = grid;
  out.frames.reserve(grid.size());
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) out.frames.push_back(frame(grid.at(i, j)));
  }
  return out;
}

FrameFunction band_frame(const BlochModel& model, int first, int count) {
  if (first < 0 || count < 1 || first + count > model.bands()) {
    throw ConfigError("band range out of bounds for a " + std::to_string(model.bands()) +
                      "-band model");
  }
  return [model, first, count](const MomentumPoint& k) -> Matrix {
    const BandSystem bands = band_system(model(k));
    if (first > 0 && bands.energies(first) - bands.energies(first - 1) < kDegeneracyTolerance) {
      throw NumericalError("band " + std::to_string(first) + " is degenerate with the band below");
    }
    const int next = first + count;
    if (next < bands.energies.size() &&
        bands.energies(next) - bands.energies(next - 1) < kDegeneracyTolerance) {
      throw NumericalError("band " + std::to_string(next - 1) + " is degenerate with the band above");
    }
    return bands.states.middleCols(first, count);
  };
}

FrameFunction occupied_frame(const BlochModel& model, double mu) {
  return [model, mu](const MomentumPoint& k) -> Matrix {
    const BandSystem bands = band_system(model(k));
    const int filled = bands_below(bands, mu, k);
    if (filled == 0) throw NumericalError("no band below the chemical potential");
    return bands.states.leftCols(filled);
  };
}

FrameFunction filled_fictitious_frame(const GaussianStateSpec& spec) {
  return [spec](const MomentumPoint& k) -> Matrix {
    const int filled = filled_fictitious_bands(spec, k);
    if (filled == 0) throw NumericalError("no filled fictitious band");
    return fictitious_band_system(spec, k).states.leftCols(filled);
  };
}

FrameFunction fictitious_band_frame(const GaussianStateSpec& spec, int band) {
  if (band < 0 || band >= spec.bands()) throw ConfigError("fictitious band index out of range");
  return [spec, band](const MomentumPoint& k) -> Matrix {
    filled_fictitious_bands(spec, k);  // throws on a closed fictitious gap
    const BandSystem bands = fictitious_band_system(spec, k);
    const auto& e = bands.energies;
    if ((band > 0 && e(band) - e(band - 1) < kDegeneracyTolerance) ||
        (band + 1 < e.size() && e(band + 1) - e(band) < kDegeneracyTolerance)) {
      throw NumericalError("fictitious band " + std::to_string(band) + " is degenerate");
    }
    return bands.states.col(band);
  };
}

double CurvatureField::total() const {
  double sum = 0.0;
  for (double f : flux) sum += f;
  return sum;
}

CurvatureField berry_curvature_plaquette(const FrameGrid& frames) {
  const MomentumGrid& grid = frames.grid;
  CurvatureField field;
  field.grid = grid;
  field.flux.resize(grid.size());
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const Matrix& u00 = frames.at(i, j);
      const Matrix& u10 = frames.at(i + 1, j);
      const Matrix& u11 = frames.at(i + 1, j + 1);
      const Matrix& u01 = frames.at(i, j + 1);
      // <u00|u10><u10|u11><u11|u01><u01|u00>
      const cplx loop = checked_overlap(u10, u00) * checked_overlap(u11, u10) *
                        checked_overlap(u01, u11) * checked_overlap(u00, u01);
      field.flux[grid.index(i, j)] = principal_angle(std::arg(loop));
    }
  }
  return field;
}

int chern_number(const CurvatureField& field) {
  const double c = field.total() / kTwoPi;
  const double rounded = std::round(c);
  if (std::abs(c - rounded) > kChernResidueTolerance) {
    std::ostringstream os;
    os << "Chern sum " << c << " is not an integer (gap closing or under-resolved grid)";
    throw NumericalError(os.str());
  }
  return static_cast<int>(rounded);
}

const char* to_string(PhaseKind kind) {
  switch (kind) {
    case PhaseKind::zak: return "zak";
    case PhaseKind::egp: return "egp";
    case PhaseKind::uhlmann: return "uhlmann";
  }
  return "?";
}

PhaseKind phase_kind_from_string(const std::string& s) {
  if (s == "zak") return PhaseKind::zak;
  if (s == "egp") return PhaseKind::egp;
  if (s == "uhlmann") return PhaseKind::uhlmann;
  throw ConfigError("unknown phase kind '" + s + "'");
}

double PhaseProfile::max_jump() const {
  double jump = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double step = principal_angle(phases[(i + 1) % phases.size()] - phases[i]);
    jump = std::max(jump, std::abs(step));
  }
  return jump;
}

std::vector<double> loop_parameters(int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = MomentumGrid::sample(i, n);
  return out;
}

int winding_of_phase_profile(const PhaseProfile& profile, double margin) {
  const std::size_t n = profile.phases.size();
  if (n < 2) throw ConfigError("phase profile needs at least 2 samples");
  const double jump = profile.max_jump();
  if (jump >= kPi - margin) {
    std::ostringstream os;
    os << to_string(profile.kind) << " profile along " << to_string(profile.direction)
       << " is under-resolved: step of " << jump << " rad with " << n
       << " samples; refine the loop (try " << 2 * n << " samples)";
    throw UnderResolvedError(os.str());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += principal_angle(profile.phases[(i + 1) % n] - profile.phases[i]);
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

ChernPair chern_from_zak_windings(const PhaseProfile& x_over_ky, const PhaseProfile& y_over_kx) {
  if (x_over_ky.direction != Direction::x || y_over_kx.direction != Direction::y) {
    throw ConfigError("expected an x-direction profile over ky and a y-direction profile over kx");
  }
  return {winding_of_phase_profile(x_over_ky), -winding_of_phase_profile(y_over_kx)};
}

double zak_phase_along(const FrameFunction& frame, Direction direction, double transverse_k,
                       int loop_points) {
  std::vector<Matrix> frames;
  frames.reserve(static_cast<std::size_t>(loop_points));
  for (double k : loop_parameters(loop_points)) frames.push_back(frame(chain_point(direction, k, transverse_k)));
  return zak_phase_wilson(frames);
}

PhaseProfile zak_profile(const FrameFunction& frame, Direction direction, int transverse_points,
                         int loop_points) {
  PhaseProfile profile;
  profile.kind = PhaseKind::zak;
  profile.direction = direction;
  profile.parameters = loop_parameters(transverse_points);
  profile.phases.reserve(profile.parameters.size());
  for (double kt : profile.parameters) {
    profile.phases.push_back(zak_phase_along(frame, direction, kt, loop_points));
  }
  return profile;
}

}  // namespace mixtopo
