#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mixtopo/gaussian.hpp"
#include "mixtopo/model.hpp"

namespace mixtopo {

/// A Bloch frame is a p x n matrix whose n orthonormal columns span the filled
/// bands at one momentum. A single band is the n = 1 case.
using FrameFunction = std::function<Matrix(const MomentumPoint&)>;

inline constexpr double kOverlapTolerance = 1e-8;
inline constexpr double kResolutionMargin = 0.1;
inline constexpr double kChernResidueTolerance = 1e-6;

/// Berry phase of a closed loop of frames, Im ln prod_i det(<u_{i+1}|u_i>) with
/// u_{M+1} = u_1. Discretizes i \oint <u|d_k u>. Result in (-pi, pi].
double zak_phase_wilson(std::span<const Matrix> frames);

/// Frames sampled on a full periodic grid, row-major in (ix, iy).
struct FrameGrid {
  MomentumGrid grid{2, 2};
  std::vector<Matrix> frames;

  const Matrix& at(int i, int j) const { return frames[grid.index(i, j)]; }
};

FrameGrid sample_frames(const FrameFunction& frame, const MomentumGrid& grid);

/// Frame of bands [first, first + count) of a Hermitian Bloch matrix.
FrameFunction band_frame(const BlochModel& model, int first, int count = 1);
/// Frame of all bands of h below mu.
FrameFunction occupied_frame(const BlochModel& model, double mu);
/// Frame of the filled (occupation > 1/2) bands of the fictitious Hamiltonian.
FrameFunction filled_fictitious_frame(const GaussianStateSpec& spec);
/// Frame of fictitious band n, in filled-first order.
FrameFunction fictitious_band_frame(const GaussianStateSpec& spec, int band);

/// Per-plaquette Berry flux on the grid; plaquette (i, j) spans k(i,j) to k(i+1,j+1).
struct CurvatureField {
  MomentumGrid grid{2, 2};
  std::vector<double> flux;  // each in (-pi, pi]

  double at(int i, int j) const { return flux[grid.index(i, j)]; }
  /// Fixed-order sum over all plaquettes.
  double total() const;
};

/// Gauge-invariant plaquette discretization of the Berry curvature.
CurvatureField berry_curvature_plaquette(const FrameGrid& frames);

/// round(total flux / 2 pi); throws when the residue exceeds 1e-6.
int chern_number(const CurvatureField& field);

enum class PhaseKind { zak, egp, uhlmann };
const char* to_string(PhaseKind kind);
PhaseKind phase_kind_from_string(const std::string& s);

/// A geometric phase sampled around a closed loop of a parameter.
struct PhaseProfile {
  PhaseKind kind = PhaseKind::zak;
  Direction direction = Direction::x;
  double temperature = 0.0;  // 0 marks a pure state
  int cells = 0;             // chain length where meaningful, else 0
  std::vector<double> parameters;
  std::vector<double> phases;  // principal values
  std::vector<double> moduli;  // optional, same length as phases when present

  std::size_t size() const { return phases.size(); }
  /// Largest principal-value step around the closed loop.
  double max_jump() const;
  bool under_resolved(double margin = kResolutionMargin) const { return max_jump() >= kPi - margin; }
};

/// Uniform loop samples -pi + 2 pi i / n.
std::vector<double> loop_parameters(int n);

/// Sum of principal-value steps around the loop divided by 2 pi.
int winding_of_phase_profile(const PhaseProfile& profile, double margin = kResolutionMargin);

struct ChernPair {
  int cx = 0;
  int cy = 0;
  bool consistent() const { return cx == cy; }
};

/// Cx = winding of the x-phase over ky; Cy = -winding of the y-phase over kx.
ChernPair chern_from_zak_windings(const PhaseProfile& x_over_ky, const PhaseProfile& y_over_kx);

/// Zak phase of the loop along `direction` at fixed transverse momentum, using
/// `loop_points` samples -pi + 2 pi i / M of the chain momentum.
double zak_phase_along(const FrameFunction& frame, Direction direction, double transverse_k,
                       int loop_points);

PhaseProfile zak_profile(const FrameFunction& frame, Direction direction, int transverse_points,
                         int loop_points);

}  // namespace mixtopo
