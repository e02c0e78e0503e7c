#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mixtopo/types.hpp"

namespace mixtopo {

/// Lattice momentum with both components reduced into [-pi, pi).
struct MomentumPoint {
  double kx = 0.0;
  double ky = 0.0;

  static MomentumPoint wrapped(double kx, double ky);
};

/// Reduce an angle into [-pi, pi).
double wrap_momentum(double k);

/// Uniform periodic sampling of the Brillouin zone. Samples start at -pi and
/// exclude +pi; index nx wraps back to 0.
class MomentumGrid {
 public:
  MomentumGrid(int nx, int ny);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double kx(int i) const { return sample(i, nx_); }
  double ky(int j) const { return sample(j, ny_); }
  MomentumPoint at(int i, int j) const { return {kx(i), ky(j)}; }

  /// Row-major flat index, kx index outer.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(wrap_index(i, nx_)) * ny_ + wrap_index(j, ny_);
  }

  /// -pi + 2 pi j / n for a periodic index j.
  static double sample(int j, int n);
  static int wrap_index(int j, int n) { return ((j % n) + n) % n; }

 private:
  int nx_;
  int ny_;
};

struct DVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Parameters of the anisotropic Qi-Wu-Zhang d-vector
/// d = (alpha sin kx, gamma sin ky, mass - cos kx - cos ky).
struct QwzParams {
  double alpha = 1.0;
  double gamma = 3.0;
  double mass = 1.0;
};

DVector qwz_d_vector(const MomentumPoint& k, const QwzParams& params = {});

/// d . sigma = [[dz, dx - i dy], [dx + i dy, -dz]].
Matrix bloch_matrix_from_d(const DVector& d);

/// Tabulated p x p matrices on a MomentumGrid, row-major in (ix, iy).
struct MatrixGrid {
  MomentumGrid grid{2, 2};
  int p = 0;
  std::vector<Matrix> values;

  const Matrix& at(int i, int j) const { return values[grid.index(i, j)]; }

  /// Value at a momentum that must coincide with a grid sample (1e-9).
  const Matrix& lookup(const MomentumPoint& k) const;
};

/// A translation-invariant lattice model: k -> p x p Hermitian Bloch matrix.
class BlochModel {
 public:
  using Evaluator = std::function<Matrix(const MomentumPoint&)>;

  BlochModel(int p, Evaluator evaluator, std::string name = "custom");

  static BlochModel qwz(const QwzParams& params = {});
  /// Any model defined through a d-vector (two bands).
  static BlochModel from_d_vector(std::function<DVector(const MomentumPoint&)> d,
                                  std::string name = "d-vector");
  /// k-independent Bloch matrix; the atomic limit.
  static BlochModel constant(Matrix h, std::string name = "atomic");
  /// Tabulated model; evaluation only at grid momenta.
  static BlochModel tabulated(MatrixGrid table, std::string name = "tabulated");

  int bands() const { return p_; }
  const std::string& name() const { return name_; }

  Matrix operator()(const MomentumPoint& k) const;
  Matrix operator()(double kx, double ky) const { return (*this)(MomentumPoint{kx, ky}); }

 private:
  int p_;
  Evaluator evaluator_;
  std::string name_;
};

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
/// Each eigenvector is gauge-fixed so its largest-magnitude component (lowest
/// index on ties) is real and positive.
struct BandSystem {
  RealVector energies;
  Matrix states;  // columns are eigenvectors

  Vector state(int n) const { return states.col(n); }
};

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kDegeneracyTolerance = 1e-9;

double hermiticity_defect(const Matrix& h);
BandSystem band_system(const Matrix& h);

/// Indirect single-particle gap around mu: lowest energy above mu minus the
/// highest energy below mu over the whole grid. Throws when mu touches a band
/// or the number of bands below mu changes across the grid.
double band_gap(const BlochModel& model, const MomentumGrid& grid, double mu);

/// Number of bands strictly below mu at k; throws if an eigenvalue sits on mu.
int bands_below(const BandSystem& bands, double mu, const MomentumPoint& k);

}  // namespace mixtopo
