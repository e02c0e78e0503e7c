#include "mixtopo/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace mixtopo {

Direction direction_from_string(const std::string& s) {
  if (s == "x") return Direction::x;
  if (s == "y") return Direction::y;
  throw ConfigError("unknown direction '" + s + "' (expected x or y)");
}

double wrap_momentum(double k) {
  double r = std::fmod(k + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (r >= kPi) r -= kTwoPi;
  return r;
}

MomentumPoint MomentumPoint::wrapped(double kx, double ky) {
  return {wrap_momentum(kx), wrap_momentum(ky)};
}

MomentumGrid::MomentumGrid(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) {
    throw ConfigError("momentum grid needs at least 2 samples per axis, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  }
}

double MomentumGrid::sample(int j, int n) {
  return -kPi + kTwoPi * static_cast<double>(wrap_index(j, n)) / static_cast<double>(n);
}

DVector qwz_d_vector(const MomentumPoint& k, const QwzParams& params) {
  return {params.alpha * std::sin(k.kx), params.gamma * std::sin(k.ky),
          params.mass - std::cos(k.kx) - std::cos(k.ky)};
}

Matrix bloch_matrix_from_d(const DVector& d) {
  Matrix h(2, 2);
  h(0, 0) = d.z;
  h(0, 1) = cplx(d.x, -d.y);
  h(1, 0) = cplx(d.x, d.y);
  h(1, 1) = -d.z;
  return h;
}

const Matrix& MatrixGrid::lookup(const MomentumPoint& k) const {
  auto locate = [](double kv, int n, const char* axis) {
    double pos = (wrap_momentum(kv) + kPi) * n / kTwoPi;
    double rounded = std::round(pos);
    if (std::abs(pos - rounded) * kTwoPi / n > 1e-9) {
      std::ostringstream os;
      os << "momentum k" << axis << "=" << kv << " is not a sample of the " << n
         << "-point tabulated grid";
      throw ConfigError(os.str());
    }
    return MomentumGrid::wrap_index(static_cast<int>(rounded), n);
  };
  return at(locate(k.kx, grid.nx(), "x"), locate(k.ky, grid.ny(), "y"));
}

BlochModel::BlochModel(int p, Evaluator evaluator, std::string name)
    : p_(p), evaluator_(std::move(evaluator)), name_(std::move(name)) {
  if (p < 1) throw ConfigError("Bloch model needs at least one band");
}

BlochModel BlochModel::qwz(const QwzParams& params) {
  return from_d_vector([params](const MomentumPoint& k) { return qwz_d_vector(k, params); },
                       "qwz");
}

BlochModel BlochModel::from_d_vector(std::function<DVector(const MomentumPoint&)> d,
                                     std::string name) {
  return BlochModel(
      2, [d = std::move(d)](const MomentumPoint& k) { return bloch_matrix_from_d(d(k)); },
      std::move(name));
}

BlochModel BlochModel::constant(Matrix h, std::string name) {
  if (h.rows() != h.cols()) throw ConfigError("constant Bloch matrix must be square");
  const int p = static_cast<int>(h.rows());
  return BlochModel(
      p, [h = std::move(h)](const MomentumPoint&) { return h; }, std::move(name));
}

BlochModel BlochModel::tabulated(MatrixGrid table, std::string name) {
  const int p = table.p;
  auto shared = std::make_shared<const MatrixGrid>(std::move(table));
  return BlochModel(
      p, [shared](const MomentumPoint& k) { return shared->lookup(k); }, std::move(name));
}

Matrix BlochModel::operator()(const MomentumPoint& k) const {
  Matrix h = evaluator_(k);
  if (h.rows() != p_ || h.cols() != p_) {
    throw NumericalError("model '" + name_ + "' returned a matrix of the wrong size");
  }
  return h;
}

double hermiticity_defect(const Matrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

BandSystem band_system(const Matrix& h) {
  const double defect = hermiticity_defect(h);
  if (!(defect <= kHermitianTolerance)) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |h - h^dagger| = " << defect;
    throw NumericalError(os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");

  BandSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index n = 0; n < out.states.cols(); ++n) {
    auto v = out.states.col(n);
    const double largest = v.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::abs(v(pivot)) < largest - 1e-12) ++pivot;
    const cplx phase = std::conj(v(pivot)) / std::abs(v(pivot));
    v *= phase;
    v(pivot) = std::abs(v(pivot));
  }
  return out;
}

static std::string describe(const MomentumPoint& k) {
  std::ostringstream os;
  os << "k=(" << k.kx << ", " << k.ky << ")";
  return os.str();
}

int bands_below(const BandSystem& bands, double mu, const MomentumPoint& k) {
  int below = 0;
  for (Eigen::Index n = 0; n < bands.energies.size(); ++n) {
    const double e = bands.energies(n);
    if (std::abs(e - mu) <= kDegeneracyTolerance) {
      throw NumericalError("chemical potential " + std::to_string(mu) +
                           " touches a band at " + describe(k));
    }
    if (e < mu) ++below;
  }
  return below;
}

double band_gap(const BlochModel& model, const MomentumGrid& grid, double mu) {
  int filled = -1;
  double highest_below = -std::numeric_limits<double>::infinity();
  double lowest_above = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) {
      const MomentumPoint k = grid.at(i, j);
      const BandSystem bands = band_system(model(k));
      const int below = bands_below(bands, mu, k);
      if (filled < 0) filled = below;
      if (below != filled) {
        throw NumericalError("chemical potential " + std::to_string(mu) +
                             " lies inside a band near " + describe(k) + " (" +
                             std::to_string(below) + " bands below vs " +
                             std::to_string(filled) + " elsewhere)");
      }
      if (below == 0 || below == model.bands()) {
        throw NumericalError("chemical potential " + std::to_string(mu) +
                             " is not between two bands at " + describe(k));
      }
      highest_below = std::max(highest_below, bands.energies(below - 1));
      lowest_above = std::min(lowest_above, bands.energies(below));
    }
  }
  const double gap = lowest_above - highest_below;
  if (gap <= kDegeneracyTolerance) {
    throw NumericalError("bands overlap across the Brillouin zone around mu=" +
                         std::to_string(mu) + " (indirect gap " + std::to_string(gap) + ")");
  }
  return gap;
}

}  // namespace mixtopo
