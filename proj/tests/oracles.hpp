#pragma once

// Reference constructions used only by the tests. None of them call into the
// library's numerics.

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mixtopo/model.hpp"

namespace oracle {

using mixtopo::cplx;
using mixtopo::Matrix;
using mixtopo::RealVector;
using mixtopo::Vector;

inline Matrix random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  return (a + a.adjoint()) / 2.0;
}

/// Haar-ish unitary from the QR factor of a complex Ginibre matrix.
inline Matrix random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

/// Matrix of c^dagger_a c_b on the 2^L occupation basis (bit a = mode a),
/// with Jordan-Wigner signs from the modes of lower index.
inline Matrix fock_hopping(int modes, int a, int b) {
  const int dim = 1 << modes;
  Matrix op = Matrix::Zero(dim, dim);
  auto parity_below = [](unsigned s, int m) { return __builtin_popcount(s & ((1u << m) - 1u)) & 1; };
  for (unsigned s = 0; s < static_cast<unsigned>(dim); ++s) {
    if (!(s >> b & 1u)) continue;
    double sign = parity_below(s, b) ? -1.0 : 1.0;
    const unsigned t = s & ~(1u << b);
    if (t >> a & 1u) continue;
    sign *= parity_below(t, a) ? -1.0 : 1.0;
    op(t | (1u << a), s) += sign;
  }
  return op;
}

/// exp(-sum_ab g_ab c^dagger_a c_b) / Z as a dense 2^L matrix.
inline Matrix fock_gaussian_state(const Matrix& g) {
  const int modes = static_cast<int>(g.rows());
  const int dim = 1 << modes;
  Matrix h = Matrix::Zero(dim, dim);
  for (int a = 0; a < modes; ++a) {
    for (int b = 0; b < modes; ++b) {
      if (g(a, b) != cplx(0.0)) h += g(a, b) * fock_hopping(modes, a, b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector e = es.eigenvalues();
  const double e0 = e.minCoeff();
  RealVector w = (-(e.array() - e0)).exp();
  w /= w.sum();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Tr[rho exp(i sum_a theta_a n_a)].
inline cplx fock_trace_diagonal(const Matrix& rho, std::span<const double> angles) {
  cplx sum = 0.0;
  for (Eigen::Index s = 0; s < rho.rows(); ++s) {
    double phase = 0.0;
    for (std::size_t a = 0; a < angles.size(); ++a) {
      if (s >> a & 1) phase += angles[a];
    }
    sum += rho(s, s) * std::polar(1.0, phase);
  }
  return sum;
}

/// <c^dagger_a c_b> from the many-body state.
inline Matrix fock_correlation(const Matrix& rho, int modes) {
  Matrix c(modes, modes);
  for (int a = 0; a < modes; ++a) {
    for (int b = 0; b < modes; ++b) c(a, b) = (rho * fock_hopping(modes, a, b)).trace();
  }
  return c;
}

/// Real-space hopping matrix of an N-cell periodic chain, index j * p + a:
/// H[(j,a),(j',b)] = (1/N) sum_m e^{i k_m (j - j')} h_ab(k_m), k_m = 2 pi m / N.
inline Matrix real_space_chain(const mixtopo::BlochModel& model, mixtopo::Direction dir,
                               double transverse_k, int cells) {
  const int p = model.bands();
  Matrix h = Matrix::Zero(p * cells, p * cells);
  for (int m = 0; m < cells; ++m) {
    const double k = 2.0 * M_PI * m / cells;
    const Matrix hk = dir == mixtopo::Direction::x ? model(k, transverse_k) : model(transverse_k, k);
    for (int j = 0; j < cells; ++j) {
      for (int jp = 0; jp < cells; ++jp) {
        h.block(j * p, jp * p, p, p) += std::polar(1.0 / cells, k * (j - jp)) * hk;
      }
    }
  }
  return h;
}

/// 1/(e^A + 1) by plain eigendecomposition, for moderate spectra.
inline Matrix fermi_matrix(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  RealVector f = es.eigenvalues();
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = 1.0 / (std::exp(f(i)) + 1.0);
  return es.eigenvectors() * f.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Lower-band Bloch vector of d.sigma in the gauge (dx - i dy, -(dz + |d|)).
/// Smooth wherever dx and dy do not vanish together.
inline Vector lower_band_smooth(const mixtopo::DVector& d) {
  Vector u(2);
  u << cplx(d.x, -d.y), -(d.z + d.norm());
  return u / u.norm();
}

}  // namespace oracle
