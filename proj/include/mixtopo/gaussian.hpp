#pragma once

#include <optional>
#include <vector>

#include "mixtopo/model.hpp"

namespace mixtopo {

/// Tabulated covariance matrices <c^dagger_mu(k) c_nu(k)> on a grid.
using FictitiousHamiltonianGrid = MatrixGrid;

/// A number-conserving Gaussian state of a translation-invariant lattice.
///
/// Either thermal, rho ~ exp(-sum_k c^dagger g(k) c) with g = beta (h - mu), or
/// given directly through its tabulated covariance grid (non-equilibrium steady
/// states). beta = +infinity marks the zero-temperature Slater determinant.
class GaussianStateSpec {
 public:
  static GaussianStateSpec thermal(BlochModel model, double beta, double mu);
  static GaussianStateSpec ground_state(BlochModel model, double mu);
  static GaussianStateSpec tabulated(FictitiousHamiltonianGrid covariance,
                                     double half_margin = 1e-3);

  bool is_thermal() const { return model_.has_value(); }
  bool is_pure() const { return is_thermal() && std::isinf(beta_); }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  int bands() const;
  /// Minimum distance of fictitious eigenvalues from 1/2 for tabulated states.
  double half_margin() const { return half_margin_; }

  /// Present for thermal states only.
  const BlochModel* model() const { return model_ ? &*model_ : nullptr; }
  const FictitiousHamiltonianGrid* table() const { return table_ ? &*table_ : nullptr; }

 private:
  GaussianStateSpec() = default;

  std::optional<BlochModel> model_;
  std::optional<FictitiousHamiltonianGrid> table_;
  double beta_ = 0.0;
  double mu_ = 0.0;
  double half_margin_ = 1e-3;
};

/// 1 / (e^x + 1), evaluated without overflow for any sign of x.
double fermi(double x);

/// f(A) for Hermitian A via its spectral decomposition.
Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f);

/// g(k) = beta (h(k) - mu). Requires a thermal spec with finite beta.
Matrix g_matrix(const GaussianStateSpec& spec, const MomentumPoint& k);

/// Covariance h^fict_{mu nu}(k) = <c^dagger_mu(k) c_nu(k)> = [1/(e^g + 1)]_{nu mu}.
/// At beta = infinity this is the transposed projector onto the bands below mu.
Matrix fictitious_hamiltonian(const GaussianStateSpec& spec, const MomentumPoint& k);

/// Bloch states of the fictitious Hamiltonian, ordered so that filled bands
/// come first: the energies are 1/2 - n with n the eigenvalues of the
/// single-particle density matrix (h^fict)^T. Negative energies are filled.
BandSystem fictitious_band_system(const GaussianStateSpec& spec, const MomentumPoint& k);

/// Number of filled fictitious bands (occupation above 1/2) at k. Throws when
/// an occupation lies within the margin of 1/2 (generalized gap violated).
int filled_fictitious_bands(const GaussianStateSpec& spec, const MomentumPoint& k);

/// Samples h^fict over a grid.
FictitiousHamiltonianGrid fictitious_grid(const GaussianStateSpec& spec, const MomentumGrid& grid);

/// Checks Hermiticity (1e-12) and occupation bounds [0, 1] (1e-10) of a
/// tabulated covariance grid; throws ConfigError naming the first bad point.
void validate_covariance_grid(const FictitiousHamiltonianGrid& table);

/// Real-space correlations of one chain of the 2D lattice at fixed transverse
/// momentum: entries(j p + a, j' p + b) = <c^dagger_{j a} c_{j' b}>.
struct ChainCorrelationMatrix {
  Direction direction = Direction::x;
  double transverse_k = 0.0;
  int cells = 0;
  int orbitals = 0;
  Matrix entries;

  int modes() const { return cells * orbitals; }
};

/// Periodic-chain momenta 2 pi m / N reduced into [-pi, pi), ascending.
/// For even N these coincide with MomentumGrid samples.
std::vector<double> chain_momenta(int cells);

/// Full momentum of a chain sample: k on the chain axis, transverse_k on the other.
inline MomentumPoint chain_point(Direction direction, double k, double transverse_k) {
  return direction == Direction::x ? MomentumPoint{k, transverse_k}
                                   : MomentumPoint{transverse_k, k};
}

ChainCorrelationMatrix chain_correlation_matrix(const GaussianStateSpec& spec, Direction direction,
                                                double transverse_k, int cells);

}  // namespace mixtopo
