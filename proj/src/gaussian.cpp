#include "mixtopo/gaussian.hpp"

#include <cmath>
#include <sstream>

namespace mixtopo {

GaussianStateSpec GaussianStateSpec::thermal(BlochModel model, double beta, double mu) {
  if (std::isnan(beta) || beta <= 0.0) {
    throw ConfigError("inverse temperature must be positive or +inf, got " + std::to_string(beta));
  }
  if (!std::isfinite(mu)) throw ConfigError("chemical potential must be finite");
  GaussianStateSpec spec;
  spec.model_ = std::move(model);
  spec.beta_ = beta;
  spec.mu_ = mu;
  return spec;
}

GaussianStateSpec GaussianStateSpec::ground_state(BlochModel model, double mu) {
  return thermal(std::move(model), std::numeric_limits<double>::infinity(), mu);
}

GaussianStateSpec GaussianStateSpec::tabulated(FictitiousHamiltonianGrid covariance,
                                               double half_margin) {
  validate_covariance_grid(covariance);
  if (!(half_margin >= 0.0 && half_margin < 0.5)) {
    throw ConfigError("half-filling margin must lie in [0, 0.5)");
  }
  GaussianStateSpec spec;
  spec.table_ = std::move(covariance);
  spec.half_margin_ = half_margin;
  return spec;
}

int GaussianStateSpec::bands() const { return model_ ? model_->bands() : table_->p; }

double fermi(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (std::exp(x) + 1.0);
}

Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  RealVector values = solver.eigenvalues().unaryExpr(f);
  const Matrix& v = solver.eigenvectors();
  return v * values.cast<cplx>().asDiagonal() * v.adjoint();
}

Matrix g_matrix(const GaussianStateSpec& spec, const MomentumPoint& k) {
  if (!spec.is_thermal()) throw ConfigError("g(k) is only defined for thermal states");
  if (spec.is_pure()) {
    throw ConfigError("g(k) diverges at beta = infinity; use the ground-state projector");
  }
  const Matrix h = (*spec.model())(k);
  return spec.beta() * (h - spec.mu() * Matrix::Identity(h.rows(), h.cols()));
}

Matrix fictitious_hamiltonian(const GaussianStateSpec& spec, const MomentumPoint& k) {
  if (const auto* table = spec.table()) return table->lookup(k);

  const Matrix h = (*spec.model())(k);
  const double defect = hermiticity_defect(h);
  if (!(defect <= kHermitianTolerance)) {
    throw NumericalError("Bloch matrix is not Hermitian at k=(" + std::to_string(k.kx) + ", " +
                         std::to_string(k.ky) + ")");
  }
  if (spec.is_pure()) {
    const BandSystem bands = band_system(h);
    const int filled = bands_below(bands, spec.mu(), k);
    const auto occupied = bands.states.leftCols(filled);
    return (occupied * occupied.adjoint()).transpose();
  }
  const double beta = spec.beta();
  const double mu = spec.mu();
  return hermitian_function(h, [beta, mu](double e) { return fermi(beta * (e - mu)); })
      .transpose();
}

BandSystem fictitious_band_system(const GaussianStateSpec& spec, const MomentumPoint& k) {
  const Matrix density = fictitious_hamiltonian(spec, k).transpose();
  const Eigen::Index p = density.rows();
  return band_system(0.5 * Matrix::Identity(p, p) - density);
}

int filled_fictitious_bands(const GaussianStateSpec& spec, const MomentumPoint& k) {
  const BandSystem bands = fictitious_band_system(spec, k);
  // Thermal states sit on the +-1/2 side by construction unless beta -> 0; the
  // margin guards user-supplied covariances.
  const double margin = spec.is_thermal() ? kDegeneracyTolerance : spec.half_margin();
  int filled = 0;
  for (Eigen::Index n = 0; n < bands.energies.size(); ++n) {
    const double e = bands.energies(n);
    if (std::abs(e) < margin) {
      std::ostringstream os;
      os << "fictitious spectrum touches 1/2 at k=(" << k.kx << ", " << k.ky
         << "): occupation " << 0.5 - e << " within margin " << margin;
      throw NumericalError(os.str());
    }
    if (e < 0.0) ++filled;
  }
  return filled;
}

FictitiousHamiltonianGrid fictitious_grid(const GaussianStateSpec& spec, const MomentumGrid& grid) {
  FictitiousHamiltonianGrid out;
  out.grid = grid;
  out.p = spec.bands();
  out.values.reserve(grid.size());
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.ny(); ++j) out.values.push_back(fictitious_hamiltonian(spec, grid.at(i, j)));
  }
  return out;
}

void validate_covariance_grid(const FictitiousHamiltonianGrid& table) {
  if (table.p < 1) throw ConfigError("covariance grid needs p >= 1");
  if (table.values.size() != table.grid.size()) {
    throw ConfigError("covariance grid holds " + std::to_string(table.values.size()) +
                      " matrices, expected " + std::to_string(table.grid.size()));
  }
  for (int i = 0; i < table.grid.nx(); ++i) {
    for (int j = 0; j < table.grid.ny(); ++j) {
      const Matrix& m = table.at(i, j);
      auto where = [&] {
        return " at grid point (" + std::to_string(i) + ", " + std::to_string(j) + ")";
      };
      if (m.rows() != table.p || m.cols() != table.p) throw ConfigError("wrong matrix size" + where());
      if (hermiticity_defect(m) > 1e-12) throw ConfigError("covariance is not Hermitian" + where());
      Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
      const RealVector& ev = solver.eigenvalues();
      if (ev.minCoeff() < -1e-10 || ev.maxCoeff() > 1.0 + 1e-10) {
        throw ConfigError("covariance eigenvalues leave [0, 1]" + where());
      }
    }
  }
}

std::vector<double> chain_momenta(int cells) {
  std::vector<double> ks(static_cast<std::size_t>(cells));
  const int offset = cells / 2;
  for (int m = 0; m < cells; ++m) {
    ks[static_cast<std::size_t>(m)] = kTwoPi * static_cast<double>(m - offset) / cells;
  }
  return ks;
}

ChainCorrelationMatrix chain_correlation_matrix(const GaussianStateSpec& spec, Direction direction,
                                                double transverse_k, int cells) {
  if (cells < 2) throw ConfigError("chain needs at least 2 unit cells");
  const int p = spec.bands();
  const std::vector<double> ks = chain_momenta(cells);

  std::vector<Matrix> covariance;
  covariance.reserve(ks.size());
  for (double k : ks) covariance.push_back(fictitious_hamiltonian(spec, chain_point(direction, k, transverse_k)));

  // Circulant in the cell index: build one block per separation d = j - j'.
  std::vector<Matrix> by_separation(static_cast<std::size_t>(cells), Matrix::Zero(p, p));
  for (int d = 0; d < cells; ++d) {
    Matrix& block = by_separation[static_cast<std::size_t>(d)];
    for (std::size_t m = 0; m < ks.size(); ++m) {
      block += std::polar(1.0, -ks[m] * d) * covariance[m];
    }
    block /= static_cast<double>(cells);
  }

  ChainCorrelationMatrix out;
  out.direction = direction;
  out.transverse_k = transverse_k;
  out.cells = cells;
  out.orbitals = p;
  out.entries.resize(static_cast<Eigen::Index>(p) * cells, static_cast<Eigen::Index>(p) * cells);
  for (int j = 0; j < cells; ++j) {
    for (int jp = 0; jp < cells; ++jp) {
      const int d = MomentumGrid::wrap_index(j - jp, cells);
      out.entries.block(static_cast<Eigen::Index>(j) * p, static_cast<Eigen::Index>(jp) * p, p, p) =
          by_separation[static_cast<std::size_t>(d)];
    }
  }
  return out;
}

}  // namespace mixtopo
