#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mixtopo/gaussian.hpp"
#include "oracles.hpp"

using namespace mixtopo;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix sigma_z() {
  Matrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

BlochModel flat_model() { return BlochModel::constant(sigma_z()); }

}  // namespace

TEST_CASE("fermi function is stable for large arguments") {
  CHECK(fermi(0.0) == 0.5);
  CHECK(fermi(800.0) == 0.0);
  CHECK(fermi(-800.0) == 1.0);
  for (double x : {-30.0, -2.0, -0.1, 0.3, 5.0, 40.0}) {
    CHECK(fermi(x) == doctest::Approx(0.5 * (1.0 - std::tanh(x / 2.0))).epsilon(1e-13));
  }
}

TEST_CASE("g matrix examples") {
  const Matrix g2 = g_matrix(GaussianStateSpec::thermal(flat_model(), 2.0, 0.0), {0.1, 0.2});
  CHECK(max_abs(g2 - 2.0 * sigma_z()) == 0.0);
  Matrix expect(2, 2);
  expect << 0.5, 0, 0, -1.5;
  CHECK(max_abs(g_matrix(GaussianStateSpec::thermal(flat_model(), 1.0, 0.5), {0, 0}) - expect) <= 1e-15);
  CHECK(max_abs(g_matrix(GaussianStateSpec::thermal(flat_model(), 1e-9, 0.0), {0, 0})) <= 1e-9);
  CHECK_THROWS(g_matrix(GaussianStateSpec::ground_state(flat_model(), 0.0), {0, 0}));
  CHECK_THROWS_AS(GaussianStateSpec::thermal(flat_model(), 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(GaussianStateSpec::thermal(flat_model(), -1.0, 0.0), ConfigError);
}

TEST_CASE("fictitious hamiltonian limits") {
  const BlochModel qwz = BlochModel::qwz();
  const Matrix hot = fictitious_hamiltonian(GaussianStateSpec::thermal(qwz, 1e-12, 0.0), {0.4, -0.9});
  CHECK(max_abs(hot - 0.5 * Matrix::Identity(2, 2)) <= 1e-11);

  const BlochModel scalar = BlochModel::constant(Matrix::Constant(1, 1, cplx(0.7)));
  const Matrix f = fictitious_hamiltonian(GaussianStateSpec::thermal(scalar, 2.0, 0.2), {0, 0});
  CHECK(f(0, 0).real() == doctest::Approx(1.0 / (std::exp(2.0 * 0.5) + 1.0)).epsilon(1e-14));

  Matrix expect = Matrix::Zero(2, 2);
  expect(1, 1) = 1.0;
  const Matrix pure = fictitious_hamiltonian(GaussianStateSpec::ground_state(flat_model(), 0.0), {0, 0});
  CHECK(max_abs(pure - expect) <= 1e-15);

  const BlochModel gapless = BlochModel::constant(Matrix::Zero(2, 2));
  CHECK_THROWS_AS(fictitious_hamiltonian(GaussianStateSpec::ground_state(gapless, 0.0), {0, 0}),
                  NumericalError);
}

TEST_CASE("fictitious hamiltonian follows the transposed index convention") {
  const BlochModel qwz = BlochModel::qwz();
  const GaussianStateSpec spec = GaussianStateSpec::thermal(qwz, 0.8, 0.1);
  const MomentumPoint k{0.7, -1.9};
  const Matrix oracle = oracle::fermi_matrix(0.8 * (qwz(k) - 0.1 * Matrix::Identity(2, 2))).transpose();
  CHECK(max_abs(fictitious_hamiltonian(spec, k) - oracle) <= 1e-13);
}

TEST_CASE("fictitious hamiltonian properties on qwz") {
  const BlochModel qwz = BlochModel::qwz();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 100; ++trial) {
    const MomentumPoint k{u(rng), u(rng)};
    const double beta = std::exp(std::uniform_real_distribution<double>(-3.0, 3.0)(rng));
    const Matrix f = fictitious_hamiltonian(GaussianStateSpec::thermal(qwz, beta, 0.0), k);
    CHECK(hermiticity_defect(f) <= 1e-12);
    const RealVector n = Eigen::SelfAdjointEigenSolver<Matrix>(f).eigenvalues();
    CHECK(n.minCoeff() >= -1e-10);
    CHECK(n.maxCoeff() <= 1.0 + 1e-10);
    const Matrix h = qwz(k);
    CHECK(max_abs(h * f.transpose() - f.transpose() * h) <= 1e-10);

    const Matrix p = fictitious_hamiltonian(GaussianStateSpec::ground_state(qwz, 0.0), k);
    CHECK(max_abs(p * p - p) <= 1e-10);
    // beta * gap >= 60 reproduces the projector.
    const Matrix cold = fictitious_hamiltonian(GaussianStateSpec::thermal(qwz, 30.0, 0.0), k);
    CHECK(max_abs(cold - p) <= 1e-12);
  }
}

TEST_CASE("fictitious band system puts filled bands first") {
  const BlochModel qwz = BlochModel::qwz();
  const GaussianStateSpec spec = GaussianStateSpec::thermal(qwz, 1.0, 0.0);
  const MomentumPoint k{0.3, 0.4};
  const BandSystem fb = fictitious_band_system(spec, k);
  CHECK(fb.energies(0) < 0.0);
  CHECK(fb.energies(1) > 0.0);
  // The filled fictitious state is the lower band of h (up to phase).
  const BandSystem hb = band_system(qwz(k));
  CHECK(std::abs(std::abs(hb.state(0).dot(fb.state(0))) - 1.0) <= 1e-12);
  CHECK(filled_fictitious_bands(spec, k) == 1);
}

TEST_CASE("tabulated covariances are validated") {
  const MomentumGrid grid(2, 2);
  MatrixGrid table{grid, 2, std::vector<Matrix>(4, 0.5 * Matrix::Identity(2, 2))};
  const GaussianStateSpec half = GaussianStateSpec::tabulated(table);
  CHECK_THROWS_AS(filled_fictitious_bands(half, grid.at(0, 0)), NumericalError);

  MatrixGrid bad = table;
  bad.values[3](0, 0) = 1.5;
  CHECK_THROWS_AS(GaussianStateSpec::tabulated(bad), ConfigError);
  bad = table;
  bad.values[1](0, 1) = cplx(0.0, 0.2);
  CHECK_THROWS_AS(GaussianStateSpec::tabulated(bad), ConfigError);
}

TEST_CASE("chain momenta form a periodic set") {
  for (int n : {2, 3, 4, 7, 10}) {
    const auto k = chain_momenta(n);
    REQUIRE(k.size() == static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      CHECK(k[m] >= -kPi);
      CHECK(k[m] < kPi);
      if (m > 0) CHECK(k[m] - k[m - 1] == doctest::Approx(kTwoPi / n));
    }
    if (n % 2 == 0) {
      for (int m = 0; m < n; ++m) CHECK(k[m] == doctest::Approx(MomentumGrid::sample(m, n)));
    }
  }
}

TEST_CASE("flat model chain is local in the cell index") {
  const double beta = 1.7;
  const GaussianStateSpec spec = GaussianStateSpec::thermal(flat_model(), beta, 0.0);
  const ChainCorrelationMatrix m = chain_correlation_matrix(spec, Direction::y, 0.4, 5);
  CHECK(m.modes() == 10);
  for (int a = 0; a < 10; ++a) {
    for (int b = 0; b < 10; ++b) {
      double expect = 0.0;
      if (a == b) expect = a % 2 == 0 ? fermi(beta) : fermi(-beta);
      CHECK(std::abs(m.entries(a, b) - expect) <= 1e-14);
    }
  }
}

TEST_CASE("chain correlation matrix invariants") {
  const BlochModel qwz = BlochModel::qwz();
  for (double beta : {0.3, 1.0, 8.0}) {
    for (int cells : {3, 4, 9}) {
      const GaussianStateSpec spec = GaussianStateSpec::thermal(qwz, beta, 0.0);
      for (Direction dir : {Direction::x, Direction::y}) {
        const ChainCorrelationMatrix m = chain_correlation_matrix(spec, dir, 0.9, cells);
        const int p = 2;
        CHECK(max_abs(m.entries - m.entries.adjoint()) <= 1e-14);
        const RealVector ev = Eigen::SelfAdjointEigenSolver<Matrix>(m.entries).eigenvalues();
        CHECK(ev.minCoeff() >= -1e-10);
        CHECK(ev.maxCoeff() <= 1.0 + 1e-10);
        // Circulant blocks.
        for (int j = 0; j < cells; ++j) {
          for (int jp = 0; jp < cells; ++jp) {
            const int jj = (j + 1) % cells, jjp = (jp + 1) % cells;
            CHECK(max_abs(m.entries.block(j * p, jp * p, p, p) - m.entries.block(jj * p, jjp * p, p, p)) <=
                  1e-12);
          }
        }
        // Trace equals the summed occupations of the chain momenta.
        double occupation = 0.0;
        for (int s = 0; s < cells; ++s) {
          const double k = kTwoPi * s / cells;
          occupation += fictitious_hamiltonian(spec, chain_point(dir, k, 0.9)).trace().real();
        }
        CHECK(m.entries.trace().real() == doctest::Approx(occupation).epsilon(1e-12));
        CHECK(std::abs(m.entries.trace().imag()) <= 1e-12);
      }
    }
  }
}

TEST_CASE("chain correlation matrix against real-space oracle") {
  // <c^dagger_a c_b> = [1/(e^G + 1)]_ba with G the real-space g matrix.
  const BlochModel qwz = BlochModel::qwz();
  const double beta = 1.0;
  const int cells = 4;
  for (Direction dir : {Direction::x, Direction::y}) {
    const Matrix h = oracle::real_space_chain(qwz, dir, 0.0, cells);
    const Matrix expect = oracle::fermi_matrix(beta * h).transpose();
    const ChainCorrelationMatrix m =
        chain_correlation_matrix(GaussianStateSpec::thermal(qwz, beta, 0.0), dir, 0.0, cells);
    CHECK(max_abs(m.entries - expect) <= 1e-10);
  }
}

TEST_CASE("chain correlation matrix of a tabulated grid matches a dense DFT") {
  const BlochModel qwz = BlochModel::qwz();
  const MomentumGrid grid(4, 6);
  const FictitiousHamiltonianGrid table = fictitious_grid(GaussianStateSpec::thermal(qwz, 1.0, 0.0), grid);
  const GaussianStateSpec spec = GaussianStateSpec::tabulated(table);
  const int p = 2, cells = 4;

  // M = (F (x) 1) diag(h^fict(k_m)) (F (x) 1)^dagger with F_jm = e^{-i k_m j} / sqrt(N).
  Matrix f(cells * p, cells * p);
  f.setZero();
  Matrix blocks = Matrix::Zero(cells * p, cells * p);
  for (int m = 0; m < cells; ++m) {
    for (int j = 0; j < cells; ++j) {
      f.block(j * p, m * p, p, p) = std::polar(1.0 / std::sqrt(double(cells)), -grid.kx(m) * j) * Matrix::Identity(p, p);
    }
    blocks.block(m * p, m * p, p, p) = table.at(m, 2);
  }
  const Matrix dense = f * blocks * f.adjoint();
  const ChainCorrelationMatrix m = chain_correlation_matrix(spec, Direction::x, grid.ky(2), cells);
  CHECK(max_abs(m.entries - dense) <= 1e-10);

  // Same from the thermal state directly.
  const ChainCorrelationMatrix direct =
      chain_correlation_matrix(GaussianStateSpec::thermal(qwz, 1.0, 0.0), Direction::x, grid.ky(2), cells);
  CHECK(max_abs(direct.entries - dense) <= 1e-10);

  CHECK_THROWS_AS(chain_correlation_matrix(spec, Direction::x, 0.1, cells), ConfigError);
}
