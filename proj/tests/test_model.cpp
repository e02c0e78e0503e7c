#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mixtopo/model.hpp"
#include "oracles.hpp"

using namespace mixtopo;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("momenta wrap into [-pi, pi)") {
  CHECK(wrap_momentum(kPi) == doctest::Approx(-kPi));
  CHECK(wrap_momentum(-kPi) == doctest::Approx(-kPi));
  CHECK(wrap_momentum(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(wrap_momentum(0.25) == doctest::Approx(0.25));
}

TEST_CASE("momentum grid samples and wrapping") {
  const MomentumGrid grid(4, 6);
  CHECK(grid.kx(0) == doctest::Approx(-kPi));
  CHECK(grid.kx(2) == doctest::Approx(0.0));
  CHECK(grid.ky(3) == doctest::Approx(0.0));
  CHECK(grid.index(4, 0) == grid.index(0, 0));
  CHECK(grid.index(-1, -1) == grid.index(3, 5));
  CHECK_THROWS_AS(MomentumGrid(1, 4), ConfigError);
}

TEST_CASE("qwz d-vector at special momenta") {
  auto near = [](const DVector& a, double x, double y, double z) {
    CHECK(std::abs(a.x - x) <= 1e-15);
    CHECK(std::abs(a.y - y) <= 1e-15);
    CHECK(std::abs(a.z - z) <= 1e-15);
  };
  near(qwz_d_vector({0.0, 0.0}), 0.0, 0.0, -1.0);
  near(qwz_d_vector({kPi, kPi}), 0.0, 0.0, 3.0);
  // 1 - cos(pi/2) - cos(0) = 0.
  near(qwz_d_vector({kPi / 2, 0.0}), 1.0, 0.0, 0.0);
  const DVector d = qwz_d_vector({0.3, -1.1}, {2.0, 0.5, -0.7});
  CHECK(d.x == doctest::Approx(2.0 * std::sin(0.3)));
  CHECK(d.y == doctest::Approx(0.5 * std::sin(-1.1)));
  CHECK(d.z == doctest::Approx(-0.7 - std::cos(0.3) - std::cos(-1.1)));
}

TEST_CASE("bloch matrix from d reproduces the Pauli matrices") {
  const cplx i(0.0, 1.0);
  Matrix sz(2, 2), sx(2, 2), sy(2, 2);
  sz << 1, 0, 0, -1;
  sx << 0, 1, 1, 0;
  sy << 0, -i, i, 0;
  CHECK(max_abs(bloch_matrix_from_d({0, 0, 1}) - sz) == 0.0);
  CHECK(max_abs(bloch_matrix_from_d({1, 0, 0}) - sx) == 0.0);
  CHECK(max_abs(bloch_matrix_from_d({0, 1, 0}) - sy) == 0.0);
}

TEST_CASE("band system of sigma_z and d.sigma") {
  Matrix sz(2, 2);
  sz << 1, 0, 0, -1;
  const BandSystem b = band_system(sz);
  CHECK(b.energies(0) == doctest::Approx(-1.0));
  CHECK(b.energies(1) == doctest::Approx(1.0));
  CHECK(std::abs(b.states(0, 0)) < 1e-15);
  CHECK(b.states(1, 0) == cplx(1.0));
  CHECK(b.states(0, 1) == cplx(1.0));

  const DVector d{0.4, -1.3, 0.2};
  const BandSystem bd = band_system(bloch_matrix_from_d(d));
  CHECK(bd.energies(0) == doctest::Approx(-d.norm()).epsilon(1e-12));
  CHECK(bd.energies(1) == doctest::Approx(d.norm()).epsilon(1e-12));

  const BandSystem q = band_system(BlochModel::qwz()(0.0, 0.0));
  CHECK(q.energies(0) == doctest::Approx(-1.0));
  CHECK(q.energies(1) == doctest::Approx(1.0));
}

TEST_CASE("band system rejects non-Hermitian input") {
  Matrix h(2, 2);
  h << 1, 0.5, 0, -1;
  CHECK_THROWS_AS(band_system(h), NumericalError);
}

TEST_CASE("band system invariants on random Hermitian matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + trial % 4;
    const Matrix h = oracle::random_hermitian(rng, p, 1.0);
    const BandSystem b = band_system(h);
    CHECK(max_abs(b.states.adjoint() * b.states - Matrix::Identity(p, p)) <= 1e-10);
    for (int n = 0; n < p; ++n) {
      CHECK((h * b.state(n) - b.energies(n) * b.state(n)).norm() <= 1e-10);
      if (n > 0) CHECK(b.energies(n) >= b.energies(n - 1));
      // Gauge: largest component real and positive.
      Eigen::Index arg = 0;
      b.state(n).cwiseAbs().maxCoeff(&arg);
      CHECK(b.states(arg, n).imag() == 0.0);
      CHECK(b.states(arg, n).real() > 0.0);
    }
    const BandSystem again = band_system(h);
    CHECK((again.states - b.states).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again.energies - b.energies).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("qwz model is Hermitian, periodic and has spectrum +-|d|") {
  const BlochModel model = BlochModel::qwz();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int trial = 0; trial < 200; ++trial) {
    const double kx = u(rng), ky = u(rng);
    const Matrix h = model(kx, ky);
    CHECK(hermiticity_defect(h) <= 1e-12);
    CHECK(max_abs(h - model(kx + kTwoPi, ky)) <= 1e-14);
    CHECK(max_abs(h - model(kx, ky + kTwoPi)) <= 1e-14);
    const double norm = qwz_d_vector({kx, ky}).norm();
    const BandSystem b = band_system(h);
    CHECK(std::abs(b.energies(0) + norm) <= 1e-10);
    CHECK(std::abs(b.energies(1) - norm) <= 1e-10);
  }
}

TEST_CASE("band gap of qwz and of a flat model") {
  const double gap = band_gap(BlochModel::qwz(), MomentumGrid(64, 64), 0.0);
  CHECK(std::abs(gap - 2.0) <= 1e-9);

  // Independent dense search of min 2|d| (direct gap equals the indirect one
  // for this particle-hole symmetric spectrum).
  double best = 1e9;
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      best = std::min(best, 2.0 * qwz_d_vector({MomentumGrid::sample(i, 64), MomentumGrid::sample(j, 64)}).norm());
    }
  }
  CHECK(std::abs(gap - best) <= 1e-12);

  const BlochModel flat = BlochModel::from_d_vector([](const MomentumPoint&) { return DVector{0, 0, 1}; });
  CHECK(band_gap(flat, MomentumGrid(8, 8), 0.0) == doctest::Approx(2.0));
}

TEST_CASE("band gap rejects mu inside a band and names the momentum") {
  try {
    band_gap(BlochModel::qwz(), MomentumGrid(32, 32), 1.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("k=(") != std::string::npos);
  }
}

TEST_CASE("tabulated models evaluate only on grid momenta") {
  const MomentumGrid grid(4, 4);
  MatrixGrid table{grid, 2, {}};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) table.values.push_back(BlochModel::qwz()(grid.at(i, j)));
  }
  const BlochModel tab = BlochModel::tabulated(table);
  CHECK(max_abs(tab(grid.at(1, 2)) - BlochModel::qwz()(grid.at(1, 2))) == 0.0);
  CHECK(max_abs(tab(grid.kx(1) + kTwoPi, grid.ky(2)) - BlochModel::qwz()(grid.at(1, 2))) <= 1e-15);
  CHECK_THROWS_AS(tab(0.1, 0.0), ConfigError);
}
