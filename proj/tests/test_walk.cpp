#include <doctest.h>

#include <numbers>

#include "hqc/walk.hpp"
#include "oracles.hpp"

using namespace hqc;

namespace {

// Dense tridiagonal walk, assembled directly.
Eigen::MatrixXd line(int L, const std::vector<double>& J) {
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(L, L);
  for (int k = 0; k + 1 < L; ++k) H(k, k + 1) = H(k + 1, k) = -J[k];
  return H;
}

double end_probability(const Eigen::MatrixXd& H, double t) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(H.rows());
  psi[0] = 1.0;
  return std::norm(oracle::expm_apply(H, psi, t)[H.rows() - 1]);
}

}  // namespace

TEST_SUITE("walk") {
  TEST_CASE("spectrum of short lines") {
    const auto s2 = walk_spectrum(2, 1.5);
    CHECK(s2.eigenvalues[0] == doctest::Approx(-1.5));
    CHECK(s2.eigenvalues[1] == doctest::Approx(1.5));
    const auto s3 = walk_spectrum(3);
    CHECK(s3.eigenvalues[0] == doctest::Approx(-std::sqrt(2.0)));
    CHECK(std::abs(s3.eigenvalues[1]) < 1e-14);
    CHECK(s3.eigenvalues[2] == doctest::Approx(std::sqrt(2.0)));
  }

  TEST_CASE("property: analytic spectrum matches numeric diagonalization up to L=256") {
    for (int L : {2, 3, 17, 64, 256}) {
      const auto s = walk_spectrum(L);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(line(L, std::vector<double>(L - 1, 1.0)));
      CHECK((s.eigenvalues - es.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-10);
      const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
      CHECK((gram - Eigen::MatrixXd::Identity(L, L)).cwiseAbs().maxCoeff() <= 1e-12);
      const Eigen::MatrixXd H = line(L, std::vector<double>(L - 1, 1.0));
      CHECK((H * s.eigenvectors - s.eigenvectors * s.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  TEST_CASE("two-site line: P_L = sin^2(Jt)") {
    const auto t = time_grid(0.0, 5.0, 51);
    const auto s = success_probability(2, t);
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(s.values[k] == doctest::Approx(std::pow(std::sin(t[k]), 2)));
  }

  TEST_CASE("mode sum matches dense evolution for L = 20 and 100") {
    for (int L : {20, 100}) {
      const auto t = time_grid(0.0, 150.0, 151);
      const auto s = success_probability(L, t);
      const Eigen::MatrixXd H = line(L, std::vector<double>(L - 1, 1.0));
      double worst = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) worst = std::max(worst, std::abs(s.values[k] - end_probability(H, t[k])));
      CHECK(worst <= 1e-9);
    }
  }

  TEST_CASE("longer lines have a lower end-site maximum") {
    const auto t = time_grid(0.0, 300.0, 6001);
    const auto a = success_probability(20, t), b = success_probability(100, t);
    CHECK(*std::max_element(b.values.begin(), b.values.end()) < *std::max_element(a.values.begin(), a.values.end()));
  }

  TEST_CASE("engineered couplings transfer perfectly at Jt = pi") {
    const auto w2 = peres_couplings(2);
    REQUIRE(w2.couplings.size() == 1);
    CHECK(w2.couplings[0] == doctest::Approx(0.5));
    for (int L : {2, 8, 16, 64}) {
      const auto w = peres_couplings(L);
      CHECK(transfer_probability(w, std::numbers::pi) > 1.0 - 1e-9);
      // Independent dense check.
      CHECK(end_probability(line(L, w.couplings), std::numbers::pi) > 1.0 - 1e-9);
    }
  }

  TEST_CASE("walk spec validation and JSON") {
    WalkSpec w = uniform_walk(4, 0.5);
    CHECK_NOTHROW(w.validate());
    const nlohmann::json j = w;
    CHECK(j.get<WalkSpec>().couplings == w.couplings);
    w.couplings.pop_back();
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    CHECK_THROWS_AS(uniform_walk(1), std::invalid_argument);
  }

  TEST_CASE("snake projection is the uniform tridiagonal walk for N, M <= 4") {
    for (int N = 1; N <= 4; ++N) {
      for (int M = 2; M <= 4; ++M) {
        const auto r = snake_equivalence(N, M);
        CHECK(r.expected_length == N * (M - 1) + 1);
        CHECK(r.walk_length == r.expected_length);
        CHECK(r.prefix_order);
        CHECK(r.max_deviation == 0.0);
        CHECK(r.passed);
      }
    }
    CHECK(snake_equivalence(3, 6).walk_length == 16);
  }

  TEST_CASE("single-track snake applies X then H") {
    const SnakeGates g = {{{1, 1}, x_gate()}, {{1, 2}, hadamard_gate()}};
    CHECK(snake_equivalence(1, 3, g).passed);
    Eigen::VectorXd in(2);
    in << 1.0, 0.0;
    const Eigen::VectorXd out = snake_propagate(1, 3, g, in);
    const Eigen::Vector2d expect = hadamard_gate() * x_gate() * Eigen::Vector2d(1.0, 0.0);
    CHECK((out - expect).norm() < 1e-14);
  }

  TEST_CASE("Hadamard on the middle track of a 3x3 snake") {
    const SnakeGates g = {{{2, 1}, hadamard_gate()}};
    Eigen::VectorXd in = Eigen::VectorXd::Zero(8);
    in[0b010] = 1.0;  // tracks 1, 2, 3 = 0, 1, 0
    const Eigen::VectorXd out = snake_propagate(3, 3, g, in);
    const Eigen::Vector2d h = hadamard_gate() * Eigen::Vector2d(0.0, 1.0);
    Eigen::VectorXd expect = Eigen::VectorXd::Zero(8);
    expect[0b000] = h[0];
    expect[0b010] = h[1];
    CHECK((out - expect).norm() < 1e-14);
  }

  TEST_CASE("fast CNOT adds one walk site, control above or below") {
    for (bool above : {true, false}) {
      const auto r = fast_cnot_check(0.1, above);
      CHECK(r.base_length == 4);
      CHECK(r.effective_length == r.base_length + 1);
      CHECK(r.truth_table_ok);
      REQUIRE(r.cases.size() == 4);
      for (const auto& c : r.cases) CHECK(c.passage.peak_success > 0.5);
    }
  }

  TEST_CASE("lossless line keeps its population") {
    const auto s = lindblad_loss({0.0, 4}, time_grid(0.0, 5.0, 51));
    for (double v : s.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("uniform loss decays as exp(-gamma t) with trace preserved") {
    const double gamma = 0.3;
    for (int L : {3, 8}) {
      const auto t = time_grid(0.0, 8.0, 81);
      const auto r = lindblad_evolve({gamma, L}, t);
      for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(r.survival.values[k] == doctest::Approx(std::exp(-gamma * t[k])).epsilon(1e-6));
        CHECK(std::abs(r.trace[k] - 1.0) <= 1e-8);
      }
      CHECK(r.min_population >= -1e-10);
    }
  }

  TEST_CASE("fitted decay rate is independent of the line length") {
    const auto t = time_grid(0.0, 10.0, 201);
    const double a = fit_decay_rate(lindblad_loss({0.2, 4}, t));
    const double b = fit_decay_rate(lindblad_loss({0.2, 16}, t));
    CHECK(a == doctest::Approx(0.2).epsilon(0.01));
    CHECK(std::abs(a - b) <= 0.01 * a);
  }
}
