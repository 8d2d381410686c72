#include <doctest.h>

#include <cstdlib>

#include "hqc/dynamics.hpp"
#include "oracles.hpp"

using namespace hqc;

namespace {

SparseOperator rotated_h(const StateSpace& space, double ratio) {
  return build_h_valid(space, 1.0) + build_v_hop(space, ratio);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("zero Hamiltonian leaves the state unchanged") {
    const SparseOperator H = make_operator(5, {});
    StateVector psi = StateVector::Zero(5);
    psi[2] = std::complex<double>(0.6, 0.8);
    for (const auto& s : evolve(H, psi, {0.0, 1.0, 10.0})) CHECK((s - psi).norm() < 1e-15);
  }

  TEST_CASE("two-site walk gives sin^2(Jt) on the far site") {
    const double J = 0.7;
    const SparseOperator H = make_operator(2, {{0, 1, -J}, {1, 0, -J}});
    StateVector psi = StateVector::Zero(2);
    psi[0] = 1.0;
    const auto t = time_grid(0.0, 6.0, 61);
    const auto out = evolve(H, psi, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(std::norm(out[k][1]) == doctest::Approx(std::pow(std::sin(J * t[k]), 2)).epsilon(1e-10));
    }
  }

  TEST_CASE("Krylov evolution matches the dense exponential (N=3 rotated, spins, dim 384)") {
    const StateSpace space(build_rotated(3), false);
    REQUIRE(space.dim() <= 512);
    const auto H = rotated_h(space, 0.1);
    const Eigen::MatrixXd dense = H.dense();
    StateVector psi = basis_state(space, all_left_string(space.lattice()), {1, 0, 1, 1, 0});
    // Mix in a second configuration so several sectors are populated.
    psi += 0.5 * basis_state(space, all_left_string(space.lattice()), {0, 0, 0, 0, 0});
    psi.normalize();
    const std::vector<double> times = {0.0, 0.3, 2.0, 17.0, 80.0};
    const auto krylov = evolve(H, psi, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK((krylov[k] - oracle::expm_apply(dense, psi, times[k])).norm() < 1e-8);
    }
  }

  TEST_CASE("Krylov evolution matches the dense exponential on a random symmetric matrix") {
    const int n = 200;
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n);
    A = (A + A.transpose()).eval() * 0.5;
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) trip.emplace_back(r, c, A(r, c));
    }
    const auto H = make_operator(n, trip);
    StateVector psi = StateVector::Random(n);
    psi.normalize();
    for (double t : {0.5, 3.0}) {
      const auto k = evolve(H, psi, {t}).front();
      CHECK((k - oracle::expm_apply(A, psi, t)).norm() < 1e-8);
    }
  }

  TEST_CASE("property: norm and energy are conserved") {
    const StateSpace space(build_rotated(4), true);
    const auto H = rotated_h(space, 0.15);
    const StateVector psi0 = basis_state(space, all_left_string(space.lattice()));
    const double e0 = (psi0.adjoint() * H.apply(psi0))(0).real();
    evolve_each(H, psi0, time_grid(0.0, 200.0, 101), [&](std::size_t, const StateVector& psi) {
      CHECK(std::abs(psi.norm() - 1.0) <= 1e-9);
      CHECK((psi.adjoint() * H.apply(psi))(0).real() == doctest::Approx(e0).epsilon(1e-9));
    });
  }

  TEST_CASE("disconnect probability: connected start is 0, disconnected mixture is 1") {
    const StateSpace space(build_rotated(3), true);
    const auto mask = valid_mask(space);
    CHECK(measure_disconnect(basis_state(space, all_left_string(space.lattice())), space) == 0.0);
    StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(space.dim()));
    int n = 0;
    for (std::size_t o = 0; o < space.dim(); ++o) {
      if (!mask[o]) {
        psi[static_cast<Eigen::Index>(o)] = 1.0;
        ++n;
      }
    }
    psi /= std::sqrt(double(n));
    CHECK(measure_disconnect(psi, space) == doctest::Approx(1.0));
  }

  TEST_CASE("time average of a constant and of a step") {
    TimeSeries c{time_grid(0.0, 5.0, 11), std::vector<double>(11, 0.3), std::nullopt};
    for (double v : time_average(c).values) CHECK(v == doctest::Approx(0.3));
    const int points = 401;
    TimeSeries step{time_grid(0.0, 2.0, points), {}, std::nullopt};
    for (double t : step.times) step.values.push_back(t > 1.0 ? 1.0 : 0.0);
    // Trapezoid error at the jump is half a grid cell.
    CHECK(time_average(step).values.back() == doctest::Approx(0.5).epsilon(2.0 / points));
  }

  TEST_CASE("TimeSeries validation") {
    TimeSeries bad{{0.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, std::nullopt};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    TimeSeries nan{{0.0, 1.0}, {0.0, NAN}, std::nullopt};
    CHECK_THROWS_AS(nan.validate(), std::invalid_argument);
  }

  TEST_CASE("central position: all-left is 1, all-right is N") {
    const StateSpace space(build_rotated(5), true);
    CHECK(measure_central_position(basis_state(space, all_left_string(space.lattice())), space) == 1.0);
    CHECK(measure_central_position(basis_state(space, all_right_string(space.lattice())), space) == 5.0);
  }

  TEST_CASE("rotated run starts at the left with zero disconnect") {
    const auto jt = time_grid(0.0, 2.0, 21);
    const auto d = run_rotated(3, 0.1, jt);
    CHECK(d.position.values.front() == 1.0);
    CHECK(d.disconnect.values.front() == 0.0);
    for (double p : d.disconnect.values) CHECK((p >= 0.0 && p <= 1.0));
    for (double r : d.position.values) CHECK((r >= 1.0 - 1e-12 && r <= 3.0 + 1e-12));
  }

  TEST_CASE("property: sigma = 0 ensemble equals the clean run with zero spread") {
    const auto jt = time_grid(0.0, 4.0, 41);
    DisorderSpec spec;
    spec.target = DisorderTarget::onsite;
    spec.sigma = 0.0;
    spec.runs = 3;
    const auto ens = disorder_position_ensemble(3, 0.1, spec, jt);
    const auto clean = run_rotated(3, 0.1, jt).position;
    REQUIRE(ens.std);
    for (std::size_t k = 0; k < jt.size(); ++k) {
      CHECK(ens.values[k] == doctest::Approx(clean.values[k]).epsilon(1e-12));
      CHECK(std::abs((*ens.std)[k]) < 1e-12);
    }
    spec.target = DisorderTarget::hopping;
    spec.mean = 1.0;
    const auto hop = disorder_position_ensemble(3, 0.1, spec, jt);
    for (std::size_t k = 0; k < jt.size(); ++k) CHECK(hop.values[k] == doctest::Approx(clean.values[k]).epsilon(1e-12));
  }

  TEST_CASE("property: ensemble result is independent of the worker count") {
    const auto jt = time_grid(0.0, 3.0, 31);
    DisorderSpec spec;
    spec.target = DisorderTarget::onsite;
    spec.sigma = 1.0;
    spec.seed = 99;
    spec.runs = 6;
    const auto one = ensemble_run([&](int run) {
      RotatedDisorder d;
      for (const auto& [s, e] : draw_onsite(build_rotated(3), spec, run)) d.onsite[s] = e * 0.1;
      return run_rotated(3, 0.1, jt, d).position;
    }, spec, 1);
    const auto four = ensemble_run([&](int run) {
      RotatedDisorder d;
      for (const auto& [s, e] : draw_onsite(build_rotated(3), spec, run)) d.onsite[s] = e * 0.1;
      return run_rotated(3, 0.1, jt, d).position;
    }, spec, 4);
    CHECK(one.values == four.values);
    CHECK(*one.std == *four.std);
  }

  TEST_CASE("first crossing interpolates linearly") {
    TimeSeries s{{0.0, 1.0, 2.0}, {0.0, 1.0, 3.0}, std::nullopt};
    CHECK(*first_crossing(s, 2.0) == doctest::Approx(1.5));
    CHECK(*first_crossing(s, 0.5) == doctest::Approx(0.5));
    CHECK_FALSE(first_crossing(s, 4.0).has_value());
  }

  TEST_CASE("least-squares line on exact data") {
    const auto f = fit_line({1.0, 2.0, 3.0, 4.0}, {1.5, 3.5, 5.5, 7.5});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(-0.5));
    CHECK(f.r_squared == doctest::Approx(1.0));
  }
}
