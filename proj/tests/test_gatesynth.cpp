#include <doctest.h>

#include <numbers>

#include "hqc/gatesynth.hpp"

using namespace hqc;

namespace {

Eigen::VectorXcd basis(int dim, int k) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v[k] = 1.0;
  return v;
}

}  // namespace

TEST_SUITE("gatesynth") {
  TEST_CASE("rotation gate") {
    CHECK(max_deviation(rotation(0.0), pauli_i()) < 1e-15);
    CHECK(max_deviation(rotation(std::numbers::pi / 2), i_y()) < 1e-15);
    for (double th : {0.3, 1.2, -2.5}) CHECK(max_deviation(rotation(th) * rotation(-th), pauli_i()) < 1e-15);
  }

  TEST_CASE("iY and (ZH)^2") {
    Eigen::Matrix2cd iy;
    iy << 0, 1, -1, 0;
    CHECK((i_y().m - iy).cwiseAbs().maxCoeff() == 0.0);
    CHECK((std::complex<double>(0, 1) * pauli_y().m - iy).cwiseAbs().maxCoeff() == 0.0);
    const auto v = pauli_z() * hadamard();
    CHECK(v.is_real());
    CHECK(max_deviation(v * v, i_y()) <= 1e-14);
    const auto r = verify_v_squared();
    CHECK(r.passed);
    CHECK(r.max_deviation <= 1e-14);
  }

  TEST_CASE("CZ from Hadamards and a CNOT") {
    const auto r = verify_cz_from_h_cnot();
    CHECK(r.passed);
    const auto h2 = kron(pauli_i(), hadamard());
    const auto built = h2 * cnot() * h2;
    for (int k = 0; k < 3; ++k) CHECK((built.m * basis(4, k) - basis(4, k)).norm() < 1e-14);
    CHECK((built.m * basis(4, 3) + basis(4, 3)).norm() < 1e-14);
    CHECK(max_deviation(built * built, GateMatrix{Eigen::MatrixXcd::Identity(4, 4)}) < 1e-14);
    CHECK((built.m - built.m.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("controlled-controlled-iY circuit equals the direct controlled gate") {
    const auto circ = cc_iy_circuit(0, 1, 2, 3);
    CHECK(max_deviation(circ, controlled(i_y(), {0, 1}, 2, 3)) <= 1e-12);
  }

  TEST_CASE("ancilla Toffoli circuit") {
    const auto r = verify_toffoli_synthesis();
    CHECK(r.passed);
    CHECK(r.max_deviation <= 1e-12);
    const auto c = toffoli_circuit();
    // Qubit order: logical 0, 1, 2 then the ancilla as least significant bit.
    CHECK((c.m * basis(16, 0b1100) - basis(16, 0b1110)).norm() < 1e-12);
    CHECK((c.m * basis(16, 0b1000) - basis(16, 0b1000)).norm() < 1e-12);
    for (int in = 0; in < 8; ++in) {
      const int out = (in >= 6) ? (in ^ 1) : in;
      CHECK((c.m * basis(16, 2 * in) - basis(16, 2 * out)).norm() < 1e-12);
    }
  }

  TEST_CASE("property: every gate is unitary, lattice gates are real") {
    for (const auto& g : {pauli_i(), pauli_x(), pauli_y(), pauli_z(), hadamard(), i_y(), cnot(), cz(), toffoli(),
                          rotation(0.7), toffoli_circuit(), cc_iy_circuit(0, 1, 3, 4)}) {
      CHECK(g.is_unitary(1e-12));
    }
    for (const auto& g : {pauli_x(), pauli_z(), hadamard(), i_y(), rotation(0.7)}) CHECK(g.is_real());
  }

  TEST_CASE("invalid gate construction") {
    CHECK_THROWS_AS(controlled(pauli_x(), {1}, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(controlled(cnot(), {0}, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(cnot() * hadamard(), std::invalid_argument);
    CHECK(toffoli().qubits() == 3);
  }
}
