#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hqc {

// Dense gate on n qubits; qubit 0 is the most significant bit of the index.
struct GateMatrix {
  Eigen::MatrixXcd m;

  int qubits() const;
  bool is_unitary(double tol = 1e-12) const;
  bool is_real(double tol = 0.0) const;
};

GateMatrix rotation(double theta);
GateMatrix pauli_i();
GateMatrix pauli_x();
GateMatrix pauli_y();
GateMatrix pauli_z();
GateMatrix hadamard();
GateMatrix i_y();  // i * Y, real valued
GateMatrix cnot();
GateMatrix cz();
GateMatrix toffoli();

GateMatrix operator*(const GateMatrix& a, const GateMatrix& b);
GateMatrix adjoint(const GateMatrix& g);
GateMatrix kron(const GateMatrix& a, const GateMatrix& b);

// Single-qubit gate u acting on `target` of an n-qubit register.
GateMatrix on_qubit(const GateMatrix& u, int target, int n);
// u on `target` when every control qubit is |1>.
GateMatrix controlled(const GateMatrix& u, const std::vector<int>& controls, int target, int n);

// Largest entry-wise deviation |a - b|.
double max_deviation(const GateMatrix& a, const GateMatrix& b);

struct SynthReport {
  bool passed = false;
  double max_deviation = 0.0;
  std::string detail;
};

SynthReport verify_v_squared();
SynthReport verify_cz_from_h_cnot();

// Controlled-controlled-iY on (c1, c2 -> t) built from CNOT, controlled
// Hadamard and CZ, with the CZ itself assembled from Hadamards and a CNOT.
GateMatrix cc_iy_circuit(int c1, int c2, int t, int n);

// Three logical qubits plus an ancilla (qubit 3): CC-iY onto the ancilla,
// CNOT ancilla -> target, then the adjoint CC-iY.
GateMatrix toffoli_circuit();

SynthReport verify_toffoli_synthesis();

}  // namespace hqc
