#include "hqc/gatesynth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "hqc/io.hpp"

namespace hqc {

using cd = std::complex<double>;

int GateMatrix::qubits() const {
  int q = 0;
  Eigen::Index d = m.rows();
  while (d > 1) {
    if (d % 2) throw std::invalid_argument("gate dimension is not a power of two");
    d /= 2;
    ++q;
  }
  return q;
}

bool GateMatrix::is_unitary(double tol) const {
  if (m.rows() != m.cols()) return false;
  return (m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool GateMatrix::is_real(double tol) const { return m.imag().cwiseAbs().maxCoeff() <= tol; }

namespace {

GateMatrix from2(cd a, cd b, cd c, cd d) {
  GateMatrix g{Eigen::MatrixXcd(2, 2)};
  g.m << a, b, c, d;
  return g;
}

}  // namespace

GateMatrix rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return from2(c, s, -s, c);
}

GateMatrix pauli_i() { return from2(1, 0, 0, 1); }
GateMatrix pauli_x() { return from2(0, 1, 1, 0); }
GateMatrix pauli_y() { return from2(0, cd(0, -1), cd(0, 1), 0); }
GateMatrix pauli_z() { return from2(1, 0, 0, -1); }

GateMatrix hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return from2(r, r, r, -r);
}

GateMatrix i_y() { return from2(0, 1, -1, 0); }

GateMatrix cnot() { return controlled(pauli_x(), {0}, 1, 2); }
GateMatrix cz() { return controlled(pauli_z(), {0}, 1, 2); }
GateMatrix toffoli() { return controlled(pauli_x(), {0, 1}, 2, 3); }

GateMatrix operator*(const GateMatrix& a, const GateMatrix& b) {
  if (a.m.cols() != b.m.rows()) throw std::invalid_argument("gate dimension mismatch");
  return GateMatrix{a.m * b.m};
}

GateMatrix adjoint(const GateMatrix& g) { return GateMatrix{g.m.adjoint()}; }

GateMatrix kron(const GateMatrix& a, const GateMatrix& b) {
  const Eigen::Index ra = a.m.rows(), ca = a.m.cols(), rb = b.m.rows(), cb = b.m.cols();
  GateMatrix out{Eigen::MatrixXcd(ra * rb, ca * cb)};
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < ca; ++j) out.m.block(i * rb, j * cb, rb, cb) = a.m(i, j) * b.m;
  }
  return out;
}

GateMatrix on_qubit(const GateMatrix& u, int target, int n) { return controlled(u, {}, target, n); }

GateMatrix controlled(const GateMatrix& u, const std::vector<int>& controls, int target, int n) {
  if (u.m.rows() != 2 || u.m.cols() != 2) throw std::invalid_argument("controlled gate needs a single-qubit core");
  if (target < 0 || target >= n) throw std::invalid_argument("target qubit out of range");
  const Eigen::Index d = Eigen::Index{1} << n;
  auto bit = [n](Eigen::Index idx, int q) { return static_cast<int>((idx >> (n - 1 - q)) & 1); };
  const Eigen::Index tmask = Eigen::Index{1} << (n - 1 - target);
  for (int c : controls) {
    if (c < 0 || c >= n || c == target) throw std::invalid_argument("invalid control qubit");
  }
  GateMatrix g{Eigen::MatrixXcd::Zero(d, d)};
  for (Eigen::Index col = 0; col < d; ++col) {
    bool active = true;
    for (int c : controls) active = active && bit(col, c) == 1;
    if (!active) {
      g.m(col, col) = 1.0;
      continue;
    }
    const int tin = bit(col, target);
    for (int tout = 0; tout < 2; ++tout) {
      const Eigen::Index row = tout ? (col | tmask) : (col & ~tmask);
      g.m(row, col) = u.m(tout, tin);
    }
  }
  return g;
}

double max_deviation(const GateMatrix& a, const GateMatrix& b) {
  if (a.m.rows() != b.m.rows() || a.m.cols() != b.m.cols()) throw std::invalid_argument("gate dimension mismatch");
  return (a.m - b.m).cwiseAbs().maxCoeff();
}

SynthReport verify_v_squared() {
  const GateMatrix v = pauli_z() * hadamard();
  SynthReport r;
  r.max_deviation = max_deviation(v * v, i_y());
  r.passed = r.max_deviation <= 1e-14 && v.is_real() && v.is_unitary();
  r.detail = "V = Z H; V^2 compared with iY";
  return r;
}

SynthReport verify_cz_from_h_cnot() {
  const GateMatrix h2 = kron(pauli_i(), hadamard());
  const GateMatrix built = h2 * cnot() * h2;
  SynthReport r;
  r.max_deviation = max_deviation(built, cz());
  r.passed = r.max_deviation <= 1e-14;
  r.detail = "(I x H) CNOT (I x H) compared with CZ";
  return r;
}

GateMatrix cc_iy_circuit(int c1, int c2, int t, int n) {
  // CZ from a CNOT sandwiched by Hadamards on the target.
  auto cz_gate = [n](int c, int tq) {
    const GateMatrix h = on_qubit(hadamard(), tq, n);
    return h * controlled(pauli_x(), {c}, tq, n) * h;
  };
  // Controlled V = controlled Z after controlled H, with V = Z H and V^2 = iY.
  auto c_v = [&](int c) { return cz_gate(c, t) * controlled(hadamard(), {c}, t, n); };
  auto c_vdag = [&](int c) { return controlled(hadamard(), {c}, t, n) * cz_gate(c, t); };
  const GateMatrix x12 = controlled(pauli_x(), {c1}, c2, n);
  // Time order: C_c2(V), CNOT(c1->c2), C_c2(V^dag), CNOT(c1->c2), C_c1(V).
  return c_v(c1) * x12 * c_vdag(c2) * x12 * c_v(c2);
}

GateMatrix toffoli_circuit() {
  constexpr int n = 4, anc = 3, target = 2;
  const GateMatrix ccv = cc_iy_circuit(0, 1, anc, n);
  return adjoint(ccv) * controlled(pauli_x(), {anc}, target, n) * ccv;
}

SynthReport verify_toffoli_synthesis() {
  const GateMatrix circ = toffoli_circuit();
  const GateMatrix tof = toffoli();
  SynthReport r;
  // Restriction to the ancilla |0> subspace: logical index k maps to 2k.
  double leak = 0.0;
  GateMatrix restricted{Eigen::MatrixXcd::Zero(8, 8)};
  for (Eigen::Index in = 0; in < 8; ++in) {
    for (Eigen::Index out = 0; out < 8; ++out) {
      restricted.m(out, in) = circ.m(2 * out, 2 * in);
      leak = std::max(leak, std::abs(circ.m(2 * out + 1, 2 * in)));
    }
  }
  r.max_deviation = std::max(max_deviation(restricted, tof), leak);
  r.passed = r.max_deviation <= 1e-12 && circ.is_unitary();
  r.detail = "ancilla-|0> block compared with the 8x8 Toffoli; ancilla leakage " + format_number(leak);
  return r;
}

}  // namespace hqc
