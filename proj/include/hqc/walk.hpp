#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hqc/gadgets.hpp"

namespace hqc {

struct WalkSpec {
  int L = 2;
  std::vector<double> couplings;  // J_k between sites k and k+1, k = 1..L-1
  std::optional<std::vector<Gate>> gates;

  void validate() const;
};

void to_json(nlohmann::json& j, const WalkSpec& w);
void from_json(const nlohmann::json& j, WalkSpec& w);

WalkSpec uniform_walk(int L, double J = 1.0);

// -sum_k J_k (|k+1><k| + h.c.) on L sites (ordinal k-1 for site k).
SparseOperator walk_hamiltonian(const WalkSpec& spec);

struct WalkSpectrum {
  Eigen::VectorXd eigenvalues;   // ascending, -2J cos(pi l/(L+1)), l = 1..L
  Eigen::MatrixXd eigenvectors;  // column l-1 is the sine mode l
};

WalkSpectrum walk_spectrum(int L, double J = 1.0);

// |<L| exp(-i H_L t) |1>|^2 from the analytic mode sum; times are Jt.
TimeSeries success_probability(int L, const std::vector<double>& jt);

WalkSpec peres_couplings(int L, double J = 1.0);

// |<L| exp(-i H t) |1>|^2 for an arbitrary walk by dense diagonalization.
double transfer_probability(const WalkSpec& spec, double t);

struct SnakeReport {
  int N = 0;
  int M = 0;
  int expected_length = 0;  // N(M-1)+1
  int walk_length = 0;      // connected strings found
  bool prefix_order = true; // every valid string is a walk position
  double max_deviation = 0.0;  // |H_eff - gate-labeled walk| entrywise
  bool passed = false;
  // Basis ordinals of the valid strings in walk order (one per position).
  std::vector<std::size_t> walk_order;
};

// Keys are hops (row, column) -> (row, column + 1).
using SnakeGates = std::map<std::pair<int, int>, Gate>;

SnakeReport snake_equivalence(int N, int M, const SnakeGates& gates = {}, double J = 1.0);

// Spin state of all tracks after following the walk forward from the first
// to the last position, starting from `input` (one amplitude per spin word).
Eigen::VectorXd snake_propagate(int N, int M, const SnakeGates& gates, const Eigen::VectorXd& input);

struct FastCnotCase {
  int control_spin = 0;
  int target_spin = 0;
  PassageResult passage;
};

struct FastCnotReport {
  bool control_above = true;
  int base_length = 0;       // snake walk length without the gadget
  int effective_length = 0;  // connected strings per control spin value, -1 if they differ
  std::vector<FastCnotCase> cases;  // (control, target) in {0,1}^2
  bool truth_table_ok = false;
};

// Snake N=3, M=2 with a fast CNOT on row 2; the control sits on row 1
// (above) or row 3 (below).
FastCnotReport fast_cnot_check(double j_over_delta, bool control_above = true, double jt_max = 12.0, int points = 400);

struct LossSpec {
  double gamma = 0.0;
  int L = 2;
};

struct LossResult {
  TimeSeries survival;            // population left on the line
  std::vector<double> trace;      // line plus sink population
  double min_population = 0.0;    // smallest diagonal entry seen
};

// Excitation started on site 1 of a uniform walk (J = 1) decaying from every
// site into a sink at rate gamma; times are Jt.
LossResult lindblad_evolve(const LossSpec& spec, const std::vector<double>& jt, double rtol = 1e-10);

// Surviving population only.
TimeSeries lindblad_loss(const LossSpec& spec, const std::vector<double>& jt, double rtol = 1e-10);

// Decay rate from a log-linear fit of survival(t).
double fit_decay_rate(const TimeSeries& survival);

}  // namespace hqc
