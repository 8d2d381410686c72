#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "hqc/dynamics.hpp"

namespace hqc {

struct PassageResult {
  TimeSeries P_S;
  TimeSeries P_E;
  double peak_time = 0.0;
  double peak_success = 0.0;
  double peak_error = 0.0;
};

// Arrival probabilities on the final sites: P_S for the expected spin word,
// P_E for every other spin word. Times in `jt` are reported as given while
// evolution uses `t_internal`.
PassageResult measure_passage(const StateSpace& space, const SparseOperator& H, const StateVector& psi0,
                              const std::vector<double>& t_internal, const std::vector<double>& jt,
                              const std::vector<Site>& final_sites, std::uint32_t success_word);

// Evolves the all-left CNOT test state with control spin s_control and
// target spin s_target over Jt in [0, jt_max]. Internally Delta = 1.
PassageResult run_cnot(double j_over_delta, int s_control, int s_target, double jt_max = 10.0, int points = 400);

// True when every spin word on the CNOT output sites has the same H_valid energy.
bool cnot_arrival_degenerate();

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  std::vector<double> ratios;       // points used in the fit
  std::vector<double> mean_errors;  // time-averaged error at jt_eval
  std::vector<std::string> warnings;
};

// Least-squares slope of log(y) against log(x); non-positive or underflowing
// (< 1e-14) y values are dropped with a warning.
ExponentFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

// Time-averaged CNOT error at jt_eval for each ratio, then its log-log slope.
ExponentFit fit_error_exponent(const std::vector<double>& ratios, double jt_eval, int s_control = 1, int s_target = 0);

// Time-averaged (P_S, P_E) over Jt in [0, horizon].
std::pair<double, double> long_time_average(double j_over_delta, double horizon, int s_control = 1, int s_target = 0,
                                            double jt_step = 0.05);

struct ToffoliCase {
  int s1 = 0;  // control 1
  int s2 = 0;  // control 2
  int s = 0;   // target
  double peak_success = 0.0;
  double peak_error = 0.0;
  double peak_time = 0.0;
};

struct ToffoliReport {
  std::vector<ToffoliCase> cases;  // ordered by (s1, s2, s)
  bool effective_logic_ok = false;
  int effective_mismatches = 0;
};

ToffoliReport verify_toffoli_truth_table(double j_over_delta, double jt_max = 20.0, int points = 400);

// Effective Hamiltonian of the Toffoli test lattice with J = 1, optionally
// without the identity hop from split (i,j,0) to split (i+1,j+1,1).
EffectiveOperator toffoli_effective(const StateSpace& space, bool prune_backward_hop);

struct BackwardReport {
  double full_element = 0.0;
  double pruned_element = 0.0;
  double max_other_change = 0.0;
  int changed_entries = 0;
  bool passed = false;
};

BackwardReport check_backward_necessity();

}  // namespace hqc
