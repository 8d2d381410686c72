#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hqc {

// Circuit constants. Energies are in units of the bare charging energy
// e^2/(2 C_J); capacitances are in units of C_J.
struct CircuitParams {
  double E_J1 = 80.0;
  double E_J2 = 60.0;
  double E_J = 1200.0;   // array junction energy
  double alpha = 0.043;  // small-junction ratio
  int N_J = 4;           // array length
  double E_L = 255.0;    // shunt inductive energy
  double C_J1 = 1.0;
  double C_J2 = 1.0;
  double C_a = 1.0 / 12.0;  // array junction capacitance
  double C_b = 0.0;         // small-junction capacitance
  std::optional<double> phi_ext;  // defaults to N_J * pi

  double coupling_capacitance() const { return C_a / N_J + C_b; }
  double external_phase() const;
  // Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

// Values used for the reference design.
CircuitParams reference_design_params();

void to_json(nlohmann::json& j, const CircuitParams& p);
// Accepts "C_a" or the equivalent charging energy "E_Ca" = 1/C_a.
void from_json(const nlohmann::json& j, CircuitParams& p);

struct CouplingResult {
  double alpha = 0.0;
  double C_c = 0.0;
  double E_C1 = 0.0, E_C2 = 0.0;  // dressed charging energies
  double E_cap_coup = 0.0, E_ind_coup = 0.0, E_Kerr_coup = 0.0;
  double E_L1 = 0.0, E_L2 = 0.0;  // dressed inductive energies
  double E_K1 = 0.0, E_K2 = 0.0;  // dressed quartic energies
  double J_cap = 0.0, J_ind = 0.0, J_nonlin = 0.0, J_hop = 0.0;
  double Delta = 0.0;  // cross-Kerr strength
  double omega1 = 0.0, omega2 = 0.0;
  double delta1 = 0.0, delta2 = 0.0;  // anharmonicities
  double Omega1 = 0.0, Omega2 = 0.0;  // dressed qubit frequencies
  std::vector<std::string> warnings;
};

CouplingResult derive_couplings(const CircuitParams& p);

struct SweepRow {
  double alpha = 0.0;
  bool physical = true;
  CouplingResult result;
};

std::vector<SweepRow> sweep_alpha(const CircuitParams& p, double alpha_lo, double alpha_hi, int samples);

// Sign-change search on [lo, hi] by scanning `scan` subintervals, then
// bisection until |f| < ftol. Returns nullopt when no sign change exists.
std::optional<double> bisect_root(const std::function<double(double)>& f, double lo, double hi, double ftol,
                                  int scan = 400);

struct CancellationOptions {
  double alpha_lo = 1e-4;
  double alpha_hi = 0.999;
  bool include_nonlinear = true;
  double tolerance = 1e-10;
};

struct Cancellation {
  double alpha = 0.0;
  CouplingResult result;
};

// Throws NotFound when J_hop keeps its sign over the range.
Cancellation find_cancellation(const CircuitParams& p, const CancellationOptions& options = {});

// Total potential energy of the two transmons joined by the coupler.
double total_potential(const CircuitParams& p, double phi1, double phi2);

struct PotentialReport {
  bool origin_is_global = false;
  bool origin_is_local = false;
  bool metastable = false;
  double min_phi1 = 0.0, min_phi2 = 0.0, min_value = 0.0;
  double origin_value = 0.0;
  double hessian_min_eig = 0.0;
  std::vector<std::string> warnings;
};

// Grid search of the total potential on [-2pi, 2pi]^2 with `points` samples
// per axis (odd counts include the origin) plus a finite-difference Hessian.
PotentialReport potential_minimum_check(const CircuitParams& p, int points = 401);

// Two transmons joined by the coupler, with the untruncated potential.
struct TwoModeModel {
  double E_C1 = 1.0, E_C2 = 1.0, E_cap = 0.0;
  double E_J1 = 80.0, E_J2 = 60.0;
  double E_L = 0.0;       // coupler inductive energy
  double E_small = 0.0;   // small-junction energy alpha * E_J
  double E_array = 0.0;   // array unit-junction energy
  int N_J = 1;
  double phi_ext = 0.0;
};

TwoModeModel two_mode_model(const CircuitParams& p);

struct NumericCouplings {
  double Delta_num = 0.0;
  double J_num = 0.0;
  double Delta_refined = 0.0;  // with doubled levels
  double relative_shift = 0.0;
  int n_levels = 0;
  double E00 = 0.0, E10 = 0.0, E01 = 0.0, E11 = 0.0;
  double min_overlap = 0.0;  // smallest bare/dressed weight among the four states
};

// Diagonalizes in the product of the n_levels lowest single-transmon states,
// at n_levels and 2 * n_levels; throws NumericFailure when doubling shifts
// Delta by more than 1%.
NumericCouplings numeric_validate(const TwoModeModel& m, int n_levels = 10);
NumericCouplings numeric_validate(const CircuitParams& p, int n_levels = 10);

// Single-level diagonalization without the convergence check.
NumericCouplings diagonalize_two_mode(const TwoModeModel& m, int n_levels);

struct Crosstalk {
  double E_13 = 0.0;    // charge-coupling energy between the outer nodes
  double E_C_outer = 0.0;
  double E_L_outer = 0.0;
  double J_xtalk = 0.0;
};

// Outer-outer flip-flop strength of a red-green-red chain with two couplers.
Crosstalk crosstalk_estimate(const CircuitParams& p);

struct ResonatorCoupling {
  double J_eff = 0.0;
  std::vector<std::string> warnings;
};

ResonatorCoupling resonator_mediated_j(double g_res, double Omega, double delta, double omega_res);

// Energy in bare-charging units to MHz, given E_C^bare / h in MHz.
double to_mhz(double energy, double ec_bare_mhz = 200.0);

}  // namespace hqc
