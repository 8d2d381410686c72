#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "hqc/hamiltonian.hpp"

namespace hqc {

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<std::vector<double>> std;

  // Throws std::invalid_argument on non-increasing times or non-finite values.
  void validate() const;
};

struct KrylovOptions {
  int subspace_dim = 30;
  double tolerance = 1e-10;
  int max_halvings = 60;
};

// `points` equally spaced samples on [t0, t1].
std::vector<double> time_grid(double t0, double t1, int points);

// Calls visit(k, psi(times[k])) for psi(t) = exp(-iHt) psi0. Times are
// non-negative and strictly increasing, in the units of H.
void evolve_each(const SparseOperator& H, const StateVector& psi0, const std::vector<double>& times,
                 const std::function<void(std::size_t, const StateVector&)>& visit, const KrylovOptions& options = {});

std::vector<StateVector> evolve(const SparseOperator& H, const StateVector& psi0, const std::vector<double>& times,
                                const KrylovOptions& options = {});

double measure_disconnect(const StateVector& psi, const std::vector<char>& connected);
double measure_disconnect(const StateVector& psi, const StateSpace& space);

// Running trapezoidal mean (1/(t - t0)) * integral; the first point is the raw value.
TimeSeries time_average(const TimeSeries& series);

// Track whose sites all have i == j.
int central_track(const StateSpace& space);
// Per-ordinal row index i of the particle on the central track.
std::vector<double> central_position_weights(const StateSpace& space);
double measure_central_position(const StateVector& psi, const StateSpace& space);
double expectation_diagonal(const StateVector& psi, const std::vector<double>& weights);

// Mean and per-time standard deviation over `spec.runs` members. Members run
// in parallel; the reduction is in run order, so the result is independent
// of the schedule.
TimeSeries ensemble_run(const std::function<TimeSeries(int run)>& member, const DisorderSpec& spec, int threads = 0);

struct RotatedDisorder {
  std::optional<std::vector<double>> plaquette_j;  // absolute, Delta = 1 units
  std::map<Site, double> onsite;                   // absolute, Delta = 1 units
};

struct RotatedDynamics {
  TimeSeries disconnect;  // P_D(Jt)
  TimeSeries position;    // <R>(Jt)
};

// All-left string on the rotated N x N lattice evolved with Delta = 1 and
// J = j_over_delta (spin-factored). Times are Jt.
RotatedDynamics run_rotated(int N, double j_over_delta, const std::vector<double>& jt,
                            const RotatedDisorder& disorder = {});

// <R>(Jt) ensemble for disorder drawn per run. Mean and sigma of `spec` are
// in units of J: hopping draws scale J, on-site draws are energies / J.
TimeSeries disorder_position_ensemble(int N, double j_over_delta, const DisorderSpec& spec,
                                      const std::vector<double>& jt, int threads = 0);

// First time the series reaches `level`, linearly interpolated.
std::optional<double> first_crossing(const TimeSeries& series, double level);

// Least-squares line y = slope * x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual = 0.0;  // root-mean-square residual
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hqc
