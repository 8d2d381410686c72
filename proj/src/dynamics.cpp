#include "hqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

using cd = std::complex<double>;

void TimeSeries::validate() const {
  if (times.size() != values.size()) throw std::invalid_argument("time series length mismatch");
  if (std && std->size() != times.size()) throw std::invalid_argument("time series std length mismatch");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) throw std::invalid_argument("times must be strictly increasing");
    if (!std::isfinite(values[k])) throw std::invalid_argument("non-finite value in time series");
  }
}

std::vector<double> time_grid(double t0, double t1, int points) {
  if (points < 2 || !(t1 > t0)) throw std::invalid_argument("time grid needs t1 > t0 and at least two points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) out[k] = t0 + (t1 - t0) * k / (points - 1);
  out.back() = t1;
  return out;
}

namespace {

// Lanczos basis of the Krylov space of H started at v0/|v0|, grown until the
// a-posteriori error of exp(-iH dt) falls below tol or the size limit is hit.
class LanczosStep {
 public:
  LanczosStep(const SparseOperator& H, const StateVector& v0, int max_dim)
      : H_(H), n_(static_cast<Eigen::Index>(v0.size())), max_dim_(max_dim) {
    norm0_ = v0.norm();
    V_.resize(n_, max_dim + 1);
    V_.col(0) = v0 / norm0_;
    alpha_.reserve(max_dim);
    beta_.reserve(max_dim);
  }

  // Adds one Lanczos vector; returns false once the space is invariant.
  bool grow() {
    if (exhausted_) return false;
    const int j = size();
    StateVector w = H_.apply(V_.col(j));
    const double a = V_.col(j).dot(w).real();
    w -= a * V_.col(j);
    if (j > 0) w -= beta_.back() * V_.col(j - 1);
    // Two passes of full reorthogonalization keep the basis unitary.
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) w -= V_.col(i).dot(w) * V_.col(i);
    }
    alpha_.push_back(a);
    const double b = w.norm();
    beta_.push_back(b);
    const double scale = std::max(1.0, std::abs(a) + (j > 0 ? beta_[j - 1] : 0.0));
    if (b <= 1e-13 * scale) {
      exhausted_ = true;
    } else {
      V_.col(j + 1) = w / b;
    }
    decomposed_ = -1;
    return true;
  }

  int size() const { return static_cast<int>(alpha_.size()); }
  bool exhausted() const { return exhausted_; }
  bool full() const { return exhausted_ || size() >= max_dim_ || size() >= n_; }

  // Coefficients of exp(-i T dt) e1 and the truncation error estimate.
  double coefficients(double dt, Eigen::VectorXcd& c) {
    const int k = size();
    if (decomposed_ != k) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
      for (int i = 0; i < k; ++i) {
        T(i, i) = alpha_[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta_[i];
      }
      solver_.compute(T);
      decomposed_ = k;
    }
    const auto& Q = solver_.eigenvectors();
    const auto& lam = solver_.eigenvalues();
    Eigen::VectorXcd phase(k);
    for (int i = 0; i < k; ++i) phase[i] = std::exp(cd(0.0, -lam[i] * dt)) * Q(0, i);
    c = Q.cast<cd>() * phase;
    if (exhausted_ || size() >= n_) return 0.0;
    return beta_.back() * std::abs(c[k - 1]) * norm0_;
  }

  StateVector combine(const Eigen::VectorXcd& c) const { return norm0_ * (V_.leftCols(c.size()) * c); }

 private:
  const SparseOperator& H_;
  Eigen::Index n_;
  int max_dim_;
  double norm0_ = 0.0;
  Eigen::MatrixXcd V_;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  bool exhausted_ = false;
  int decomposed_ = -1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

// Advances psi by dt_target if possible, else by the largest halved step
// meeting the tolerance. Returns the step actually taken.
double krylov_step(const SparseOperator& H, StateVector& psi, double dt_target, const KrylovOptions& opt) {
  const int max_dim = std::max(1, std::min<int>(opt.subspace_dim, static_cast<int>(psi.size())));
  LanczosStep lz(H, psi, max_dim);
  Eigen::VectorXcd c;
  double dt = dt_target;
  // Grow in small batches, checking the error for the requested step.
  while (true) {
    lz.grow();
    const bool check = lz.full() || lz.size() % 4 == 0;
    if (!check) continue;
    if (lz.coefficients(dt, c) <= opt.tolerance) break;
    if (!lz.full()) continue;
    int halvings = 0;
    while (lz.coefficients(dt, c) > opt.tolerance) {
      dt *= 0.5;
      if (++halvings > opt.max_halvings) throw NumericFailure("Krylov step failed to converge");
    }
    break;
  }
  psi = lz.combine(c);
  return dt;
}

}  // namespace

void evolve_each(const SparseOperator& H, const StateVector& psi0, const std::vector<double>& times,
                 const std::function<void(std::size_t, const StateVector&)>& visit, const KrylovOptions& options) {
  if (static_cast<std::size_t>(psi0.size()) != H.dim()) throw std::invalid_argument("state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state is not normalized");
  if (options.subspace_dim < 1 || !(options.tolerance > 0)) throw std::invalid_argument("invalid Krylov options");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0 || (k > 0 && !(times[k] > times[k - 1]))) {
      throw std::invalid_argument("times must be non-negative and strictly increasing");
    }
  }
  StateVector psi = psi0;
  double t = 0.0;
  double dt_guess = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) {
    while (t < times[k]) {
      const double remaining = times[k] - t;
      const bool last = dt_guess >= remaining;
      const double target = last ? remaining : dt_guess;
      const double taken = krylov_step(H, psi, target, options);
      if (taken < target) {
        dt_guess = taken;
      } else if (!last) {
        dt_guess = 2.0 * taken;
      }
      t = (last && taken == target) ? times[k] : t + taken;
    }
    visit(k, psi);
  }
}

std::vector<StateVector> evolve(const SparseOperator& H, const StateVector& psi0, const std::vector<double>& times,
                                const KrylovOptions& options) {
  std::vector<StateVector> out;
  out.reserve(times.size());
  evolve_each(H, psi0, times, [&](std::size_t, const StateVector& psi) { out.push_back(psi); }, options);
  return out;
}

double measure_disconnect(const StateVector& psi, const std::vector<char>& connected) {
  if (connected.size() != static_cast<std::size_t>(psi.size())) throw std::invalid_argument("mask size mismatch");
  double p = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    if (connected[k]) p += std::norm(psi[k]);
  }
  return std::clamp(1.0 - p, 0.0, 1.0);
}

double measure_disconnect(const StateVector& psi, const StateSpace& space) {
  return measure_disconnect(psi, valid_mask(space));
}

TimeSeries time_average(const TimeSeries& series) {
  if (series.times.empty()) throw std::invalid_argument("time average of an empty series");
  series.validate();
  TimeSeries out;
  out.times = series.times;
  out.values.resize(series.values.size());
  out.values[0] = series.values[0];
  double integral = 0.0;
  const double t0 = series.times[0];
  for (std::size_t k = 1; k < series.times.size(); ++k) {
    integral += 0.5 * (series.values[k] + series.values[k - 1]) * (series.times[k] - series.times[k - 1]);
    out.values[k] = integral / (series.times[k] - t0);
  }
  return out;
}

int central_track(const StateSpace& space) {
  const auto& tracks = space.lattice().tracks;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const bool diagonal = std::all_of(tracks[t].begin(), tracks[t].end(),
                                      [](const Site& s) { return s.i == s.j && !s.is_split() && !s.half_step; });
    if (diagonal) return static_cast<int>(t);
  }
  throw std::invalid_argument("lattice has no central track");
}

std::vector<double> central_position_weights(const StateSpace& space) {
  const int t = central_track(space);
  std::vector<double> w(space.dim());
  for (std::size_t k = 0; k < space.dim(); ++k) w[k] = space.site_at(t, space.positions(k)[t]).i;
  return w;
}

double expectation_diagonal(const StateVector& psi, const std::vector<double>& weights) {
  double r = 0.0;
  for (Eigen::Index k = 0; k < psi.size(); ++k) r += weights[k] * std::norm(psi[k]);
  return r;
}

double measure_central_position(const StateVector& psi, const StateSpace& space) {
  return expectation_diagonal(psi, central_position_weights(space));
}

TimeSeries ensemble_run(const std::function<TimeSeries(int run)>& member, const DisorderSpec& spec, int threads) {
  spec.validate();
  std::vector<TimeSeries> results(static_cast<std::size_t>(spec.runs));
  parallel_for(results.size(), [&](std::size_t r) { results[r] = member(static_cast<int>(r)); }, threads);
  TimeSeries out;
  out.times = results.front().times;
  const std::size_t n = out.times.size();
  out.values.assign(n, 0.0);
  std::vector<double> sq(n, 0.0);
  for (const auto& r : results) {
    if (r.times != out.times) throw std::invalid_argument("ensemble members use different time grids");
    for (std::size_t k = 0; k < n; ++k) out.values[k] += r.values[k];
  }
  for (auto& v : out.values) v /= spec.runs;
  for (const auto& r : results) {
    for (std::size_t k = 0; k < n; ++k) sq[k] += (r.values[k] - out.values[k]) * (r.values[k] - out.values[k]);
  }
  for (auto& v : sq) v = std::sqrt(v / spec.runs);
  out.std = std::move(sq);
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < x.size(); ++k) mx += x[k], my += y[k];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0) throw std::invalid_argument("line fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - (f.slope * x[k] + f.intercept);
    ss_res += r * r;
  }
  f.residual = std::sqrt(ss_res / n);
  f.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

RotatedDynamics run_rotated(int N, double j_over_delta, const std::vector<double>& jt,
                            const RotatedDisorder& disorder) {
  if (!(j_over_delta > 0)) throw std::invalid_argument("J/Delta must be positive");
  const LatticeSpec lattice = build_rotated(N);
  const StateSpace space(lattice, true);
  SparseOperator H = build_h_valid(space, 1.0) + build_v_hop(space, j_over_delta, disorder.plaquette_j);
  if (!disorder.onsite.empty()) H = H + add_onsite(space, disorder.onsite);
  const std::vector<char> mask = valid_mask(space);
  const std::vector<double> weights = central_position_weights(space);
  std::vector<double> t(jt.size());
  std::transform(jt.begin(), jt.end(), t.begin(), [&](double x) { return x / j_over_delta; });

  RotatedDynamics out;
  out.disconnect.times = jt;
  out.position.times = jt;
  out.disconnect.values.resize(jt.size());
  out.position.values.resize(jt.size());
  evolve_each(H, basis_state(space, all_left_string(lattice)), t, [&](std::size_t k, const StateVector& psi) {
    out.disconnect.values[k] = measure_disconnect(psi, mask);
    out.position.values[k] = expectation_diagonal(psi, weights);
  });
  return out;
}

TimeSeries disorder_position_ensemble(int N, double j_over_delta, const DisorderSpec& spec,
                                      const std::vector<double>& jt, int threads) {
  spec.validate();
  const LatticeSpec lattice = build_rotated(N);
  auto member = [&](int run) {
    RotatedDisorder d;
    if (spec.target == DisorderTarget::hopping) {
      std::vector<double> js = draw_hopping(lattice, spec, run);
      for (double& v : js) v *= j_over_delta;
      d.plaquette_j = std::move(js);
    } else {
      d.onsite = draw_onsite(lattice, spec, run);
      for (auto& [site, e] : d.onsite) e *= j_over_delta;
    }
    return run_rotated(N, j_over_delta, jt, d).position;
  };
  return ensemble_run(member, spec, threads);
}

std::optional<double> first_crossing(const TimeSeries& series, double level) {
  const auto& x = series.times;
  const auto& y = series.values;
  if (x.empty()) return std::nullopt;
  if (y[0] >= level) return x[0];
  for (std::size_t k = 1; k < y.size(); ++k) {
    if (y[k] >= level) return x[k - 1] + (level - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
  }
  return std::nullopt;
}

}  // namespace hqc
