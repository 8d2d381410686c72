#include "hqc/coupler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hqc/errors.hpp"

namespace hqc {

double CircuitParams::external_phase() const { return phi_ext.value_or(N_J * std::numbers::pi); }

void CircuitParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(E_J1, "E_J1");
  positive(E_J2, "E_J2");
  positive(E_J, "E_J");
  positive(C_J1, "C_J1");
  positive(C_J2, "C_J2");
  positive(C_a, "C_a");
  if (N_J < 1) throw std::invalid_argument("N_J must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(E_L >= 0.0) || !std::isfinite(E_L)) throw std::invalid_argument("E_L must be non-negative");
  if (!(C_b >= 0.0) || !std::isfinite(C_b)) throw std::invalid_argument("C_b must be non-negative");
  // E_J / E_Ca with E_Ca = 1 / C_a in bare-charging units.
  if (E_J * C_a < 50.0) throw std::invalid_argument("array junctions need E_J / E_Ca >= 50");
}

CircuitParams reference_design_params() {
  CircuitParams p;
  p.E_J1 = 80.0;
  p.E_J2 = 60.0;
  p.E_J = 1200.0;
  p.N_J = 4;
  p.E_L = 255.0;
  p.C_a = 1.0 / 12.0;
  p.C_b = 0.0;
  return p;
}

void to_json(nlohmann::json& j, const CircuitParams& p) {
  j = nlohmann::json{{"E_J1", p.E_J1}, {"E_J2", p.E_J2}, {"E_J", p.E_J}, {"alpha", p.alpha},
                     {"N_J", p.N_J},   {"E_L", p.E_L},   {"C_J1", p.C_J1}, {"C_J2", p.C_J2},
                     {"C_a", p.C_a},   {"C_b", p.C_b},   {"phi_ext", p.external_phase()}};
}

void from_json(const nlohmann::json& j, CircuitParams& p) {
  p = CircuitParams{};
  auto get = [&j](const char* key, auto& out) {
    if (j.contains(key)) j.at(key).get_to(out);
  };
  get("E_J1", p.E_J1);
  get("E_J2", p.E_J2);
  get("E_J", p.E_J);
  get("alpha", p.alpha);
  get("N_J", p.N_J);
  get("E_L", p.E_L);
  get("C_J1", p.C_J1);
  get("C_J2", p.C_J2);
  get("C_b", p.C_b);
  if (j.contains("C_a") && j.contains("E_Ca")) throw std::invalid_argument("give either C_a or E_Ca, not both");
  get("C_a", p.C_a);
  if (j.contains("E_Ca")) {
    const double e = j.at("E_Ca").get<double>();
    if (!(e > 0.0)) throw std::invalid_argument("E_Ca must be positive");
    p.C_a = 1.0 / e;
  }
  if (j.contains("phi_ext")) p.phi_ext = j.at("phi_ext").get<double>();
}

CouplingResult derive_couplings(const CircuitParams& p) {
  p.validate();
  CouplingResult r;
  r.alpha = p.alpha;
  const double cc = p.coupling_capacitance();
  const double c1 = p.C_J1, c2 = p.C_J2;
  const double det = c1 * c2 + (c1 + c2) * cc;
  r.C_c = cc;
  r.E_C1 = (c2 + cc) / det;
  r.E_C2 = (c1 + cc) / det;
  r.E_cap_coup = cc / det;

  const double nj = p.N_J;
  r.E_ind_coup = p.E_J * (p.alpha + p.E_L / p.E_J - 1.0 / nj);
  r.E_Kerr_coup = p.E_J * (p.alpha - 1.0 / (nj * nj * nj));
  r.E_L1 = p.E_J1 + r.E_ind_coup;
  r.E_L2 = p.E_J2 + r.E_ind_coup;
  r.E_K1 = p.E_J1 + r.E_Kerr_coup;
  r.E_K2 = p.E_J2 + r.E_Kerr_coup;
  if (!(r.E_L1 > 0.0) || !(r.E_L2 > 0.0)) {
    throw UnphysicalDesign("dressed inductive energy is not positive at alpha = " + std::to_string(p.alpha));
  }

  const double r1 = 2.0 * r.E_C1 / r.E_L1;
  const double r2 = 2.0 * r.E_C2 / r.E_L2;
  r.omega1 = std::sqrt(8.0 * r.E_C1 * r.E_L1);
  r.omega2 = std::sqrt(8.0 * r.E_C2 * r.E_L2);
  r.delta1 = -r.E_K1 * r.E_C1 / r.E_L1;
  r.delta2 = -r.E_K2 * r.E_C2 / r.E_L2;

  const double q1 = std::pow(r1, 0.25), q2 = std::pow(r2, 0.25);
  r.J_cap = 2.0 * r.E_cap_coup / (q1 * q2);
  r.J_ind = -r.E_ind_coup * q1 * q2;
  r.J_nonlin = 0.5 * r.E_Kerr_coup * (q1 * q1 * q1 * q2 + q1 * q2 * q2 * q2);
  r.J_hop = r.J_cap + r.J_ind + r.J_nonlin;
  r.Delta = r.E_Kerr_coup * std::sqrt(r1 * r2);
  r.Omega1 = r.omega1 + r.delta1 - 0.5 * r.Delta;
  r.Omega2 = r.omega2 + r.delta2 - 0.5 * r.Delta;

  if (r.E_L1 / r.E_C1 < 20.0 || r.E_L2 / r.E_C2 < 20.0) {
    r.warnings.emplace_back("transmon regime marginal: E_L/E_C below 20");
  }
  return r;
}

std::vector<SweepRow> sweep_alpha(const CircuitParams& p, double alpha_lo, double alpha_hi, int samples) {
  if (samples < 2) throw std::invalid_argument("sweep needs at least two samples");
  if (!(alpha_lo < alpha_hi)) throw std::invalid_argument("sweep range is empty");
  std::vector<SweepRow> rows;
  rows.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    CircuitParams q = p;
    q.alpha = alpha_lo + (alpha_hi - alpha_lo) * k / (samples - 1);
    SweepRow row;
    row.alpha = q.alpha;
    try {
      row.result = derive_couplings(q);
    } catch (const UnphysicalDesign&) {
      row.physical = false;
      row.result.alpha = q.alpha;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::optional<double> bisect_root(const std::function<double(double)>& f, double lo, double hi, double ftol,
                                  int scan) {
  if (!(lo < hi) || scan < 1) throw std::invalid_argument("invalid bracket");
  // NaN marks points outside the domain; a bracket never spans one.
  double a = lo, fa = f(lo);
  if (fa == 0.0) return lo;
  for (int k = 1; k <= scan; ++k) {
    const double b = lo + (hi - lo) * k / scan;
    const double fb = f(b);
    if (fb == 0.0) return b;
    if (!std::isnan(fa) && !std::isnan(fb) && std::signbit(fa) != std::signbit(fb)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = f(mid);
        if (std::isnan(fm)) break;
        if (std::abs(fm) < ftol || x1 - x0 < 4 * std::numeric_limits<double>::epsilon() * std::abs(mid)) return mid;
        if (std::signbit(fm) == std::signbit(f0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      return 0.5 * (x0 + x1);
    }
    a = b;
    fa = fb;
  }
  return std::nullopt;
}

Cancellation find_cancellation(const CircuitParams& p, const CancellationOptions& options) {
  auto coupling = [&](double a) {
    CircuitParams q = p;
    q.alpha = a;
    CouplingResult r;
    try {
      r = derive_couplings(q);
    } catch (const UnphysicalDesign&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return options.include_nonlinear ? r.J_hop : r.J_cap + r.J_ind;
  };
  auto root = bisect_root(coupling, options.alpha_lo, options.alpha_hi, options.tolerance);
  if (!root || std::isnan(coupling(*root))) throw NotFound("J_hop does not change sign over the alpha range");
  Cancellation c;
  c.alpha = *root;
  CircuitParams q = p;
  q.alpha = *root;
  c.result = derive_couplings(q);
  return c;
}

double total_potential(const CircuitParams& p, double phi1, double phi2) {
  const double d = phi1 - phi2;
  const double nj = p.N_J;
  const double coupler = 0.5 * p.E_L * d * d - p.alpha * p.E_J * std::cos(d) -
                         nj * p.E_J * std::cos((d + p.external_phase()) / nj);
  return -p.E_J1 * std::cos(phi1) - p.E_J2 * std::cos(phi2) + coupler;
}

PotentialReport potential_minimum_check(const CircuitParams& p, int points) {
  p.validate();
  if (points < 3) throw std::invalid_argument("potential grid needs at least 3 points per axis");
  const double lim = 2.0 * std::numbers::pi;
  const double step = 2.0 * lim / (points - 1);
  PotentialReport rep;
  rep.origin_value = total_potential(p, 0.0, 0.0);
  rep.min_value = std::numeric_limits<double>::infinity();
  for (int a = 0; a < points; ++a) {
    const double x = -lim + a * step;
    for (int b = 0; b < points; ++b) {
      const double y = -lim + b * step;
      const double u = total_potential(p, x, y);
      if (u < rep.min_value) {
        rep.min_value = u;
        rep.min_phi1 = x;
        rep.min_phi2 = y;
      }
    }
  }
  const double h = 1e-4;
  auto u = [&](double x, double y) { return total_potential(p, x, y); };
  Eigen::Matrix2d hess;
  hess(0, 0) = (u(h, 0) - 2 * u(0, 0) + u(-h, 0)) / (h * h);
  hess(1, 1) = (u(0, h) - 2 * u(0, 0) + u(0, -h)) / (h * h);
  hess(0, 1) = hess(1, 0) = (u(h, h) - u(h, -h) - u(-h, h) + u(-h, -h)) / (4 * h * h);
  rep.hessian_min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(hess).eigenvalues().minCoeff();
  rep.origin_is_local = rep.hessian_min_eig > 0.0;

  const double scale = std::max(1.0, std::abs(rep.origin_value));
  rep.origin_is_global = rep.min_value >= rep.origin_value - 1e-9 * scale;
  rep.metastable = rep.origin_is_local && !rep.origin_is_global;
  if (!rep.origin_is_global) {
    rep.warnings.push_back("global minimum at (" + std::to_string(rep.min_phi1) + ", " +
                           std::to_string(rep.min_phi2) + ") lies below the origin");
  }
  if (!rep.origin_is_local) rep.warnings.emplace_back("origin is not a local minimum");
  return rep;
}

TwoModeModel two_mode_model(const CircuitParams& p) {
  const CouplingResult r = derive_couplings(p);
  TwoModeModel m;
  m.E_C1 = r.E_C1;
  m.E_C2 = r.E_C2;
  m.E_cap = r.E_cap_coup;
  m.E_J1 = p.E_J1;
  m.E_J2 = p.E_J2;
  m.E_L = p.E_L;
  m.E_small = p.alpha * p.E_J;
  m.E_array = p.E_J;
  m.N_J = p.N_J;
  m.phi_ext = p.external_phase();
  return m;
}

namespace {

// Phase and charge operators of one mode in the `n` lowest oscillator states
// with zero-point phase `s`. Products and functions of the phase are formed in
// a padded basis before truncation.
struct Mode {
  int n = 0;
  Eigen::MatrixXd phase, phase_sq;
  Eigen::MatrixXd charge_im, charge_sq;  // charge = i * charge_im
  Eigen::MatrixXd phase_vecs;
  Eigen::VectorXd phase_vals;

  template <class F>
  Eigen::MatrixXd function(F f) const {
    const Eigen::MatrixXd full = phase_vecs * phase_vals.unaryExpr(f).asDiagonal() * phase_vecs.transpose();
    return full.topLeftCorner(n, n);
  }
};

Mode make_mode(int n, double s) {
  constexpr int pad = 8;
  const int big = n + pad;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(big, big);
  for (int k = 1; k < big; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXd x = s * (a + a.transpose());
  const Eigen::MatrixXd q = (a.transpose() - a) / (2.0 * s);
  Mode m;
  m.n = n;
  m.phase = x.topLeftCorner(n, n);
  m.phase_sq = (x * x).topLeftCorner(n, n);
  m.charge_im = q.topLeftCorner(n, n);
  // n^2 = -charge_im^2.
  m.charge_sq = -(q * q).topLeftCorner(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  m.phase_vecs = es.eigenvectors();
  m.phase_vals = es.eigenvalues();
  return m;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

}  // namespace

NumericCouplings diagonalize_two_mode(const TwoModeModel& m, int n) {
  if (n < 4) throw std::invalid_argument("two-mode basis needs at least 4 levels per mode");
  if (!(m.E_C1 > 0.0) || !(m.E_C2 > 0.0) || !(m.E_J1 > 0.0) || !(m.E_J2 > 0.0) || m.N_J < 1) {
    throw UnphysicalDesign("two-mode model needs positive charging and junction energies");
  }
  // Oscillator scale from the local quadratic stiffness at the origin.
  const double e_ind = m.E_L + m.E_small + m.E_array / m.N_J * std::cos(m.phi_ext / m.N_J);
  auto scale = [&](double e_c, double e_j) {
    const double k = e_j + e_ind > 0.0 ? e_j + e_ind : e_j;
    return std::pow(2.0 * e_c / k, 0.25);
  };
  const Mode m1 = make_mode(n, scale(m.E_C1, m.E_J1));
  const Mode m2 = make_mode(n, scale(m.E_C2, m.E_J2));
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  auto cosf = [](double c) { return [c](double x) { return std::cos(c * x); }; };
  auto sinf = [](double c) { return [c](double x) { return std::sin(c * x); }; };

  Eigen::MatrixXd h = kron(4.0 * m.E_C1 * m1.charge_sq - m.E_J1 * m1.function(cosf(1.0)), id) +
                      kron(id, 4.0 * m.E_C2 * m2.charge_sq - m.E_J2 * m2.function(cosf(1.0)));
  // n1 n2 = -charge_im1 charge_im2.
  h -= 8.0 * m.E_cap * kron(m1.charge_im, m2.charge_im);

  // Coupler terms depend on phi1 - phi2: cos(c(x1 - x2)) = C1 C2 + S1 S2 and
  // sin(c(x1 - x2)) = S1 C2 - C1 S2.
  h += 0.5 * m.E_L * (kron(m1.phase_sq, id) + kron(id, m2.phase_sq) - 2.0 * kron(m1.phase, m2.phase));
  h -= m.E_small * (kron(m1.function(cosf(1.0)), m2.function(cosf(1.0))) +
                    kron(m1.function(sinf(1.0)), m2.function(sinf(1.0))));
  {
    const double c = 1.0 / m.N_J;
    const Eigen::MatrixXd c1 = m1.function(cosf(c)), s1 = m1.function(sinf(c));
    const Eigen::MatrixXd c2 = m2.function(cosf(c)), s2 = m2.function(sinf(c));
    const double ce = std::cos(m.phi_ext * c), se = std::sin(m.phi_ext * c);
    h -= m.N_J * m.E_array * (ce * (kron(c1, c2) + kron(s1, s2)) - se * (kron(s1, c2) - kron(c1, s2)));
  }
  h = 0.5 * (h + h.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw NumericFailure("two-mode diagonalization failed");
  const Eigen::MatrixXd& vecs = es.eigenvectors();

  // Effective Hamiltonian on the span of oscillator product states `rows`:
  // the dressed states with the largest weight in the span, projected and
  // symmetrically orthonormalized. Product state |ab> is basis vector a*n+b.
  NumericCouplings out;
  out.n_levels = n;
  out.min_overlap = 1.0;
  auto block = [&](const std::vector<Eigen::Index>& rows) {
    const Eigen::Index d = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd weight = Eigen::VectorXd::Zero(vecs.cols());
    for (Eigen::Index r : rows) weight += vecs.row(r).transpose().cwiseAbs2();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(vecs.cols()));
    for (Eigen::Index k = 0; k < vecs.cols(); ++k) order[static_cast<std::size_t>(k)] = k;
    std::partial_sort(order.begin(), order.begin() + d, order.end(),
                      [&](Eigen::Index x, Eigen::Index y) { return weight(x) > weight(y); });
    Eigen::MatrixXd q(d, d);
    Eigen::VectorXd e(d);
    for (Eigen::Index c = 0; c < d; ++c) {
      const Eigen::Index k = order[static_cast<std::size_t>(c)];
      e(c) = es.eigenvalues()(k);
      for (Eigen::Index r = 0; r < d; ++r) q(r, c) = vecs(rows[static_cast<std::size_t>(r)], k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ss(q.transpose() * q);
    const double smallest = ss.eigenvalues().minCoeff();
    out.min_overlap = std::min(out.min_overlap, smallest);
    if (smallest < 0.5) throw NumericFailure("dressed states leave the low-excitation block; increase levels");
    const Eigen::MatrixXd s_inv_half = ss.eigenvectors() *
                                       ss.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                       ss.eigenvectors().transpose();
    const Eigen::MatrixXd u = q * s_inv_half;
    return Eigen::MatrixXd(u * e.asDiagonal() * u.transpose());
  };
  const Eigen::Index nn = n;
  const Eigen::MatrixXd h0 = block({0});
  const Eigen::MatrixXd h1 = block({nn, 1});              // |10>, |01>
  const Eigen::MatrixXd h2 = block({2 * nn, nn + 1, 2});  // |20>, |11>, |02>
  out.E00 = h0(0, 0);
  out.E10 = h1(0, 0);
  out.E01 = h1(1, 1);
  out.E11 = h2(1, 1);
  out.J_num = h1(0, 1);
  out.Delta_num = -(out.E11 - out.E10 - out.E01 + out.E00);
  return out;
}

NumericCouplings numeric_validate(const TwoModeModel& m, int n_levels) {
  if (n_levels < 8) throw std::invalid_argument("numeric validation needs at least 8 levels per mode");
  NumericCouplings coarse = diagonalize_two_mode(m, n_levels);
  const NumericCouplings fine = diagonalize_two_mode(m, 2 * n_levels);
  coarse.Delta_refined = fine.Delta_num;
  const double diff = std::abs(fine.Delta_num - coarse.Delta_num);
  coarse.relative_shift = fine.Delta_num != 0.0 ? diff / std::abs(fine.Delta_num) : diff;
  if (diff > 0.01 * std::abs(fine.Delta_num) + 1e-9) {
    throw NumericFailure("Delta shifts by more than 1% when doubling levels; increase levels");
  }
  return coarse;
}

NumericCouplings numeric_validate(const CircuitParams& p, int n_levels) {
  return numeric_validate(two_mode_model(p), n_levels);
}

Crosstalk crosstalk_estimate(const CircuitParams& p) {
  p.validate();
  const double cc = p.coupling_capacitance();
  Eigen::Matrix3d c;
  c << p.C_J1 + cc, -cc, 0.0, -cc, p.C_J2 + 2.0 * cc, -cc, 0.0, -cc, p.C_J1 + cc;
  const double det = c.determinant();
  const double scale = c.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > 1e-12 * scale * scale * scale)) throw std::invalid_argument("capacitance matrix is singular");
  const Eigen::Matrix3d inv = c.inverse();
  const CouplingResult r = derive_couplings(p);
  Crosstalk x;
  x.E_13 = inv(0, 2);
  x.E_C_outer = inv(0, 0);
  x.E_L_outer = r.E_L1;
  const double ratio = 2.0 * x.E_C_outer / x.E_L_outer;
  x.J_xtalk = 2.0 * x.E_13 / std::sqrt(ratio);
  return x;
}

ResonatorCoupling resonator_mediated_j(double g_res, double Omega, double delta, double omega_res) {
  const double d1 = Omega - omega_res;
  const double d2 = Omega + delta - omega_res;
  if (std::abs(d1) < 1e-9 || std::abs(d2) < 1e-9) throw std::invalid_argument("resonator is on resonance");
  ResonatorCoupling r;
  // Second term: the |1> <-> |2> transition carries sqrt(2) g.
  r.J_eff = g_res * g_res / d1 - 0.5 * 2.0 * g_res * g_res / d2;
  if (std::abs(d1) < 5.0 * std::abs(g_res) || std::abs(d2) < 5.0 * std::abs(g_res)) {
    r.warnings.emplace_back("detuning below 5 g; dispersive expansion is marginal");
  }
  return r;
}

double to_mhz(double energy, double ec_bare_mhz) { return energy * ec_bare_mhz; }

}  // namespace hqc
