#include "hqc/gadgets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hqc/parallel.hpp"

namespace hqc {

namespace {

void check_ratio(double r) {
  if (!(r > 0 && r <= 0.25)) throw std::invalid_argument("J/Delta must lie in (0, 1/4]");
}

void check_spin(int s) {
  if (s != 0 && s != 1) throw std::invalid_argument("spin values are 0 or 1");
}

std::vector<double> scaled(const std::vector<double>& v, double f) {
  std::vector<double> out(v);
  for (auto& x : out) x *= f;
  return out;
}

SparseOperator full_hamiltonian(const StateSpace& space, double J) {
  return build_h_valid(space, 1.0) + build_v_hop(space, J);
}

}  // namespace

PassageResult measure_passage(const StateSpace& space, const SparseOperator& H, const StateVector& psi0,
                              const std::vector<double>& t_internal, const std::vector<double>& jt,
                              const std::vector<Site>& final_sites, std::uint32_t success_word) {
  PassageResult r;
  r.P_S.times = jt;
  r.P_E.times = jt;
  r.P_S.values.resize(jt.size());
  r.P_E.values.resize(jt.size());
  const std::size_t base = space.index_of_sites(final_sites, 0);
  const std::size_t words = space.spin_states();
  evolve_each(H, psi0, t_internal, [&](std::size_t k, const StateVector& psi) {
    double ps = 0.0, pe = 0.0;
    for (std::uint32_t w = 0; w < words; ++w) {
      const double p = std::norm(psi[static_cast<Eigen::Index>(base + w)]);
      (w == success_word ? ps : pe) += p;
    }
    r.P_S.values[k] = ps;
    r.P_E.values[k] = pe;
  });
  // Global maximum, earliest on ties.
  std::size_t best = 0;
  for (std::size_t k = 1; k < jt.size(); ++k) {
    if (r.P_S.values[k] > r.P_S.values[best]) best = k;
  }
  r.peak_time = jt[best];
  r.peak_success = r.P_S.values[best];
  r.peak_error = r.P_E.values[best];
  return r;
}

PassageResult run_cnot(double j_over_delta, int s_control, int s_target, double jt_max, int points) {
  check_ratio(j_over_delta);
  check_spin(s_control);
  check_spin(s_target);
  const StateSpace space(build_cnot_test_lattice(false), false);
  const auto H = full_hamiltonian(space, j_over_delta);
  const auto psi0 = basis_state(space, all_left_string(space.lattice()), {s_control, s_target});
  const auto jt = time_grid(0.0, jt_max, points);
  const std::uint32_t ok = space.spin_word_of({s_control, s_target ^ s_control});
  return measure_passage(space, H, psi0, scaled(jt, 1.0 / j_over_delta), jt, all_right_string(space.lattice()), ok);
}

bool cnot_arrival_degenerate() {
  const StateSpace space(build_cnot_test_lattice(false), false);
  const auto e = edge_energies(space);
  const std::size_t base = space.index_of_sites(all_right_string(space.lattice()), 0);
  for (std::uint32_t w = 1; w < space.spin_states(); ++w) {
    if (e[static_cast<Eigen::Index>(base + w)] != e[static_cast<Eigen::Index>(base)]) return false;
  }
  return e[static_cast<Eigen::Index>(base)] == e.minCoeff();
}

ExponentFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  ExponentFit f;
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(y[k] >= 1e-14) || !(x[k] > 0)) {
      f.warnings.push_back("excluded point x=" + std::to_string(x[k]) + " (value below 1e-14)");
      continue;
    }
    f.ratios.push_back(x[k]);
    f.mean_errors.push_back(y[k]);
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  if (lx.size() < 2) throw std::invalid_argument("fewer than two usable points for the exponent fit");
  const auto line = fit_line(lx, ly);
  f.slope = line.slope;
  f.intercept = line.intercept;
  f.residual = line.residual;
  return f;
}

ExponentFit fit_error_exponent(const std::vector<double>& ratios, double jt_eval, int s_control, int s_target) {
  if (ratios.size() < 3) throw std::invalid_argument("exponent fit needs at least three ratios");
  for (double r : ratios) check_ratio(r);
  if (!(jt_eval > 0)) throw std::invalid_argument("evaluation time must be positive");
  std::vector<double> mean_error(ratios.size());
  const int points = std::max(400, static_cast<int>(std::ceil(jt_eval / 0.005)) + 1);
  parallel_for(ratios.size(), [&](std::size_t k) {
    const auto run = run_cnot(ratios[k], s_control, s_target, jt_eval, points);
    mean_error[k] = time_average(run.P_E).values.back();
  });
  return fit_log_slope(ratios, mean_error);
}

std::pair<double, double> long_time_average(double j_over_delta, double horizon, int s_control, int s_target,
                                            double jt_step) {
  check_ratio(j_over_delta);
  if (!(horizon > 0)) throw std::invalid_argument("horizon must be positive");
  const int points = std::max(3, static_cast<int>(std::ceil(horizon / jt_step)) + 1);
  const auto run = run_cnot(j_over_delta, s_control, s_target, horizon, points);
  return {time_average(run.P_S).values.back(), time_average(run.P_E).values.back()};
}

namespace {

struct ToffoliSites {
  Site c1_in, c1_mid, c1_out;
  Site t_in, t_out;
  Site c2_in, c2_mid, c2_out;
  Site s1, s2;  // split bases
};

ToffoliSites toffoli_sites() {
  const Site a = toffoli_test_anchor();
  const int i = a.i, j = a.j;
  return {{i, j - 1}, {i + 1, j}, {i + 2, j + 1}, {i - 1, j - 1}, {i + 2, j + 2},
          {i - 1, j}, {i, j + 1}, {i + 1, j + 2}, {i, j},         {i + 1, j + 1}};
}

Site with_split(Site s, int k) {
  s.split = k;
  return s;
}

}  // namespace

EffectiveOperator toffoli_effective(const StateSpace& space, bool prune_backward_hop) {
  LatticeSpec lat = space.lattice();
  if (prune_backward_hop) {
    const auto ts = toffoli_sites();
    std::erase_if(lat.plaquettes, [&](const Plaquette& p) {
      return p.from == with_split(ts.s1, 0) && p.to == with_split(ts.s2, 1);
    });
  }
  const StateSpace sp(lat, space.spin_factored());
  return project_effective(full_hamiltonian(sp, 1.0), sp);
}

ToffoliReport verify_toffoli_truth_table(double j_over_delta, double jt_max, int points) {
  check_ratio(j_over_delta);
  const StateSpace space(build_toffoli_test_lattice(), false);
  const auto ts = toffoli_sites();
  ToffoliReport rep;

  // Effective-Hamiltonian logic between the two split pairs.
  const auto eff = toffoli_effective(space, false);
  const int tc1 = 0, tt = 1, tc2 = 2;
  int found = 0;
  for (std::size_t r = 0; r < eff.basis.size(); ++r) {
    for (decltype(eff.op.matrix)::InnerIterator it(eff.op.matrix, static_cast<Eigen::Index>(r)); it; ++it) {
      const std::size_t to = eff.basis[it.row()], from = eff.basis[it.col()];
      const auto pf = space.positions(from), pt = space.positions(to);
      const Site sf = space.site_at(tt, pf[tt]), st = space.site_at(tt, pt[tt]);
      if (!(sf.base() == ts.s1 && st.base() == ts.s2)) continue;
      const auto wf = space.spin_word(from), wt = space.spin_word(to);
      const int s1 = space.spin_of(wf, tc1), s2 = space.spin_of(wf, tc2), s = space.spin_of(wf, tt);
      const bool ok = sf.split == s1 && st.split == s2 && space.spin_of(wt, tc1) == s1 &&
                      space.spin_of(wt, tc2) == s2 && space.spin_of(wt, tt) == (s ^ (s1 & s2)) &&
                      std::abs(it.value() + 1.0) < 1e-12;
      if (!ok) ++rep.effective_mismatches;
      ++found;
    }
  }
  // Every (s1, s2, s) needs its forward transition.
  if (found != 8) ++rep.effective_mismatches;
  rep.effective_logic_ok = rep.effective_mismatches == 0;

  const double J = j_over_delta;
  const auto H = full_hamiltonian(space, J);
  const auto jt = time_grid(0.0, jt_max, points);
  const auto t_int = scaled(jt, 1.0 / J);
  const std::vector<Site> start = {ts.c1_in, ts.t_in, ts.c2_in};
  const std::vector<Site> finish = {ts.c1_out, ts.t_out, ts.c2_out};
  rep.cases.resize(8);
  parallel_for(8, [&](std::size_t k) {
    ToffoliCase c;
    c.s1 = static_cast<int>((k >> 2) & 1);
    c.s2 = static_cast<int>((k >> 1) & 1);
    c.s = static_cast<int>(k & 1);
    const auto psi0 = basis_state(space, start, {c.s1, c.s, c.s2});
    const auto ok = space.spin_word_of({c.s1, c.s ^ (c.s1 & c.s2), c.s2});
    const auto pr = measure_passage(space, H, psi0, t_int, jt, finish, ok);
    c.peak_success = pr.peak_success;
    c.peak_error = pr.peak_error;
    c.peak_time = pr.peak_time;
    rep.cases[k] = c;
  });
  return rep;
}

BackwardReport check_backward_necessity() {
  const StateSpace space(build_toffoli_test_lattice(), false);
  const auto full = toffoli_effective(space, false);
  const auto pruned = toffoli_effective(space, true);
  BackwardReport rep;
  if (full.basis != pruned.basis) return rep;
  const auto ts = toffoli_sites();
  // Target on split (i+1,j+1,1) with s1 = 0, s2 = 1, controls at the middle
  // sites. The removed hop carries the target spin unchanged, so it is one
  // element per target spin value.
  auto sub = [&](std::size_t ord) {
    auto it = std::lower_bound(full.basis.begin(), full.basis.end(), ord);
    if (it == full.basis.end() || *it != ord) throw std::logic_error("configuration is not a valid string");
    return static_cast<Eigen::Index>(it - full.basis.begin());
  };
  std::vector<std::pair<Eigen::Index, Eigen::Index>> removed;
  bool elements_ok = true;
  for (int s = 0; s < 2; ++s) {
    const auto at_s2 =
        space.index_of_sites({ts.c1_mid, with_split(ts.s2, 1), ts.c2_mid}, space.spin_word_of({0, s, 1}));
    const auto at_s1 =
        space.index_of_sites({ts.c1_mid, with_split(ts.s1, 0), ts.c2_mid}, space.spin_word_of({0, s, 1}));
    const auto r = sub(at_s1), c = sub(at_s2);
    removed.emplace_back(r, c);
    const double f = full.op.element(r, c), p = pruned.op.element(r, c);
    if (s == 0) {
      rep.full_element = f;
      rep.pruned_element = p;
    }
    elements_ok = elements_ok && f == -1.0 && p == 0.0;
  }
  const Eigen::MatrixXd diff = full.op.dense() - pruned.op.dense();
  for (Eigen::Index a = 0; a < diff.rows(); ++a) {
    for (Eigen::Index b = 0; b < diff.cols(); ++b) {
      const bool skip = std::any_of(removed.begin(), removed.end(), [&](const auto& rc) {
        return (a == rc.first && b == rc.second) || (a == rc.second && b == rc.first);
      });
      if (skip) continue;
      if (diff(a, b) != 0.0) ++rep.changed_entries;
      rep.max_other_change = std::max(rep.max_other_change, std::abs(diff(a, b)));
    }
  }
  rep.passed = elements_ok && rep.changed_entries == 0;
  return rep;
}

}  // namespace hqc
