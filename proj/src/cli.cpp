#include "hqc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "hqc/coupler.hpp"
#include "hqc/dynamics.hpp"
#include "hqc/errors.hpp"
#include "hqc/gadgets.hpp"
#include "hqc/gatesynth.hpp"
#include "hqc/io.hpp"
#include "hqc/walk.hpp"

namespace hqc::cli {

namespace detail {
extern const char* const kExpectations;
extern const char* const kBuildId;
}  // namespace detail

using nlohmann::json;

std::string to_string(ParamType t) {
  switch (t) {
    case ParamType::integer: return "int";
    case ParamType::real: return "real";
    case ParamType::boolean: return "bool";
    case ParamType::text: return "text";
    case ParamType::integer_list: return "int,...";
    case ParamType::real_list: return "real,...";
    case ParamType::object: return "json";
  }
  return "?";
}

std::string ParamInfo::flag() const {
  std::string f = name;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

const char* build_id() { return detail::kBuildId; }

namespace {

// ---- shared helpers -------------------------------------------------------

double real(const json& p, const char* key) { return p.at(key).get<double>(); }
int integer(const json& p, const char* key) { return p.at(key).get<int>(); }

void add_column(CsvTable& t, const std::string& name, const std::vector<double>& values) {
  if (t.rows.empty()) t.rows.resize(values.size());
  if (t.rows.size() != values.size()) throw InternalError("column length mismatch");
  t.header.push_back(name);
  for (std::size_t k = 0; k < values.size(); ++k) t.rows[k].push_back(values[k]);
}

SvgSeries svg_of(const std::string& label, const TimeSeries& s) { return {label, s.times, s.values}; }

double mean_from(const TimeSeries& s, double t0) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (s.times[k] >= t0) {
      sum += s.values[k];
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("averaging window lies beyond the time grid");
  return sum / n;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

CircuitParams circuit_of(const json& p) {
  CircuitParams c = p.at("circuit").get<CircuitParams>();
  c.validate();
  return c;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Everything except the small-junction ratio matches the reference circuit.
bool is_reference_design(const CircuitParams& c) {
  const CircuitParams r = reference_design_params();
  return same(c.E_J1, r.E_J1) && same(c.E_J2, r.E_J2) && same(c.E_J, r.E_J) && c.N_J == r.N_J &&
         same(c.E_L, r.E_L) && same(c.C_J1, r.C_J1) && same(c.C_J2, r.C_J2) && same(c.C_a, r.C_a) &&
         same(c.C_b, r.C_b) && same(c.external_phase(), r.external_phase());
}

json coupling_json(const CouplingResult& r) {
  return {{"alpha", r.alpha},     {"C_c", r.C_c},       {"E_C1", r.E_C1},       {"E_C2", r.E_C2},
          {"J_cap", r.J_cap},     {"J_ind", r.J_ind},   {"J_nonlin", r.J_nonlin}, {"J_hop", r.J_hop},
          {"Delta", r.Delta},     {"omega1", r.omega1}, {"omega2", r.omega2},   {"delta1", r.delta1},
          {"delta2", r.delta2},   {"Omega1", r.Omega1}, {"Omega2", r.Omega2}};
}

CircuitParams at_design_point(const json& p, json& results) {
  CircuitParams c = circuit_of(p);
  results["reference_design"] = is_reference_design(c);
  if (p.at("at_cancellation").get<bool>()) {
    c.alpha = find_cancellation(c).alpha;
    results["alpha_star"] = c.alpha;
  }
  return c;
}

// ---- experiments ----------------------------------------------------------

Artifacts run_disconnect(const json& p) {
  const auto Ns = p.at("N").get<std::vector<int>>();
  if (Ns.empty()) throw std::invalid_argument("N needs at least one value");
  const double ratio = real(p, "j_over_delta");
  const auto jt = time_grid(0.0, real(p, "jt_max"), integer(p, "points"));
  Artifacts a;
  CsvTable t;
  add_column(t, "Jt", jt);
  std::vector<SvgSeries> plot;
  std::vector<double> xs, ys;
  json steady = json::object();
  for (int N : Ns) {
    const auto d = run_rotated(N, ratio, jt);
    const auto avg = time_average(d.disconnect);
    const std::string tag = "N" + std::to_string(N);
    add_column(t, "P_D_" + tag, d.disconnect.values);
    add_column(t, "Pbar_D_" + tag, avg.values);
    plot.push_back(svg_of("mean P_D, " + tag, avg));
    steady[std::to_string(N)] = avg.values.back();
    xs.push_back(N);
    ys.push_back(avg.values.back());
  }
  a.results["steady_state"] = steady;
  if (xs.size() >= 2) {
    const auto f = fit_line(xs, ys);
    a.results["fit"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
  }
  a.csv = t.str();
  a.svg = svg_line_plot(plot, "Jt", "time-averaged disconnect probability", "disconnect");
  return a;
}

Artifacts run_wavefront(const json& p) {
  const int N = integer(p, "N");
  const auto jt = time_grid(0.0, real(p, "jt_max"), integer(p, "points"));
  const double start = real(p, "fit_start");
  const auto d = run_rotated(N, real(p, "j_over_delta"), jt);
  std::vector<double> x, y;
  for (std::size_t k = 0; k < jt.size(); ++k) {
    if (jt[k] >= start) {
      x.push_back(jt[k]);
      y.push_back(d.position.values[k]);
    }
  }
  if (x.size() < 2) throw std::invalid_argument("fit window holds fewer than two samples");
  const auto f = fit_line(x, y);
  Artifacts a;
  a.results = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}};
  CsvTable t;
  add_column(t, "Jt", jt);
  add_column(t, "R", d.position.values);
  add_column(t, "P_D", d.disconnect.values);
  a.csv = t.str();
  a.svg = svg_line_plot({svg_of("<R>", d.position)}, "Jt", "mean row position", "wavefront");
  return a;
}

Artifacts run_cnot_experiment(const json& p) {
  const double ratio = real(p, "j_over_delta");
  const int sc = integer(p, "control"), st = integer(p, "target");
  const auto snap = run_cnot(ratio, sc, st, real(p, "jt_max"), integer(p, "points"));
  Artifacts a;
  a.results = {{"peak_time", snap.peak_time}, {"peak_success", snap.peak_success}, {"peak_error", snap.peak_error}};

  const auto ratios = p.at("exponent_ratios").get<std::vector<double>>();
  const auto evals = p.at("exponent_jt").get<std::vector<double>>();
  if (!ratios.empty() && !evals.empty()) {
    const double ref_jt = real(p, "exponent_reference");
    json slopes = json::array();
    std::optional<double> ref;
    std::vector<double> all;
    for (double jt_eval : evals) {
      const auto fit = fit_error_exponent(ratios, jt_eval, sc, st);
      slopes.push_back({{"Jt", jt_eval}, {"slope", fit.slope}, {"mean_errors", fit.mean_errors}});
      for (const auto& w : fit.warnings) a.warnings.push_back(w);
      if (std::abs(jt_eval - ref_jt) < 1e-12) ref = fit.slope;
      all.push_back(fit.slope);
    }
    if (!ref) throw ConfigError("exponent_reference must be one of exponent_jt");
    double shift = 0.0;
    for (double s : all) shift = std::max(shift, std::abs(s - *ref));
    a.results["exponent"] = {{"ratios", ratios}, {"fits", slopes}, {"slope_reference", *ref}, {"max_shift", shift}};
  }

  const double horizon = real(p, "horizon");
  if (horizon > 0) {
    const auto [ps, pe] = long_time_average(ratio, horizon, sc, st, real(p, "horizon_step"));
    a.results["long_time"] = {
        {"P_S", ps}, {"P_E", pe}, {"asymmetry", std::abs(ps - pe) / std::max(ps, pe)}, {"horizon", horizon}};
  }

  CsvTable t;
  add_column(t, "Jt", snap.P_S.times);
  add_column(t, "P_S", snap.P_S.values);
  add_column(t, "P_E", snap.P_E.values);
  a.csv = t.str();
  a.svg = svg_line_plot({svg_of("P_S", snap.P_S), svg_of("P_E", snap.P_E)}, "Jt", "probability", "CNOT passage");
  return a;
}

Artifacts run_toffoli(const json& p) {
  const auto rep = verify_toffoli_truth_table(real(p, "j_over_delta"), real(p, "jt_max"), integer(p, "points"));
  const auto back = check_backward_necessity();
  Artifacts a;
  CsvTable t;
  t.header = {"control1", "control2", "target", "peak_time", "peak_success", "peak_error"};
  double worst = 0.0;
  for (const auto& c : rep.cases) {
    t.rows.push_back({double(c.s1), double(c.s2), double(c.s), c.peak_time, c.peak_success, c.peak_error});
    worst = std::max(worst, c.peak_error / c.peak_success);
  }
  a.results = {{"effective_logic_ok", rep.effective_logic_ok},
               {"effective_mismatches", rep.effective_mismatches},
               {"max_error_ratio", worst},
               {"backward_passed", back.passed},
               {"backward",
                {{"full_element", back.full_element},
                 {"pruned_element", back.pruned_element},
                 {"changed_entries", back.changed_entries},
                 {"max_other_change", back.max_other_change}}}};
  a.csv = t.str();
  return a;
}

Artifacts run_disorder(const json& p) {
  const int N = integer(p, "N");
  const double ratio = real(p, "j_over_delta");
  const auto jt = time_grid(0.0, real(p, "jt_max"), integer(p, "points"));
  DisorderSpec spec;
  const auto target = p.at("target").get<std::string>();
  if (target == "onsite") {
    spec.target = DisorderTarget::onsite;
  } else if (target == "hopping") {
    spec.target = DisorderTarget::hopping;
    // Hopping draws scale J, so the clean limit is a unit mean.
  } else {
    throw ConfigError("target must be 'onsite' or 'hopping'");
  }
  spec.mean = real(p, "mean");
  spec.sigma = real(p, "sigma");
  spec.seed = p.at("seed").get<std::uint64_t>();
  spec.runs = integer(p, "runs");
  spec.validate();

  const auto ens = disorder_position_ensemble(N, ratio, spec, jt);
  const auto clean = run_rotated(N, ratio, jt).position;
  const double level = real(p, "level"), late = real(p, "late_from");
  const auto cross = first_crossing(ens, level);
  const auto cross_clean = first_crossing(clean, level);
  Artifacts a;
  a.results = {{"crossing", opt(cross)},
               {"clean_crossing", opt(cross_clean)},
               {"late_mean", mean_from(ens, late)},
               {"clean_late_mean", mean_from(clean, late)}};
  if (cross && cross_clean) a.results["crossing_relative_shift"] = std::abs(*cross - *cross_clean) / *cross_clean;
  if (!cross) a.warnings.push_back("ensemble mean never reaches the level");

  CsvTable t;
  add_column(t, "Jt", jt);
  add_column(t, "R_mean", ens.values);
  add_column(t, "R_std", ens.std ? *ens.std : std::vector<double>(jt.size(), 0.0));
  add_column(t, "R_clean", clean.values);
  a.csv = t.str();
  a.svg = svg_line_plot({svg_of("ensemble", ens), svg_of("clean", clean)}, "Jt", "mean row position", "disorder");
  return a;
}

Artifacts run_walk(const json& p) {
  const int L = integer(p, "L");
  const auto jt = time_grid(0.0, real(p, "jt_max"), integer(p, "points"));
  const auto s = success_probability(L, jt);
  const auto it = std::max_element(s.values.begin(), s.values.end());
  Artifacts a;
  a.results = {{"max_probability", *it}, {"time_of_max", s.times[static_cast<std::size_t>(it - s.values.begin())]}};
  a.csv = to_table(s, "P_L").str();
  a.svg = svg_line_plot({svg_of("P_L", s)}, "Jt", "end-site probability", "uniform walk");
  return a;
}

Artifacts run_peres(const json& p) {
  const int L = integer(p, "L");
  const WalkSpec w = peres_couplings(L);
  const double f = transfer_probability(w, std::numbers::pi);
  Artifacts a;
  a.results = {{"fidelity", f}, {"infidelity", 1.0 - f}};
  CsvTable t;
  t.header = {"k", "J_k"};
  for (std::size_t k = 0; k < w.couplings.size(); ++k) t.rows.push_back({double(k + 1), w.couplings[k]});
  a.csv = t.str();
  SvgSeries curve{"end-site probability", {}, {}};
  for (int k = 0; k <= 100; ++k) {
    const double tk = std::numbers::pi * k / 100.0;
    curve.x.push_back(tk);
    curve.y.push_back(transfer_probability(w, tk));
  }
  a.svg = svg_line_plot({curve}, "Jt", "end-site probability", "engineered couplings");
  return a;
}

Artifacts run_lindblad(const json& p) {
  const double gamma = real(p, "gamma");
  const auto Ls = p.at("L").get<std::vector<int>>();
  if (Ls.empty()) throw std::invalid_argument("L needs at least one value");
  const auto jt = time_grid(0.0, real(p, "jt_max"), integer(p, "points"));
  Artifacts a;
  CsvTable t;
  add_column(t, "Jt", jt);
  std::vector<SvgSeries> plot;
  json rates = json::object();
  double lo = INFINITY, hi = -INFINITY, worst = 0.0;
  for (int L : Ls) {
    const auto s = lindblad_loss(LossSpec{gamma, L}, jt);
    const double r = fit_decay_rate(s);
    add_column(t, "survival_L" + std::to_string(L), s.values);
    plot.push_back(svg_of("L=" + std::to_string(L), s));
    rates[std::to_string(L)] = r;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    worst = std::max(worst, std::abs(r - gamma) / gamma);
  }
  a.results = {{"rates", rates}, {"max_rate_relative_error", worst}, {"rate_spread", (hi - lo) / gamma}};
  a.csv = t.str();
  a.svg = svg_line_plot(plot, "Jt", "population on the line", "loss");
  return a;
}

Artifacts run_snake(const json& p) {
  const int N = integer(p, "N"), M = integer(p, "M");
  if (N < 1 || M < 2) throw std::invalid_argument("snake needs N >= 1 and M >= 2");
  Artifacts a;
  CsvTable t;
  t.header = {"N", "M", "expected_length", "walk_length", "max_deviation", "passed"};
  bool all = true;
  for (int n = 1; n <= N; ++n) {
    for (int m = 2; m <= M; ++m) {
      const auto r = snake_equivalence(n, m);
      t.rows.push_back({double(n), double(m), double(r.expected_length), double(r.walk_length), r.max_deviation,
                        r.passed ? 1.0 : 0.0});
      all = all && r.passed;
    }
  }
  a.results = {{"passed", all}, {"cases", t.rows.size()}};
  a.csv = t.str();
  return a;
}

Artifacts run_fast_cnot(const json& p) {
  const auto rep =
      fast_cnot_check(real(p, "j_over_delta"), p.at("control_above").get<bool>(), real(p, "jt_max"), integer(p, "points"));
  Artifacts a;
  a.results = {{"truth_table_ok", rep.truth_table_ok},
               {"base_length", rep.base_length},
               {"effective_length", rep.effective_length},
               {"added_sites", rep.effective_length < 0 ? json(nullptr) : json(rep.effective_length - rep.base_length)}};
  CsvTable t;
  t.header = {"control", "target", "peak_time", "peak_success", "peak_error"};
  for (const auto& c : rep.cases) {
    t.rows.push_back({double(c.control_spin), double(c.target_spin), c.passage.peak_time, c.passage.peak_success,
                      c.passage.peak_error});
  }
  a.csv = t.str();
  return a;
}

Artifacts run_coupler_sweep(const json& p) {
  Artifacts a;
  const CircuitParams c = circuit_of(p);
  a.results["reference_design"] = is_reference_design(c);
  const auto rows = sweep_alpha(c, real(p, "alpha_min"), real(p, "alpha_max"), integer(p, "samples"));
  CsvTable t;
  t.header = {"alpha", "J_cap", "J_ind", "J_nonlin", "J_hop", "Delta", "delta1", "delta2"};
  SvgSeries jc{"J_cap", {}, {}}, ji{"J_ind", {}, {}}, jn{"J_nonlin", {}, {}}, jh{"J_hop", {}, {}};
  int unphysical = 0;
  for (const auto& r : rows) {
    if (!r.physical) {
      ++unphysical;
      t.rows.push_back({r.alpha, NAN, NAN, NAN, NAN, NAN, NAN, NAN});
      continue;
    }
    const auto& q = r.result;
    t.rows.push_back({r.alpha, q.J_cap, q.J_ind, q.J_nonlin, q.J_hop, q.Delta, q.delta1, q.delta2});
    for (auto* s : {&jc, &ji, &jn, &jh}) s->x.push_back(r.alpha);
    jc.y.push_back(q.J_cap);
    ji.y.push_back(q.J_ind);
    jn.y.push_back(q.J_nonlin);
    jh.y.push_back(q.J_hop);
  }
  if (unphysical) a.warnings.push_back(std::to_string(unphysical) + " sweep points have a negative inductive energy");
  a.csv = t.str();
  a.svg = svg_line_plot({jc, ji, jn, jh}, "alpha", "coupling (charging-energy units)", "coupler sweep");

  try {
    const auto star = find_cancellation(c);
    const double mhz = real(p, "ec_bare_mhz");
    a.results["alpha_star"] = star.alpha;
    a.results["Delta_at_alpha_star"] = star.result.Delta;
    a.results["Delta_mhz"] = to_mhz(star.result.Delta, mhz);
    a.results["C_c_over_C_J"] = star.result.C_c / c.C_J1;
    a.results["design_point"] = coupling_json(star.result);
    for (const auto& w : star.result.warnings) a.warnings.push_back(w);
    CircuitParams at = c;
    at.alpha = star.alpha;
    const auto pot = potential_minimum_check(at);
    a.results["potential"] = {{"origin_is_global", pot.origin_is_global},
                              {"origin_is_local", pot.origin_is_local},
                              {"metastable", pot.metastable},
                              {"min_phi1", pot.min_phi1},
                              {"min_phi2", pot.min_phi2},
                              {"min_value", pot.min_value},
                              {"origin_value", pot.origin_value}};
    for (const auto& w : pot.warnings) a.warnings.push_back(w);
  } catch (const NotFound& e) {
    a.warnings.push_back(e.what());
  }
  return a;
}

Artifacts run_coupler_validate(const json& p) {
  Artifacts a;
  const CircuitParams c = at_design_point(p, a.results);
  const auto closed = derive_couplings(c);
  const auto num = numeric_validate(c, integer(p, "n_levels"));
  a.results["alpha"] = c.alpha;
  a.results["Delta_closed"] = closed.Delta;
  a.results["Delta_num"] = num.Delta_num;
  a.results["Delta_refined"] = num.Delta_refined;
  a.results["relative_difference"] = std::abs(num.Delta_num - closed.Delta) / std::abs(closed.Delta);
  a.results["relative_shift"] = num.relative_shift;
  a.results["J_hop"] = closed.J_hop;
  a.results["J_num"] = num.J_num;
  a.results["min_overlap"] = num.min_overlap;
  CsvTable t;
  t.header = {"alpha", "n_levels", "Delta_closed", "Delta_num", "Delta_refined", "J_hop", "J_num",
              "E00", "E10", "E01", "E11"};
  t.rows.push_back({c.alpha, double(num.n_levels), closed.Delta, num.Delta_num, num.Delta_refined, closed.J_hop,
                    num.J_num, num.E00, num.E10, num.E01, num.E11});
  a.csv = t.str();
  return a;
}

Artifacts run_crosstalk(const json& p) {
  Artifacts a;
  const CircuitParams c = at_design_point(p, a.results);
  const auto x = crosstalk_estimate(c);
  a.results["alpha"] = c.alpha;
  a.results["E_13"] = x.E_13;
  a.results["J_xtalk"] = x.J_xtalk;
  a.results["J_xtalk_mhz"] = to_mhz(x.J_xtalk, real(p, "ec_bare_mhz"));
  CsvTable t;
  t.header = {"alpha", "E_13", "E_C_outer", "E_L_outer", "J_xtalk"};
  t.rows.push_back({c.alpha, x.E_13, x.E_C_outer, x.E_L_outer, x.J_xtalk});
  a.csv = t.str();
  return a;
}

Artifacts run_synth_check(const json&) {
  const auto v2 = verify_v_squared();
  const auto cz = verify_cz_from_h_cnot();
  const auto tof = verify_toffoli_synthesis();
  Artifacts a;
  a.results = {{"v_squared_deviation", v2.max_deviation},
               {"cz_deviation", cz.max_deviation},
               {"toffoli_deviation", tof.max_deviation},
               {"passed", v2.passed && cz.passed && tof.passed}};
  std::ostringstream csv;
  csv << "identity,max_deviation,passed\r\n";
  for (const auto* r : {&v2, &cz, &tof}) {
    csv << csv_field(r->detail) << ',' << format_number(r->max_deviation) << ',' << (r->passed ? 1 : 0) << "\r\n";
  }
  a.csv = csv.str();
  return a;
}

// ---- registry -------------------------------------------------------------

ParamInfo P(std::string name, ParamType t, json def, std::string help) {
  return ParamInfo{std::move(name), t, std::move(def), std::move(help)};
}

std::vector<ParamInfo> circuit_params() {
  return {P("params", ParamType::text, "", "circuit JSON file; empty selects the reference design"),
          P("circuit", ParamType::object, json::object(), "inline circuit fields applied over --params")};
}

std::vector<ExperimentInfo> make_registry() {
  using T = ParamType;
  std::vector<ExperimentInfo> r;
  r.push_back({"cnot",
               "CNOT passage snapshot, error exponent over J/Delta and long-time averages",
               {P("j_over_delta", T::real, 0.1, "hopping over attraction for the snapshot"),
                P("control", T::integer, 1, "control spin (0 or 1)"),
                P("target", T::integer, 0, "target spin (0 or 1)"),
                P("jt_max", T::real, 10.0, "snapshot window end"),
                P("points", T::integer, 400, "snapshot samples"),
                P("exponent_ratios", T::real_list, {0.05, 1.0 / 15.0, 0.1, 0.125}, "ratios for the exponent fit"),
                P("exponent_jt", T::real_list, {2.0, 3.0, 4.0}, "evaluation times of the averaged error"),
                P("exponent_reference", T::real, 3.0, "evaluation time reported as the exponent"),
                P("horizon", T::real, 500.0, "long-time averaging window; 0 skips it"),
                P("horizon_step", T::real, 0.05, "sample spacing over the long window")},
               run_cnot_experiment});
  {
    auto ps = circuit_params();
    ps.push_back(P("alpha_min", T::real, 0.02, "sweep start"));
    ps.push_back(P("alpha_max", T::real, 0.07, "sweep end"));
    ps.push_back(P("samples", T::integer, 101, "sweep samples"));
    ps.push_back(P("ec_bare_mhz", T::real, 200.0, "bare charging energy in MHz"));
    r.push_back({"coupler-sweep", "closed-form couplings against the small-junction ratio, plus the cancellation point",
                 ps, run_coupler_sweep});
  }
  {
    auto ps = circuit_params();
    ps.push_back(P("at_cancellation", T::boolean, true, "evaluate at the hopping cancellation point"));
    ps.push_back(P("n_levels", T::integer, 10, "oscillator levels per mode"));
    r.push_back({"coupler-validate", "two-mode diagonalization against the closed-form cross-Kerr", ps,
                 run_coupler_validate});
  }
  {
    auto ps = circuit_params();
    ps.push_back(P("at_cancellation", T::boolean, true, "evaluate at the hopping cancellation point"));
    ps.push_back(P("ec_bare_mhz", T::real, 200.0, "bare charging energy in MHz"));
    r.push_back({"crosstalk", "outer-node flip-flop in a three-transmon chain", ps, run_crosstalk});
  }
  r.push_back({"disconnect",
               "disconnect probability on the rotated lattice and its steady-state trend in N",
               {P("N", T::integer_list, {3, 4, 5, 6}, "lattice sizes"),
                P("j_over_delta", T::real, 0.1, "hopping over attraction"),
                P("jt_max", T::real, 10.0, "window end"),
                P("points", T::integer, 401, "samples")},
               run_disconnect});
  r.push_back({"disorder",
               "ensemble-averaged central position with random hopping or on-site energies",
               {P("N", T::integer, 4, "lattice size"),
                P("j_over_delta", T::real, 0.1, "hopping over attraction"),
                P("target", T::text, "onsite", "'onsite' or 'hopping'"),
                P("mean", T::real, 0.0, "distribution mean in units of J"),
                P("sigma", T::real, 0.1, "distribution width in units of J"),
                P("seed", T::integer, 1, "random seed"),
                P("runs", T::integer, 50, "ensemble members"),
                P("jt_max", T::real, 20.0, "window end"),
                P("points", T::integer, 401, "samples"),
                P("level", T::real, 2.3, "position level for the first-crossing time"),
                P("late_from", T::real, 10.0, "start of the late-time average")},
               run_disorder});
  r.push_back({"fast-cnot",
               "snake lattice with a one-site CNOT gadget: truth table and walk length",
               {P("j_over_delta", T::real, 0.1, "hopping over attraction"),
                P("control_above", T::boolean, true, "control row above the target row"),
                P("jt_max", T::real, 12.0, "window end"),
                P("points", T::integer, 400, "samples")},
               run_fast_cnot});
  r.push_back({"lindblad",
               "survival on a lossy line and its fitted decay rate",
               {P("gamma", T::real, 0.2, "loss rate in units of J"),
                P("L", T::integer_list, {4, 16}, "line lengths"),
                P("jt_max", T::real, 10.0, "window end"),
                P("points", T::integer, 201, "samples")},
               run_lindblad});
  r.push_back({"peres",
               "engineered couplings and the end-to-end transfer fidelity at Jt = pi",
               {P("L", T::integer, 16, "line length")},
               run_peres});
  r.push_back({"snake",
               "snake-lattice projection against a uniform walk, for every size up to N x M",
               {P("N", T::integer, 4, "largest row count"), P("M", T::integer, 4, "largest column count")},
               run_snake});
  r.push_back({"synth-check", "gate identities and the ancilla-assisted Toffoli circuit", {}, run_synth_check});
  r.push_back({"toffoli",
               "Toffoli gadget: effective logic, full-dynamics truth table, backward-hop check",
               {P("j_over_delta", T::real, 0.05, "hopping over attraction"),
                P("jt_max", T::real, 20.0, "window end"),
                P("points", T::integer, 400, "samples")},
               run_toffoli});
  r.push_back({"walk",
               "uniform line: end-site probability from the mode sum",
               {P("L", T::integer, 1000, "line length"),
                P("jt_max", T::real, 1500.0, "window end"),
                P("points", T::integer, 30001, "samples")},
               run_walk});
  r.push_back({"wavefront",
               "central position on the rotated lattice and its early-time slope",
               {P("N", T::integer, 6, "lattice size"),
                P("j_over_delta", T::real, 0.02, "hopping over attraction"),
                P("jt_max", T::real, 3.0, "window end"),
                P("points", T::integer, 61, "samples"),
                P("fit_start", T::real, 0.5, "start of the fit window")},
               run_wavefront});
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return r;
}

// ---- parameter handling ---------------------------------------------------

bool integral(const json& v) {
  if (v.is_number_integer()) return true;
  if (!v.is_number_float()) return false;
  const double d = v.get<double>();
  return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
}

json normalize(const ParamInfo& p, const json& v) {
  auto bad = [&]() -> ConfigError {
    return ConfigError("parameter '" + p.name + "' expects " + to_string(p.type) + ", got " + v.dump());
  };
  auto as_int = [&](const json& x) -> json {
    if (!integral(x)) throw bad();
    if (x.is_number_unsigned()) return x;
    return json(static_cast<std::int64_t>(x.get<double>()));
  };
  auto as_real = [&](const json& x) -> json {
    if (!x.is_number()) throw bad();
    return json(x.get<double>());
  };
  switch (p.type) {
    case ParamType::integer: return as_int(v);
    case ParamType::real: return as_real(v);
    case ParamType::boolean:
      if (!v.is_boolean()) throw bad();
      return v;
    case ParamType::text:
      if (!v.is_string()) throw bad();
      return v;
    case ParamType::object:
      if (v.is_null()) return json::object();
      if (!v.is_object()) throw bad();
      return v;
    case ParamType::integer_list:
    case ParamType::real_list: {
      const json items = v.is_array() ? v : json::array({v});
      json out = json::array();
      for (const auto& x : items) out.push_back(p.type == ParamType::integer_list ? as_int(x) : as_real(x));
      return out;
    }
  }
  throw InternalError("unhandled parameter type");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// File fields first, inline fields over them; a capacitance given one way
// replaces the other spelling from the file.
json resolve_circuit(const std::string& file, const json& inline_fields) {
  json merged = file.empty() ? json::object() : read_json_file(file);
  if (!merged.is_object()) throw ConfigError("circuit file must hold a JSON object");
  if (inline_fields.contains("C_a")) merged.erase("E_Ca");
  if (inline_fields.contains("E_Ca")) merged.erase("C_a");
  merged.update(inline_fields);
  static const std::vector<std::string> known = {"E_J1", "E_J2", "E_J", "alpha", "N_J", "E_L", "C_J1",
                                                 "C_J2", "C_a",  "E_Ca", "C_b", "phi_ext"};
  for (const auto& [k, v] : merged.items()) {
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown circuit field '" + k + "'");
    if (!v.is_number()) throw ConfigError("circuit field '" + k + "' must be a number");
  }
  CircuitParams c;
  try {
    c = merged.get<CircuitParams>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  c.validate();
  return c;
}

bool json_matches(const json& want, const json& have) {
  if (want.is_number() && have.is_number()) {
    const double a = want.get<double>(), b = have.get<double>();
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  }
  if (want.is_array()) {
    if (!have.is_array() || have.size() != want.size()) return false;
    for (std::size_t k = 0; k < want.size(); ++k) {
      if (!json_matches(want[k], have[k])) return false;
    }
    return true;
  }
  if (want.is_object()) {
    if (!have.is_object()) return false;
    for (const auto& [k, v] : want.items()) {
      if (!have.contains(k) || !json_matches(v, have.at(k))) return false;
    }
    return true;
  }
  return want == have;
}

bool check_bounds(const json& entry, const json& value) {
  if (entry.contains("equals")) return json_matches(entry.at("equals"), value);
  if (!value.is_number()) return false;
  const double v = value.get<double>();
  if (!std::isfinite(v)) return false;
  if (entry.contains("min") && !(v >= entry.at("min").get<double>())) return false;
  if (entry.contains("max") && !(v <= entry.at("max").get<double>())) return false;
  if (entry.contains("above") && !(v > entry.at("above").get<double>())) return false;
  if (entry.contains("below") && !(v < entry.at("below").get<double>())) return false;
  return true;
}

}  // namespace

// ---- public API -----------------------------------------------------------

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> registry = make_registry();
  return registry;
}

const ExperimentInfo* find_experiment(const std::string& name) {
  for (const auto& e : list_experiments()) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::string registered_names() {
  std::string s;
  for (const auto& e : list_experiments()) s += (s.empty() ? "" : ", ") + e.name;
  return s;
}

std::string listing() {
  std::ostringstream out;
  for (const auto& e : list_experiments()) {
    out << e.name << "\n  " << e.description << "\n";
    if (e.params.empty()) out << "  (no parameters)\n";
    for (const auto& p : e.params) {
      out << "  " << p.flag() << " <" << to_string(p.type) << ">  " << p.help;
      if (p.required()) {
        out << " (required)";
      } else {
        out << " [default " << p.default_value.dump() << "]";
      }
      out << "\n";
    }
  }
  return out.str();
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k != "experiment" && k != "parameters" && k != "output") throw ConfigError("unknown config key '" + k + "'");
  }
  if (!j.contains("experiment") || !j.at("experiment").is_string()) {
    throw ConfigError("config needs a string 'experiment'");
  }
  ExperimentConfig c;
  c.experiment = j.at("experiment").get<std::string>();
  if (j.contains("parameters")) {
    if (!j.at("parameters").is_object()) throw ConfigError("'parameters' must be an object");
    c.parameters = j.at("parameters");
  }
  if (j.contains("output")) {
    if (!j.at("output").is_string()) throw ConfigError("'output' must be a string");
    c.output = j.at("output").get<std::string>();
  } else {
    c.output = std::filesystem::path("hqc-out") / c.experiment;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

json resolve_parameters(const ExperimentInfo& info, const json& given) {
  if (!given.is_object()) throw ConfigError("parameters must be a JSON object");
  for (const auto& [k, v] : given.items()) {
    const bool known = std::any_of(info.params.begin(), info.params.end(), [&](const auto& p) { return p.name == k; });
    if (!known) throw ConfigError("experiment '" + info.name + "' has no parameter '" + k + "'");
  }
  json out = json::object();
  for (const auto& p : info.params) {
    if (given.contains(p.name)) {
      out[p.name] = normalize(p, given.at(p.name));
    } else if (p.required()) {
      throw ConfigError("experiment '" + info.name + "' needs parameter '" + p.name + "'");
    } else {
      out[p.name] = normalize(p, p.default_value);
    }
  }
  if (out.contains("circuit")) {
    out["circuit"] = resolve_circuit(out.at("params").get<std::string>(), out.at("circuit"));
  }
  return out;
}

json parse_flag_value(const ParamInfo& p, const std::vector<std::string>& text) {
  auto bad = [&](const std::string& s) {
    return ConfigError("option " + p.flag() + " expects " + to_string(p.type) + ", got '" + s + "'");
  };
  auto number = [&](const std::string& s) -> json {
    try {
      const json v = json::parse(s);
      if (!v.is_number()) throw bad(s);
      return v;
    } catch (const json::parse_error&) {
      throw bad(s);
    }
  };
  if (p.type == ParamType::integer_list || p.type == ParamType::real_list) {
    json arr = json::array();
    for (const auto& s : text) arr.push_back(number(s));
    return normalize(p, arr);
  }
  if (text.size() != 1) throw ConfigError("option " + p.flag() + " takes one value");
  const std::string& s = text.front();
  switch (p.type) {
    case ParamType::integer:
    case ParamType::real: return normalize(p, number(s));
    case ParamType::boolean:
      if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
      if (s == "false" || s == "0" || s == "no" || s == "off") return false;
      throw bad(s);
    case ParamType::text: return s;
    case ParamType::object:
      try {
        return normalize(p, json::parse(s));
      } catch (const json::parse_error&) {
        throw bad(s);
      }
    default: break;
  }
  throw InternalError("unhandled parameter type");
}

const json& builtin_expectations() {
  static const json table = json::parse(detail::kExpectations);
  return table;
}

std::vector<Check> evaluate_expectations(const json& table, const std::string& experiment, const json& context,
                                         const json& results) {
  std::vector<Check> out;
  if (!table.contains(experiment)) return out;
  for (const auto& entry : table.at(experiment)) {
    if (entry.contains("when") && !json_matches(entry.at("when"), context)) continue;
    Check c;
    c.quantity = entry.at("quantity").get<std::string>();
    c.bounds = json::object();
    for (const char* k : {"min", "max", "above", "below", "equals"}) {
      if (entry.contains(k)) c.bounds[k] = entry.at(k);
    }
    if (entry.contains("note")) c.note = entry.at("note").get<std::string>();
    const json::json_pointer ptr("/" + c.quantity);
    c.value = results.contains(ptr) ? results.at(ptr) : json(nullptr);
    c.passed = !c.value.is_null() && check_bounds(entry, c.value);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Check> evaluate_expectations(const std::string& experiment, const json& context, const json& results) {
  return evaluate_expectations(builtin_expectations(), experiment, context, results);
}

int run(const ExperimentConfig& config, const RunOptions& options) {
  auto log = [&](const std::string& s) {
    if (options.log) *options.log << s << '\n';
  };
  try {
    const ExperimentInfo* info = find_experiment(config.experiment);
    if (!info) {
      throw ConfigError("unknown experiment '" + config.experiment + "'; registered: " + registered_names());
    }
    const json params = resolve_parameters(*info, config.parameters);
    log("running " + info->name);
    Artifacts a = info->run(params);

    json context = params;
    for (const auto& [k, v] : a.results.items()) {
      if (!context.contains(k)) context[k] = v;
    }
    const auto checks = evaluate_expectations(info->name, context, a.results);
    bool passed = true;
    json jchecks = json::array();
    for (const auto& c : checks) {
      passed = passed && c.passed;
      json jc = {{"quantity", c.quantity}, {"value", c.value}, {"bounds", c.bounds}, {"passed", c.passed}};
      if (!c.note.empty()) jc["note"] = c.note;
      jchecks.push_back(jc);
      log(std::string(c.passed ? "PASS " : "FAIL ") + c.quantity + " = " + c.value.dump() + " " + c.bounds.dump());
    }
    for (const auto& w : a.warnings) log("warning: " + w);
    const json summary = {{"experiment", info->name}, {"build_id", build_id()}, {"parameters", params},
                          {"results", a.results},     {"warnings", a.warnings}, {"checks", jchecks},
                          {"passed", passed}};

    std::filesystem::create_directories(config.output);
    write_text_file(config.output / "results.csv", a.csv);
    write_text_file(config.output / "summary.json", summary.dump(2) + "\n");
    if (options.plot && a.svg) write_text_file(config.output / "plot.svg", *a.svg);
    log("wrote " + (config.output / "results.csv").string());
    return options.check && !passed ? exit_check_failed : exit_ok;
  } catch (const ConfigError& e) {
    log(std::string("configuration error: ") + e.what());
    return exit_validation;
  } catch (const UnphysicalDesign& e) {
    log(std::string("unphysical design: ") + e.what());
    return exit_validation;
  } catch (const TooLargeError& e) {
    log(std::string("too large: ") + e.what());
    return exit_validation;
  } catch (const ConflictError& e) {
    log(std::string("lattice conflict: ") + e.what());
    return exit_validation;
  } catch (const std::invalid_argument& e) {
    log(std::string("invalid input: ") + e.what());
    return exit_validation;
  } catch (const json::exception& e) {
    log(std::string("invalid input: ") + e.what());
    return exit_validation;
  } catch (const NumericFailure& e) {
    log(std::string("numeric failure: ") + e.what());
    return exit_numeric;
  } catch (const NotFound& e) {
    log(std::string("not found: ") + e.what());
    return exit_numeric;
  } catch (const std::exception& e) {
    log(std::string("error: ") + e.what());
    return exit_numeric;
  }
}

int main_entry(int argc, char** argv) {
  if (argc >= 2) {
    const std::string first = argv[1];
    if (!first.empty() && first[0] != '-' && first != "list" && first != "run" && !find_experiment(first)) {
      std::cerr << "unknown experiment '" << first << "'; registered: " << registered_names() << "\n";
      return exit_validation;
    }
  }

  CLI::App app{"hqc: lattice gadget, quantum walk and coupler experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print registered experiments and their parameters");

  std::string config_path, run_output;
  bool run_check = false, run_no_plot = false;
  auto* runner = app.add_subcommand("run", "run an experiment described by a JSON config file");
  runner->add_option("config,--config", config_path, "config file")->required();
  runner->add_option("-o,--output", run_output, "output directory (overrides the config)");
  runner->add_flag("--check", run_check, "exit 1 when a built-in expectation fails");
  runner->add_flag("--no-plot", run_no_plot, "skip plot.svg");

  struct Slot {
    const ParamInfo* param;
    std::vector<std::string> text;
    CLI::Option* option = nullptr;
  };
  struct Sub {
    const ExperimentInfo* info;
    CLI::App* app;
    std::map<std::string, Slot> slots;
    std::string output;
    bool check = false, no_plot = false;
  };
  std::map<std::string, Sub> subs;
  for (const auto& e : list_experiments()) {
    Sub& s = subs[e.name];
    s.info = &e;
    s.app = app.add_subcommand(e.name, e.description);
    for (const auto& p : e.params) {
      Slot& slot = s.slots[p.name];
      slot.param = &p;
      std::string help = p.help + " [" + to_string(p.type) + "]";
      slot.option = s.app->add_option(p.flag(), slot.text, help);
      if (p.type == ParamType::integer_list || p.type == ParamType::real_list) {
        slot.option->delimiter(',')->allow_extra_args();
      } else {
        slot.option->expected(1);
      }
    }
    s.app->add_option("-o,--output", s.output, "output directory [default hqc-out/" + e.name + "]");
    s.app->add_flag("--check", s.check, "exit 1 when a built-in expectation fails");
    s.app->add_flag("--no-plot", s.no_plot, "skip plot.svg");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_validation;
  }

  RunOptions options;
  options.log = &std::cerr;
  if (list->parsed()) {
    std::cout << listing();
    return exit_ok;
  }
  if (runner->parsed()) {
    ExperimentConfig config;
    try {
      config = load_config(config_path);
    } catch (const ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return exit_validation;
    }
    if (!run_output.empty()) config.output = run_output;
    options.check = run_check;
    options.plot = !run_no_plot;
    return run(config, options);
  }
  for (auto& [name, s] : subs) {
    if (!s.app->parsed()) continue;
    ExperimentConfig config;
    config.experiment = name;
    try {
      for (const auto& [pname, slot] : s.slots) {
        if (slot.option->count() > 0) config.parameters[pname] = parse_flag_value(*slot.param, slot.text);
      }
    } catch (const ConfigError& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return exit_validation;
    }
    config.output = s.output.empty() ? std::filesystem::path("hqc-out") / name : std::filesystem::path(s.output);
    options.check = s.check;
    options.plot = !s.no_plot;
    return run(config, options);
  }
  return exit_validation;
}

}  // namespace hqc::cli
