#include "hqc/walk.hpp"

#include <array>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <stdexcept>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

using cd = std::complex<double>;

void WalkSpec::validate() const {
  if (L < 2) throw std::invalid_argument("walk needs L >= 2");
  if (static_cast<int>(couplings.size()) != L - 1) throw std::invalid_argument("walk needs L-1 couplings");
  for (double c : couplings) {
    if (!(c > 0)) throw std::invalid_argument("walk couplings must be positive");
  }
  if (gates) {
    if (static_cast<int>(gates->size()) != L - 1) throw std::invalid_argument("walk needs one gate per link");
    for (const auto& g : *gates) require_orthogonal(g);
  }
}

void to_json(nlohmann::json& j, const WalkSpec& w) {
  j = nlohmann::json{{"L", w.L}, {"couplings", w.couplings}};
  if (w.gates) {
    auto arr = nlohmann::json::array();
    for (const auto& g : *w.gates) arr.push_back({{g(0, 0), g(0, 1)}, {g(1, 0), g(1, 1)}});
    j["gates"] = arr;
  }
}

void from_json(const nlohmann::json& j, WalkSpec& w) {
  w.L = j.at("L").get<int>();
  w.couplings = j.at("couplings").get<std::vector<double>>();
  w.gates.reset();
  if (j.contains("gates")) {
    std::vector<Gate> gates;
    for (const auto& g : j.at("gates")) {
      Gate m;
      m << g.at(0).at(0).get<double>(), g.at(0).at(1).get<double>(), g.at(1).at(0).get<double>(),
          g.at(1).at(1).get<double>();
      gates.push_back(m);
    }
    w.gates = std::move(gates);
  }
  w.validate();
}

WalkSpec uniform_walk(int L, double J) {
  if (L < 2) throw std::invalid_argument("walk needs L >= 2");
  return WalkSpec{L, std::vector<double>(static_cast<std::size_t>(L - 1), J), std::nullopt};
}

SparseOperator walk_hamiltonian(const WalkSpec& spec) {
  spec.validate();
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k + 1 < spec.L; ++k) {
    trip.emplace_back(k + 1, k, -spec.couplings[k]);
    trip.emplace_back(k, k + 1, -spec.couplings[k]);
  }
  return make_operator(static_cast<std::size_t>(spec.L), trip);
}

WalkSpectrum walk_spectrum(int L, double J) {
  if (L < 2) throw std::invalid_argument("walk needs L >= 2");
  WalkSpectrum s;
  s.eigenvalues.resize(L);
  s.eigenvectors.resize(L, L);
  const double norm = std::sqrt(2.0 / (L + 1));
  for (int l = 1; l <= L; ++l) {
    const double theta = std::numbers::pi * l / (L + 1);
    s.eigenvalues[l - 1] = -2.0 * J * std::cos(theta);
    for (int k = 1; k <= L; ++k) s.eigenvectors(k - 1, l - 1) = norm * std::sin(theta * k);
  }
  return s;
}

TimeSeries success_probability(int L, const std::vector<double>& jt) {
  const auto sp = walk_spectrum(L, 1.0);
  std::vector<double> weight(L);
  for (int l = 0; l < L; ++l) weight[l] = sp.eigenvectors(0, l) * sp.eigenvectors(L - 1, l);
  TimeSeries out;
  out.times = jt;
  out.values.resize(jt.size());
  for (std::size_t k = 0; k < jt.size(); ++k) {
    cd amp = 0.0;
    for (int l = 0; l < L; ++l) amp += weight[l] * std::exp(cd(0.0, -sp.eigenvalues[l] * jt[k]));
    out.values[k] = std::norm(amp);
  }
  return out;
}

WalkSpec peres_couplings(int L, double J) {
  if (L < 2) throw std::invalid_argument("walk needs L >= 2");
  WalkSpec w;
  w.L = L;
  for (int k = 1; k < L; ++k) w.couplings.push_back(0.5 * J * std::sqrt(static_cast<double>(k) * (L - k)));
  return w;
}

double transfer_probability(const WalkSpec& spec, double t) {
  const Eigen::MatrixXd H = walk_hamiltonian(spec).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  cd amp = 0.0;
  const auto& V = es.eigenvectors();
  for (int l = 0; l < spec.L; ++l) amp += V(spec.L - 1, l) * V(0, l) * std::exp(cd(0.0, -es.eigenvalues()[l] * t));
  return std::norm(amp);
}

namespace {

struct SnakeModel {
  StateSpace space;
  EffectiveOperator eff;
  std::vector<long> walk_index;     // per retained state: walk position or -1
  std::vector<int> moving_row;      // per walk position k: row (0-based) hopping to k+1
  std::vector<int> moving_col;      // per walk position k: column (1-based) it leaves
  int length = 0;
  bool prefix_order = true;
};

SnakeModel make_snake_model(int N, int M, const SnakeGates& gates, double J) {
  auto lat = build_snake(N, M);
  for (const auto& [key, g] : gates) set_hop_gate(lat, Site{key.first, key.second}, Site{key.first, key.second + 1}, g);
  StateSpace space(lat, gates.empty());
  auto eff = project_effective(build_h_valid(space, 1.0) + build_v_hop(space, J), space);
  SnakeModel m{std::move(space), std::move(eff), {}, {}, {}, 0, true};
  std::set<long> positions;
  for (std::size_t ord : m.eff.basis) {
    const auto pos = m.space.positions(ord);  // 0-based columns
    const int c = *std::min_element(pos.begin(), pos.end());
    int moved = 0;
    bool ok = true;
    for (int p : pos) {
      if (p == c + 1) ++moved;
      else if (p != c) ok = false;
    }
    if (ok && moved > 0) {
      // Movers must be a prefix in the direction of this column pair.
      const bool downward = (c + 1) % 2 == 1;
      for (int r = 0; r < N; ++r) {
        const bool should = downward ? r < moved : r >= N - moved;
        if (should != (pos[r] == c + 1)) ok = false;
      }
    }
    long k = -1;
    if (ok) k = (moved == 0) ? static_cast<long>(c) * N : static_cast<long>(c) * N + moved;
    if (!ok) m.prefix_order = false;
    m.walk_index.push_back(k);
    if (k >= 0) positions.insert(k);
  }
  m.length = static_cast<int>(positions.size());
  for (int k = 0; k + 1 < N * (M - 1) + 1; ++k) {
    const int c = k / N;  // 0-based column being left
    const int r = k % N;  // rows already moved
    const bool downward = (c + 1) % 2 == 1;
    m.moving_row.push_back(downward ? r : N - 1 - r);
    m.moving_col.push_back(c + 1);
  }
  return m;
}

}  // namespace

SnakeReport snake_equivalence(int N, int M, const SnakeGates& gates, double J) {
  const auto m = make_snake_model(N, M, gates, J);
  SnakeReport rep;
  rep.N = N;
  rep.M = M;
  rep.expected_length = N * (M - 1) + 1;
  rep.walk_length = m.length;
  rep.prefix_order = m.prefix_order;
  const auto& lat = m.space.lattice();
  auto gate_of = [&](int row, int col) -> Gate {
    for (const auto& p : lat.plaquettes) {
      if (p.from == Site{row + 1, col} && p.to == Site{row + 1, col + 1}) return p.gate;
    }
    throw std::logic_error("missing snake hop");
  };
  const std::size_t n = m.eff.basis.size();
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t a = 0; a < n && m.prefix_order; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const long ka = m.walk_index[a], kb = m.walk_index[b];
      if (kb + 1 != ka) continue;
      const int row = m.moving_row[kb];
      const Gate g = gate_of(row, m.moving_col[kb]);
      const auto wa = m.space.spin_word(m.eff.basis[a]), wb = m.space.spin_word(m.eff.basis[b]);
      double amp = 1.0;
      if (!m.space.spin_factored()) {
        if ((wa | (1u << (N - 1 - row))) != (wb | (1u << (N - 1 - row)))) continue;
        amp = g(m.space.spin_of(wa, row), m.space.spin_of(wb, row));
      }
      expected(a, b) = -J * amp;
      expected(b, a) = -J * amp;
    }
  }
  rep.max_deviation = (m.eff.op.dense() - expected).cwiseAbs().maxCoeff();
  std::vector<std::pair<long, std::size_t>> order;
  for (std::size_t a = 0; a < n; ++a) {
    if (m.space.spin_word(m.eff.basis[a]) == 0) order.push_back({m.walk_index[a], m.eff.basis[a]});
  }
  std::sort(order.begin(), order.end());
  for (const auto& [k, ord] : order) rep.walk_order.push_back(ord);
  rep.passed = rep.prefix_order && rep.walk_length == rep.expected_length && rep.max_deviation <= 1e-12 &&
               m.eff.basis.size() == static_cast<std::size_t>(rep.expected_length) * m.space.spin_states();
  return rep;
}

Eigen::VectorXd snake_propagate(int N, int M, const SnakeGates& gates, const Eigen::VectorXd& input) {
  // Spins are always needed here, so force the spinful basis with an explicit identity gate.
  SnakeGates g = gates;
  if (g.empty()) g[{1, 1}] = identity_gate();
  const auto m = make_snake_model(N, M, g, 1.0);
  const std::size_t words = m.space.spin_states();
  if (static_cast<std::size_t>(input.size()) != words) throw std::invalid_argument("input needs one amplitude per spin word");
  const int L = N * (M - 1) + 1;
  // Retained-state index for (walk position, spin word).
  std::vector<long> slot(static_cast<std::size_t>(L) * words, -1);
  for (std::size_t a = 0; a < m.eff.basis.size(); ++a) {
    if (m.walk_index[a] < 0) throw std::logic_error("snake string outside the walk");
    slot[static_cast<std::size_t>(m.walk_index[a]) * words + m.space.spin_word(m.eff.basis[a])] = static_cast<long>(a);
  }
  const Eigen::MatrixXd H = m.eff.op.dense();
  Eigen::VectorXd psi = input;
  for (int k = 0; k + 1 < L; ++k) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(words));
    for (std::size_t w2 = 0; w2 < words; ++w2) {
      for (std::size_t w = 0; w < words; ++w) {
        next[w2] -= H(slot[(k + 1) * words + w2], slot[k * words + w]) * psi[w];
      }
    }
    psi = next;
  }
  return psi;
}

FastCnotReport fast_cnot_check(double j_over_delta, bool control_above, double jt_max, int points) {
  if (!(j_over_delta > 0 && j_over_delta <= 0.25)) throw std::invalid_argument("J/Delta must lie in (0, 1/4]");
  constexpr int N = 3, M = 2, target = 2;
  const int control = control_above ? 1 : 3;
  const auto lat = insert_fast_cnot(build_snake(N, M), target, 1, control);
  const StateSpace space(lat, false);
  FastCnotReport rep;
  rep.control_above = control_above;
  rep.base_length = N * (M - 1) + 1;
  // Walk length seen by one control spin value: the split copies belong to
  // different control spins, so count configurations per control spin.
  const auto mask = valid_mask(space);
  const int control_track = space.locate(Site{control, 1}).first;
  std::array<std::set<std::size_t>, 2> configs;
  for (std::size_t k = 0; k < space.dim(); ++k) {
    if (mask[k]) configs[space.spin_of(space.spin_word(k), control_track)].insert(k / space.spin_states());
  }
  rep.effective_length = configs[0].size() == configs[1].size() ? static_cast<int>(configs[0].size()) : -1;

  const double J = j_over_delta;
  const auto H = build_h_valid(space, 1.0) + build_v_hop(space, J);
  const auto jt = time_grid(0.0, jt_max, points);
  std::vector<double> t_int(jt);
  for (auto& t : t_int) t /= J;
  const int ct = control - 1, tt = target - 1;
  rep.cases.resize(4);
  rep.truth_table_ok = true;
  for (int c = 0; c < 2; ++c) {
    for (int s = 0; s < 2; ++s) {
      std::vector<int> in(3, 0), out(3, 0);
      in[ct] = c;
      in[tt] = s;
      out[ct] = c;
      out[tt] = s ^ c;
      const auto psi0 = basis_state(space, all_left_string(lat), in);
      auto pr = measure_passage(space, H, psi0, t_int, jt, all_right_string(lat), space.spin_word_of(out));
      if (!(pr.peak_success > 0.5 && pr.peak_error < 0.05 * pr.peak_success)) rep.truth_table_ok = false;
      rep.cases[c * 2 + s] = FastCnotCase{c, s, std::move(pr)};
    }
  }
  return rep;
}

LossResult lindblad_evolve(const LossSpec& spec, const std::vector<double>& jt, double rtol) {
  if (!(spec.gamma >= 0)) throw std::invalid_argument("decay rate must be non-negative");
  if (spec.L < 2) throw std::invalid_argument("line needs L >= 2");
  if (jt.empty()) throw std::invalid_argument("empty time grid");
  const int L = spec.L;
  const int D = L + 1;  // sites 0..L-1, sink L
  const double g = spec.gamma;
  using State = std::vector<cd>;
  State rho(static_cast<std::size_t>(D * D), 0.0);
  rho[0] = 1.0;
  auto at = [D](int a, int b) { return static_cast<std::size_t>(a * D + b); };
  auto rhs = [&](const State& r, State& dr, double) {
    for (int a = 0; a < D; ++a) {
      for (int b = 0; b < D; ++b) {
        // -i[H, rho] with H = -(|k+1><k| + h.c.) on the sites.
        cd comm = 0.0;
        if (a < L) {
          if (a > 0) comm -= r[at(a - 1, b)];
          if (a + 1 < L) comm -= r[at(a + 1, b)];
        }
        if (b < L) {
          if (b > 0) comm += r[at(a, b - 1)];
          if (b + 1 < L) comm += r[at(a, b + 1)];
        }
        const double loss = 0.5 * g * ((a < L ? 1.0 : 0.0) + (b < L ? 1.0 : 0.0));
        dr[at(a, b)] = cd(0.0, -1.0) * comm - loss * r[at(a, b)];
      }
    }
    cd fed = 0.0;
    for (int k = 0; k < L; ++k) fed += r[at(k, k)];
    dr[at(L, L)] += g * fed;
  };
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(rtol * 1e-2, rtol, ode::runge_kutta_dopri5<State>());
  LossResult out;
  out.min_population = 1.0;
  std::vector<double> t = jt;
  const bool prepend = t.front() > 0.0;
  if (prepend) t.insert(t.begin(), 0.0);
  std::vector<double> survival;
  try {
    ode::integrate_times(stepper, rhs, rho, t.begin(), t.end(), 1e-3, [&](const State& r, double) {
      double p = 0.0;
      for (int k = 0; k < L; ++k) {
        p += r[at(k, k)].real();
        out.min_population = std::min(out.min_population, r[at(k, k)].real());
      }
      out.min_population = std::min(out.min_population, r[at(L, L)].real());
      survival.push_back(p);
      out.trace.push_back(p + r[at(L, L)].real());
    });
  } catch (const std::exception& e) {
    throw NumericFailure(std::string("master-equation integration failed: ") + e.what());
  }
  if (prepend) {
    survival.erase(survival.begin());
    out.trace.erase(out.trace.begin());
  }
  out.survival.times = jt;
  out.survival.values = std::move(survival);
  return out;
}

TimeSeries lindblad_loss(const LossSpec& spec, const std::vector<double>& jt, double rtol) {
  return lindblad_evolve(spec, jt, rtol).survival;
}

double fit_decay_rate(const TimeSeries& survival) {
  std::vector<double> x, y;
  for (std::size_t k = 0; k < survival.times.size(); ++k) {
    if (survival.values[k] > 1e-12) {
      x.push_back(survival.times[k]);
      y.push_back(std::log(survival.values[k]));
    }
  }
  return -fit_line(x, y).slope;
}

}  // namespace hqc
