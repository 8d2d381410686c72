#include "hqc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "hqc/errors.hpp"

namespace hqc {

Gate identity_gate() { return Gate::Identity(); }

Gate x_gate() {
  Gate g;
  g << 0, 1, 1, 0;
  return g;
}

Gate z_gate() {
  Gate g;
  g << 1, 0, 0, -1;
  return g;
}

Gate hadamard_gate() {
  Gate g;
  g << 1, 1, 1, -1;
  return g / std::sqrt(2.0);
}

void require_orthogonal(const Gate& g) {
  if (!g.allFinite() || ((g.transpose() * g) - Gate::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("hop gate is not orthogonal");
  }
}

std::string to_string(const Site& s) {
  std::string out = "(" + std::to_string(s.i) + "," + std::to_string(s.j);
  if (s.half_step) out += "+1/2";
  if (s.is_split()) out += "," + std::to_string(s.split);
  return out + ")";
}

std::vector<Site> LatticeSpec::sites() const {
  std::vector<Site> out;
  for (const auto& t : tracks) out.insert(out.end(), t.begin(), t.end());
  return out;
}

std::size_t LatticeSpec::site_count() const {
  std::size_t n = 0;
  for (const auto& t : tracks) n += t.size();
  return n;
}

std::optional<std::pair<int, int>> LatticeSpec::locate(const Site& s) const {
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const auto& tr = tracks[t];
    auto it = std::find(tr.begin(), tr.end(), s);
    if (it != tr.end()) return std::make_pair(static_cast<int>(t), static_cast<int>(it - tr.begin()));
  }
  return std::nullopt;
}

namespace {

bool in_region(const LatticeSpec& spec, const Site& s) {
  for (const auto& r : spec.gadget_regions) {
    if (std::find(r.sites.begin(), r.sites.end(), s) != r.sites.end()) return true;
  }
  return false;
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void LatticeSpec::validate() const {
  require(!tracks.empty(), "lattice has no tracks");
  std::set<Site> seen;
  for (const auto& t : tracks) {
    require(!t.empty(), "empty track");
    for (const auto& s : t) {
      require(seen.insert(s).second, "duplicate site " + to_string(s));
      if (s.is_split()) {
        require(s.split == 0 || s.split == 1, "split index must be 0 or 1");
        require(in_region(*this, s), "split site outside a gadget region: " + to_string(s));
      }
      if (s.half_step) require(shape.kind == ShapeKind::snake, "half-column site outside a snake lattice");
    }
  }
  for (const auto& e : edges) {
    auto la = locate(e.a);
    auto lb = locate(e.b);
    require(la && lb, "edge endpoint missing: " + to_string(e.a) + "-" + to_string(e.b));
    require(la->first != lb->first, "edge joins sites of one track");
    require(e.strength_scale > 0, "edge strength scale must be positive");
    if (e.kind == EdgeKind::spin_selective) {
      require(e.control_spin == 0 || e.control_spin == 1, "spin-selective edge needs a control spin");
      require(in_region(*this, e.b), "spin-selective edge outside a gadget region");
    }
  }
  for (const auto& p : plaquettes) {
    auto lf = locate(p.from);
    auto lt = locate(p.to);
    require(lf && lt, "hop endpoint missing: " + to_string(p.from) + "->" + to_string(p.to));
    require(lf->first == lt->first, "hop leaves its track");
    require(p.from != p.to, "hop onto the same site");
    require_orthogonal(p.gate);
  }
  if (shape.kind == ShapeKind::rotated) {
    const int N = shape.N;
    require(static_cast<int>(tracks.size()) == 2 * N - 1, "rotated lattice needs 2N-1 tracks");
    for (int d = N - 1; d >= -(N - 1); --d) {
      std::set<Site> bases;
      for (const auto& s : tracks[rotated_track_index(N, d)]) bases.insert(s.base());
      require(static_cast<int>(bases.size()) == N - std::abs(d), "rotated track has wrong length");
    }
  } else if (shape.kind == ShapeKind::snake) {
    require(static_cast<int>(tracks.size()) == shape.N, "snake lattice needs N tracks");
  }
}

int rotated_track_index(int N, int d) { return (N - 1) - d; }

LatticeSpec build_rotated(int N) {
  if (N < 2) throw std::invalid_argument("rotated lattice needs N >= 2");
  LatticeSpec spec;
  spec.shape = {ShapeKind::rotated, N, N};
  for (int d = N - 1; d >= -(N - 1); --d) {
    std::vector<Site> track;
    for (int i = 1; i <= N; ++i) {
      const int j = i - d;
      if (j >= 1 && j <= N) track.push_back(Site{i, j});
    }
    spec.tracks.push_back(std::move(track));
  }
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j <= N; ++j) {
      if (i < N) spec.edges.push_back(Edge{Site{i, j}, Site{i + 1, j}});
      if (j < N) spec.edges.push_back(Edge{Site{i, j}, Site{i, j + 1}});
    }
  }
  for (int i = 1; i < N; ++i) {
    for (int j = 1; j < N; ++j) spec.plaquettes.push_back(Plaquette{Site{i, j}, Site{i + 1, j + 1}, identity_gate()});
  }
  return spec;
}

LatticeSpec build_snake(int N, int M) {
  if (N < 1 || M < 2) throw std::invalid_argument("snake lattice needs N >= 1 and M >= 2");
  LatticeSpec spec;
  spec.shape = {ShapeKind::snake, N, M};
  for (int i = 1; i <= N; ++i) {
    std::vector<Site> track;
    for (int j = 1; j <= M; ++j) track.push_back(Site{i, j});
    spec.tracks.push_back(std::move(track));
  }
  for (int j = 1; j <= M; ++j) {
    for (int i = 1; i < N; ++i) spec.edges.push_back(Edge{Site{i, j}, Site{i + 1, j}});
  }
  // Odd column pairs advance top to bottom, even ones bottom to top.
  for (int j = 1; j < M; ++j) {
    for (int i = 1; i < N; ++i) {
      if (j % 2 == 1) {
        spec.edges.push_back(Edge{Site{i, j + 1}, Site{i + 1, j}});
      } else {
        spec.edges.push_back(Edge{Site{i, j}, Site{i + 1, j + 1}});
      }
    }
  }
  for (int i = 1; i <= N; ++i) {
    for (int j = 1; j < M; ++j) spec.plaquettes.push_back(Plaquette{Site{i, j}, Site{i, j + 1}, identity_gate()});
  }
  return spec;
}

void set_hop_gate(LatticeSpec& spec, const Site& from, const Site& to, const Gate& gate) {
  require_orthogonal(gate);
  for (auto& p : spec.plaquettes) {
    if (p.from == from && p.to == to) {
      p.gate = gate;
      return;
    }
  }
  throw std::invalid_argument("no hop " + to_string(from) + "->" + to_string(to));
}

std::size_t rotated_connected_count(int N) {
  if (N < 2) throw std::invalid_argument("rotated lattice needs N >= 2");
  // C(2(N-1), N-1)
  const std::size_t n = 2 * static_cast<std::size_t>(N - 1);
  const std::size_t k = static_cast<std::size_t>(N - 1);
  std::size_t c = 1;
  for (std::size_t r = 1; r <= k; ++r) c = c * (n - k + r) / r;
  return c;
}

std::vector<Site> all_left_string(const LatticeSpec& spec) {
  std::vector<Site> out;
  for (const auto& t : spec.tracks) out.push_back(t.front());
  return out;
}

std::vector<Site> all_right_string(const LatticeSpec& spec) {
  std::vector<Site> out;
  for (const auto& t : spec.tracks) out.push_back(t.back());
  return out;
}

namespace {

Site split_of(const Site& s, int k) { return Site{s.i, s.j, k, s.half_step}; }

void require_free(const LatticeSpec& spec, const std::vector<Site>& region) {
  for (const auto& s : region) {
    if (in_region(spec, s) || in_region(spec, split_of(s, 0))) {
      throw ConflictError("gadget region overlaps another gadget at " + to_string(s));
    }
  }
  for (const auto& s : region) {
    if (!spec.contains(s)) throw ConflictError("gadget region leaves the lattice at " + to_string(s));
  }
}

// Replaces `site` in its track by its split pair.
void split_in_track(LatticeSpec& spec, const Site& site) {
  auto loc = spec.locate(site);
  if (!loc) throw ConflictError("site not in lattice: " + to_string(site));
  auto& track = spec.tracks[loc->first];
  auto it = track.begin() + loc->second;
  it = track.erase(it);
  track.insert(it, {split_of(site, 0), split_of(site, 1)});
}

// Rewrites every edge touching `site` into edges to its split pair.
// Endpoints listed in `selective` get spin-selective edges (control spin s
// attracts split s); all other endpoints get standard edges to both splits.
void rewire_edges(LatticeSpec& spec, const Site& site, const std::vector<Site>& selective) {
  std::vector<Edge> out;
  for (const auto& e : spec.edges) {
    if (e.a != site && e.b != site) {
      out.push_back(e);
      continue;
    }
    const Site other = (e.a == site) ? e.b : e.a;
    const bool sel = std::find(selective.begin(), selective.end(), other) != selective.end();
    for (int k = 0; k < 2; ++k) {
      Edge ne;
      ne.a = other;
      ne.b = split_of(site, k);
      ne.strength_scale = e.strength_scale;
      if (sel) {
        ne.kind = EdgeKind::spin_selective;
        ne.control_spin = k;
      }
      out.push_back(ne);
    }
  }
  spec.edges = std::move(out);
}

// Hop from -> to replaced by the routed family produced by `expand`.
void reroute_hop(LatticeSpec& spec, const Site& from, const Site& to,
                 const std::function<std::vector<Plaquette>()>& expand) {
  auto it = std::find_if(spec.plaquettes.begin(), spec.plaquettes.end(),
                         [&](const Plaquette& p) { return p.from == from && p.to == to; });
  if (it == spec.plaquettes.end()) throw ConflictError("missing hop " + to_string(from) + "->" + to_string(to));
  const auto pos = it - spec.plaquettes.begin();
  spec.plaquettes.erase(it);
  auto family = expand();
  spec.plaquettes.insert(spec.plaquettes.begin() + pos, family.begin(), family.end());
}

}  // namespace

LatticeSpec insert_cnot_region(const LatticeSpec& spec, const Site& anchor) {
  if (spec.shape.kind != ShapeKind::rotated) throw std::invalid_argument("CNOT region needs a rotated lattice");
  const int i = anchor.i;
  const int j = anchor.j;
  const Site ctrl_l{i, j - 1}, ctrl_r{i + 1, j};
  const Site tgt_l{i - 1, j - 1}, tgt_r{i + 1, j + 1};
  const Site side_l{i - 1, j}, side_r{i, j + 1};
  const Site a = anchor.base();
  require_free(spec, {a, ctrl_l, ctrl_r, tgt_l, tgt_r, side_l, side_r});

  LatticeSpec out = spec;
  split_in_track(out, a);
  rewire_edges(out, a, {ctrl_l, ctrl_r});
  reroute_hop(out, tgt_l, a, [&] {
    return std::vector<Plaquette>{{tgt_l, split_of(a, 0), identity_gate()}, {tgt_l, split_of(a, 1), x_gate()}};
  });
  reroute_hop(out, a, tgt_r, [&] {
    return std::vector<Plaquette>{{split_of(a, 0), tgt_r, identity_gate()}, {split_of(a, 1), tgt_r, identity_gate()}};
  });
  out.gadget_regions.push_back(GadgetRegion{
      GadgetKind::cnot, a, {ctrl_l, ctrl_r, tgt_l, split_of(a, 0), split_of(a, 1), tgt_r, side_l, side_r}});
  return out;
}

LatticeSpec insert_toffoli_region(const LatticeSpec& spec, const Site& anchor) {
  if (spec.shape.kind != ShapeKind::rotated) throw std::invalid_argument("Toffoli region needs a rotated lattice");
  const int i = anchor.i;
  const int j = anchor.j;
  const Site c1_0{i, j - 1}, c1_1{i + 1, j}, c1_2{i + 2, j + 1};
  const Site t_l{i - 1, j - 1}, s1{i, j}, s2{i + 1, j + 1}, t_r{i + 2, j + 2};
  const Site c2_0{i - 1, j}, c2_1{i, j + 1}, c2_2{i + 1, j + 2};
  require_free(spec, {c1_0, c1_1, c1_2, t_l, s1, s2, t_r, c2_0, c2_1, c2_2});

  LatticeSpec out = spec;
  split_in_track(out, s1);
  split_in_track(out, s2);
  // First switch keyed on control 1, second on control 2.
  rewire_edges(out, s1, {c1_0, c1_1});
  rewire_edges(out, s2, {c2_1, c2_2});
  reroute_hop(out, t_l, s1, [&] {
    return std::vector<Plaquette>{{t_l, split_of(s1, 0), identity_gate()}, {t_l, split_of(s1, 1), identity_gate()}};
  });
  reroute_hop(out, s1, s2, [&] {
    std::vector<Plaquette> fam;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        fam.push_back({split_of(s1, a), split_of(s2, b), (a == 1 && b == 1) ? x_gate() : identity_gate()});
      }
    }
    return fam;
  });
  reroute_hop(out, s2, t_r, [&] {
    return std::vector<Plaquette>{{split_of(s2, 0), t_r, identity_gate()}, {split_of(s2, 1), t_r, identity_gate()}};
  });
  out.gadget_regions.push_back(GadgetRegion{GadgetKind::toffoli,
                                            s1,
                                            {c1_0, c1_1, c1_2, t_l, split_of(s1, 0), split_of(s1, 1), split_of(s2, 0),
                                             split_of(s2, 1), t_r, c2_0, c2_1, c2_2}});
  return out;
}

LatticeSpec insert_fast_cnot(const LatticeSpec& spec, int target_row, int column, int control_row) {
  if (spec.shape.kind != ShapeKind::snake) throw std::invalid_argument("fast CNOT needs a snake lattice");
  const int N = spec.shape.N;
  const int M = spec.shape.M;
  if (target_row < 1 || target_row > N || column < 1 || column >= M) {
    throw std::invalid_argument("fast CNOT position outside the snake lattice");
  }
  if (std::abs(control_row - target_row) != 1 || control_row < 1 || control_row > N) {
    throw std::invalid_argument("fast CNOT control must be an adjacent row");
  }
  // Row that moves before the target in this column pair, and the one after.
  const bool downward = column % 2 == 1;
  const int earlier = downward ? target_row - 1 : target_row + 1;
  const int later = downward ? target_row + 1 : target_row - 1;
  const Site t_l{target_row, column}, t_r{target_row, column + 1};
  const Site mid{target_row, column, -1, true};

  std::vector<Site> partners;
  if (earlier >= 1 && earlier <= N) partners.push_back(Site{earlier, column + 1});
  if (later >= 1 && later <= N) partners.push_back(Site{later, column});
  std::vector<Site> region = {t_l, t_r};
  region.insert(region.end(), partners.begin(), partners.end());
  require_free(spec, region);

  LatticeSpec out = spec;
  auto loc = out.locate(t_r);
  auto& track = out.tracks[loc->first];
  track.insert(track.begin() + loc->second, {split_of(mid, 0), split_of(mid, 1)});
  for (const auto& p : partners) {
    for (int k = 0; k < 2; ++k) {
      Edge e;
      e.a = p;
      e.b = split_of(mid, k);
      if (p.i == control_row) {
        e.kind = EdgeKind::spin_selective;
        e.control_spin = k;
      }
      out.edges.push_back(e);
    }
  }
  reroute_hop(out, t_l, t_r, [&] {
    return std::vector<Plaquette>{{t_l, split_of(mid, 0), identity_gate()},
                                  {t_l, split_of(mid, 1), x_gate()},
                                  {split_of(mid, 0), t_r, identity_gate()},
                                  {split_of(mid, 1), t_r, identity_gate()}};
  });
  region.push_back(split_of(mid, 0));
  region.push_back(split_of(mid, 1));
  out.gadget_regions.push_back(GadgetRegion{GadgetKind::fast_cnot, mid, region});
  return out;
}

LatticeSpec keep_tracks(const LatticeSpec& spec, const std::vector<int>& track_indices) {
  LatticeSpec out;
  out.shape = {ShapeKind::region, spec.shape.N, spec.shape.M};
  for (int t : track_indices) {
    if (t < 0 || t >= static_cast<int>(spec.tracks.size())) throw std::invalid_argument("track index out of range");
    out.tracks.push_back(spec.tracks[t]);
  }
  for (const auto& e : spec.edges) {
    if (out.contains(e.a) && out.contains(e.b)) out.edges.push_back(e);
  }
  for (const auto& p : spec.plaquettes) {
    if (out.contains(p.from) && out.contains(p.to)) out.plaquettes.push_back(p);
  }
  for (auto r : spec.gadget_regions) {
    std::erase_if(r.sites, [&](const Site& s) { return !out.contains(s); });
    out.gadget_regions.push_back(std::move(r));
  }
  return out;
}

Site cnot_test_anchor() { return Site{2, 2}; }
Site toffoli_test_anchor() { return Site{2, 2}; }

LatticeSpec build_cnot_test_lattice(bool with_spectator) {
  constexpr int N = 3;
  auto full = insert_cnot_region(build_rotated(N), cnot_test_anchor());
  std::vector<int> keep = {rotated_track_index(N, 1), rotated_track_index(N, 0)};
  if (with_spectator) keep.push_back(rotated_track_index(N, -1));
  return keep_tracks(full, keep);
}

LatticeSpec build_toffoli_test_lattice() {
  constexpr int N = 4;
  auto full = insert_toffoli_region(build_rotated(N), toffoli_test_anchor());
  return keep_tracks(full, {rotated_track_index(N, 1), rotated_track_index(N, 0), rotated_track_index(N, -1)});
}

namespace {

std::string kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::rotated: return "rotated";
    case ShapeKind::snake: return "snake";
    case ShapeKind::region: return "region";
  }
  return "rotated";
}

ShapeKind shape_from(const std::string& s) {
  if (s == "rotated") return ShapeKind::rotated;
  if (s == "snake") return ShapeKind::snake;
  if (s == "region") return ShapeKind::region;
  throw std::invalid_argument("unknown lattice shape: " + s);
}

std::string gadget_name(GadgetKind k) {
  switch (k) {
    case GadgetKind::cnot: return "cnot";
    case GadgetKind::toffoli: return "toffoli";
    case GadgetKind::fast_cnot: return "fast_cnot";
  }
  return "cnot";
}

GadgetKind gadget_from(const std::string& s) {
  if (s == "cnot") return GadgetKind::cnot;
  if (s == "toffoli") return GadgetKind::toffoli;
  if (s == "fast_cnot") return GadgetKind::fast_cnot;
  throw std::invalid_argument("unknown gadget kind: " + s);
}

}  // namespace

void to_json(nlohmann::json& j, const Site& s) {
  j = nlohmann::json{{"i", s.i}, {"j", s.j}};
  if (s.is_split()) j["split"] = s.split;
  if (s.half_step) j["half_step"] = true;
}

void from_json(const nlohmann::json& j, Site& s) {
  s.i = j.at("i").get<int>();
  s.j = j.at("j").get<int>();
  s.split = j.value("split", -1);
  s.half_step = j.value("half_step", false);
}

void to_json(nlohmann::json& j, const LatticeSpec& spec) {
  j = nlohmann::json::object();
  j["shape"] = {{"kind", kind_name(spec.shape.kind)}, {"N", spec.shape.N}, {"M", spec.shape.M}};
  j["tracks"] = spec.tracks;
  auto edges = nlohmann::json::array();
  for (const auto& e : spec.edges) {
    nlohmann::json je = {{"a", e.a}, {"b", e.b}, {"strength_scale", e.strength_scale}};
    je["kind"] = e.kind == EdgeKind::standard ? "standard" : "spin_selective";
    if (e.kind == EdgeKind::spin_selective) je["control_spin"] = e.control_spin;
    edges.push_back(je);
  }
  j["edges"] = edges;
  auto hops = nlohmann::json::array();
  for (const auto& p : spec.plaquettes) {
    hops.push_back({{"from", p.from},
                    {"to", p.to},
                    {"gate", {{p.gate(0, 0), p.gate(0, 1)}, {p.gate(1, 0), p.gate(1, 1)}}}});
  }
  j["plaquettes"] = hops;
  auto regions = nlohmann::json::array();
  for (const auto& r : spec.gadget_regions) {
    regions.push_back({{"kind", gadget_name(r.kind)}, {"anchor", r.anchor}, {"sites", r.sites}});
  }
  j["gadget_regions"] = regions;
}

void from_json(const nlohmann::json& j, LatticeSpec& spec) {
  spec = LatticeSpec{};
  const auto& sh = j.at("shape");
  spec.shape = {shape_from(sh.at("kind").get<std::string>()), sh.at("N").get<int>(), sh.value("M", 0)};
  spec.tracks = j.at("tracks").get<std::vector<std::vector<Site>>>();
  for (const auto& je : j.at("edges")) {
    Edge e;
    e.a = je.at("a").get<Site>();
    e.b = je.at("b").get<Site>();
    const auto kind = je.value("kind", std::string("standard"));
    if (kind == "spin_selective") {
      e.kind = EdgeKind::spin_selective;
      e.control_spin = je.at("control_spin").get<int>();
    } else if (kind != "standard") {
      throw std::invalid_argument("unknown edge kind: " + kind);
    }
    e.strength_scale = je.value("strength_scale", 1.0);
    spec.edges.push_back(e);
  }
  for (const auto& jp : j.at("plaquettes")) {
    Plaquette p;
    p.from = jp.at("from").get<Site>();
    p.to = jp.at("to").get<Site>();
    const auto& g = jp.at("gate");
    p.gate << g.at(0).at(0).get<double>(), g.at(0).at(1).get<double>(), g.at(1).at(0).get<double>(),
        g.at(1).at(1).get<double>();
    spec.plaquettes.push_back(p);
  }
  if (j.contains("gadget_regions")) {
    for (const auto& jr : j.at("gadget_regions")) {
      spec.gadget_regions.push_back(GadgetRegion{gadget_from(jr.at("kind").get<std::string>()),
                                                 jr.at("anchor").get<Site>(),
                                                 jr.at("sites").get<std::vector<Site>>()});
    }
  }
  spec.validate();
}

}  // namespace hqc
