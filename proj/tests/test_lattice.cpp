#include <doctest.h>

#include <set>

#include "hqc/errors.hpp"
#include "hqc/lattice.hpp"

using namespace hqc;

namespace {

int selective_edges(const LatticeSpec& l) {
  std::set<std::pair<Site, Site>> groups;
  for (const auto& e : l.edges) {
    if (e.kind == EdgeKind::spin_selective) groups.insert({e.a, e.b.base()});
  }
  return static_cast<int>(groups.size());
}

// Standard edges with one end on a split site, one per base-site pair.
int standard_edges_on_splits(const LatticeSpec& l) {
  std::set<std::pair<Site, Site>> groups;
  for (const auto& e : l.edges) {
    if (e.kind != EdgeKind::standard) continue;
    if (e.a.is_split() || e.b.is_split()) groups.insert({e.a.base(), e.b.base()});
  }
  return static_cast<int>(groups.size());
}

// Edges with an end on a split copy, counted per copy.
int split_edges(const LatticeSpec& l, EdgeKind kind) {
  int n = 0;
  for (const auto& e : l.edges) n += e.kind == kind && (e.a.is_split() || e.b.is_split());
  return n;
}

int directed_hop_terms_on_splits(const LatticeSpec& l) {
  int n = 0;
  for (const auto& p : l.plaquettes) {
    if (!p.from.is_split() && !p.to.is_split()) continue;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) n += p.gate(r, c) != 0.0;
    }
  }
  return n;
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("rotated N=2 has 4 sites, 3 tracks, 4 edges, 1 plaquette") {
    const auto l = build_rotated(2);
    CHECK(l.site_count() == 4);
    CHECK(l.tracks.size() == 3);
    CHECK(l.edges.size() == 4);
    CHECK(l.plaquettes.size() == 1);
  }

  TEST_CASE("rotated N=5 sizes and track lengths") {
    const auto l = build_rotated(5);
    CHECK(l.site_count() == 25);
    CHECK(l.tracks.size() == 9);
    CHECK(l.plaquettes.size() == 16);
    const std::vector<std::size_t> expect = {1, 2, 3, 4, 5, 4, 3, 2, 1};
    for (std::size_t t = 0; t < expect.size(); ++t) CHECK(l.tracks[t].size() == expect[t]);
  }

  TEST_CASE("property: rotated lattice holds N^2 sites split as N - |d| per track") {
    CHECK_THROWS_AS(build_rotated(1), std::invalid_argument);
    for (int N = 2; N <= 9; ++N) {
      const auto l = build_rotated(N);
      CHECK(l.site_count() == static_cast<std::size_t>(N * N));
      CHECK(l.tracks.size() == static_cast<std::size_t>(2 * N - 1));
      CHECK(l.plaquettes.size() == static_cast<std::size_t>((N - 1) * (N - 1)));
      for (int d = -(N - 1); d <= N - 1; ++d) {
        const auto& track = l.tracks[rotated_track_index(N, d)];
        CHECK(track.size() == static_cast<std::size_t>(N - std::abs(d)));
        for (const auto& s : track) CHECK(s.i - s.j == d);
      }
      CHECK_NOTHROW(l.validate());
    }
  }

  TEST_CASE("all-left and all-right strings pick the track ends") {
    const auto l = build_rotated(4);
    const auto left = all_left_string(l), right = all_right_string(l);
    REQUIRE(left.size() == l.tracks.size());
    for (std::size_t t = 0; t < l.tracks.size(); ++t) {
      CHECK(left[t] == l.tracks[t].front());
      CHECK(right[t] == l.tracks[t].back());
    }
  }

  TEST_CASE("snake lattice shape") {
    const auto l = build_snake(1, 2);
    CHECK(l.plaquettes.size() == 1);
    CHECK(l.tracks.size() == 1);
    const auto big = build_snake(3, 6);
    CHECK(big.site_count() == 18);
    CHECK(big.plaquettes.size() == 15);
    CHECK_THROWS_AS(build_snake(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(build_snake(2, 1), std::invalid_argument);
  }

  TEST_CASE("minimal CNOT lattice: two-site control track, target with one split pair") {
    const auto l = build_cnot_test_lattice(false);
    int ordinary = 0, split = 0;
    for (const auto& s : l.sites()) (s.is_split() ? split : ordinary)++;
    CHECK(ordinary == 4);
    CHECK(split == 2);
    CHECK(l.tracks.size() == 2);
    CHECK(split_edges(l, EdgeKind::standard) == 0);
  }

  TEST_CASE("CNOT region: 4 spin-selective and 4 standard edges touch the split pair") {
    const auto l = build_cnot_test_lattice(true);
    CHECK(l.tracks.size() == 3);
    CHECK(split_edges(l, EdgeKind::spin_selective) == 4);
    CHECK(split_edges(l, EdgeKind::standard) == 4);
    CHECK(selective_edges(l) == 2);
  }

  TEST_CASE("CNOT anchor on the boundary is a conflict") {
    const auto l = build_rotated(5);
    CHECK_THROWS_AS(insert_cnot_region(l, Site{1, 1}), ConflictError);
    CHECK_THROWS_AS(insert_cnot_region(l, Site{5, 5}), ConflictError);
  }

  TEST_CASE("overlapping gadget regions conflict") {
    const auto l = insert_cnot_region(build_rotated(7), Site{4, 4});
    CHECK_THROWS_AS(insert_cnot_region(l, Site{4, 4}), ConflictError);
  }

  TEST_CASE("Toffoli region edge and hop counts") {
    const auto l = build_toffoli_test_lattice();
    CHECK(selective_edges(l) == 4);
    CHECK(standard_edges_on_splits(l) == 4);
    CHECK(directed_hop_terms_on_splits(l) == 4 + 8 + 4);
    CHECK_NOTHROW(l.validate());
  }

  TEST_CASE("gates must be orthogonal") {
    CHECK_NOTHROW(require_orthogonal(hadamard_gate()));
    CHECK_NOTHROW(require_orthogonal(x_gate()));
    Gate bad;
    bad << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(require_orthogonal(bad), std::invalid_argument);
    auto l = build_snake(1, 3);
    CHECK_THROWS_AS(set_hop_gate(l, Site{1, 1}, Site{1, 2}, bad), std::invalid_argument);
  }

  TEST_CASE("lattice JSON round trip") {
    const auto l = build_toffoli_test_lattice();
    const nlohmann::json j = l;
    const auto back = j.get<LatticeSpec>();
    CHECK(nlohmann::json(back) == j);
    CHECK(back.tracks == l.tracks);
  }

  TEST_CASE("keep_tracks drops bonds and hops that leave the subset") {
    const auto l = build_rotated(3);
    const auto sub = keep_tracks(l, {1, 2, 3});
    CHECK(sub.tracks.size() == 3);
    for (const auto& e : sub.edges) {
      CHECK(sub.contains(e.a));
      CHECK(sub.contains(e.b));
    }
    for (const auto& p : sub.plaquettes) {
      CHECK(sub.contains(p.from));
      CHECK(sub.contains(p.to));
    }
  }
}
