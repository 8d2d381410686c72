#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <map>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hqc {

// Real 2x2 single-qubit gate attached to a hop.
using Gate = Eigen::Matrix2d;

Gate identity_gate();
Gate x_gate();
Gate z_gate();
Gate hadamard_gate();

// Throws std::invalid_argument unless g^T g = I within 1e-12.
void require_orthogonal(const Gate& g);

// Lattice site. A split site carries split = 0 or 1; a snake half-column
// site at column j with half_step set sits between columns j and j+1.
struct Site {
  int i = 0;
  int j = 0;
  int split = -1;
  bool half_step = false;

  bool is_split() const { return split >= 0; }
  Site base() const { return Site{i, j, -1, half_step}; }
  auto operator<=>(const Site&) const = default;
};

std::string to_string(const Site& s);

enum class EdgeKind { standard, spin_selective };

// Attractive edge. For spin-selective edges, `a` is the control site and
// the edge is active only when the particle at `a` has spin control_spin.
struct Edge {
  Site a;
  Site b;
  EdgeKind kind = EdgeKind::standard;
  int control_spin = -1;
  double strength_scale = 1.0;
};

// Directed hop along a track; the reverse hop is implied by Hermiticity.
struct Plaquette {
  Site from;
  Site to;
  Gate gate = Gate::Identity();
};

// `region` marks a track subset cut out of a larger lattice.
enum class ShapeKind { rotated, snake, region };

struct Shape {
  ShapeKind kind = ShapeKind::rotated;
  int N = 0;
  int M = 0;
};

enum class GadgetKind { cnot, toffoli, fast_cnot };

struct GadgetRegion {
  GadgetKind kind = GadgetKind::cnot;
  Site anchor;
  std::vector<Site> sites;
};

struct LatticeSpec {
  Shape shape;
  // Each track lists its sites left to right; split pairs appear as (k=0, k=1).
  std::vector<std::vector<Site>> tracks;
  std::vector<Edge> edges;
  std::vector<Plaquette> plaquettes;
  std::vector<GadgetRegion> gadget_regions;

  std::vector<Site> sites() const;
  std::size_t site_count() const;
  // (track, position) of a site, if present.
  std::optional<std::pair<int, int>> locate(const Site& s) const;
  bool contains(const Site& s) const { return locate(s).has_value(); }
  // Checks structural invariants; throws std::invalid_argument.
  void validate() const;
};

LatticeSpec build_rotated(int N);
LatticeSpec build_snake(int N, int M);

// Replaces the gate on the hop from -> to.
void set_hop_gate(LatticeSpec& spec, const Site& from, const Site& to, const Gate& gate);

// Number of connected strings of the gadget-free rotated lattice.
std::size_t rotated_connected_count(int N);

// Track index of track d = i - j in a rotated lattice (top track first).
int rotated_track_index(int N, int d);

// Leftmost site of every track, i.e. the initial all-left string.
std::vector<Site> all_left_string(const LatticeSpec& spec);
std::vector<Site> all_right_string(const LatticeSpec& spec);

LatticeSpec insert_cnot_region(const LatticeSpec& spec, const Site& anchor);
LatticeSpec insert_toffoli_region(const LatticeSpec& spec, const Site& anchor);

// Fast CNOT on a snake lattice: the hop of `target_row` from column
// `column` to `column + 1` is routed through a half-column split pair
// selected by the spin of `control_row` (an adjacent row).
LatticeSpec insert_fast_cnot(const LatticeSpec& spec, int target_row, int column, int control_row);

// Keeps only the listed tracks (by index) and drops dangling edges and hops.
LatticeSpec keep_tracks(const LatticeSpec& spec, const std::vector<int>& track_indices);

// Two-track CNOT test lattice (control above target); with the spectator
// track the full three-track gadget region is returned.
LatticeSpec build_cnot_test_lattice(bool with_spectator = false);

// Three-track Toffoli test lattice covering exactly the gadget region.
LatticeSpec build_toffoli_test_lattice();

// Anchors used by the test lattices above.
Site cnot_test_anchor();
Site toffoli_test_anchor();

void to_json(nlohmann::json& j, const Site& s);
void from_json(const nlohmann::json& j, Site& s);
void to_json(nlohmann::json& j, const LatticeSpec& spec);
void from_json(const nlohmann::json& j, LatticeSpec& spec);

}  // namespace hqc
