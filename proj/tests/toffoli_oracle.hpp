#pragma once

// Hand-built Toffoli effective Hamiltonian on the gadget test lattice.

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "hqc/hamiltonian.hpp"

namespace oracle {

// Track order of the Toffoli test lattice: control 1, target, control 2.
// Target positions: in, split (i,j,0), (i,j,1), split (i+1,j+1,0),
// (i+1,j+1,1), out. Control positions: in, middle, out.
constexpr int C1 = 0, T = 1, C2 = 2;

struct Config {
  int pos[3];
  int spin[3];
};

inline Config decode(const hqc::StateSpace& space, std::size_t o) {
  Config c{};
  const auto p = space.positions(o);
  const auto w = space.spin_word(o);
  for (int t = 0; t < 3; ++t) {
    c.pos[t] = p[t];
    c.spin[t] = space.spin_of(w, t);
  }
  return c;
}

inline std::size_t encode(const hqc::StateSpace& space, const Config& c) {
  return space.index({c.pos[0], c.pos[1], c.pos[2]}, space.spin_word_of({c.spin[0], c.spin[1], c.spin[2]}));
}

// Satisfied bond terms, written out from the Toffoli edge list.
inline int bond_terms(const Config& c) {
  const int t = c.pos[T], a = c.pos[C1], b = c.pos[C2];
  const bool split1 = t == 1 || t == 2, split2 = t == 3 || t == 4;
  const int k = split1 ? t - 1 : (split2 ? t - 3 : -1);
  int n = 0;
  // Entry and exit bonds of the region.
  n += (t == 0 && a == 0);
  n += (t == 0 && b == 0);
  n += (t == 5 && a == 2);
  n += (t == 5 && b == 2);
  // Unchanged bonds around the split pairs.
  n += (b == 0 && split1);
  n += (b == 1 && split1);
  n += (a == 1 && split2);
  n += (a == 2 && split2);
  // Spin-selective bonds: the control spin picks the split copy.
  n += (a == 0 && split1 && c.spin[C1] == k);
  n += (a == 1 && split1 && c.spin[C1] == k);
  n += (b == 1 && split2 && c.spin[C2] == k);
  n += (b == 2 && split2 && c.spin[C2] == k);
  return n;
}

inline bool valid(const Config& c) { return bond_terms(c) == 2; }

// Forward target moves of the three conditional-hop terms.
inline std::vector<Config> target_moves(const Config& c) {
  std::vector<Config> out;
  const int t = c.pos[T];
  if (t == 0 && c.pos[C2] == 0 && c.pos[C1] == 0) {
    Config d = c;
    d.pos[T] = 1 + c.spin[C1];
    out.push_back(d);
  }
  if ((t == 1 || t == 2) && c.pos[C1] == 1 && c.spin[C1] == t - 1 && c.pos[C2] == 1) {
    const int s1 = t - 1, s2 = c.spin[C2];
    Config d = c;
    d.pos[T] = 3 + s2;
    d.spin[T] = c.spin[T] ^ (s1 & s2);
    out.push_back(d);
  }
  if ((t == 3 || t == 4) && c.pos[C2] == 2 && c.spin[C2] == t - 3 && c.pos[C1] == 2) {
    Config d = c;
    d.pos[T] = 5;
    out.push_back(d);
  }
  return out;
}


struct ToffoliReference {
  std::vector<std::size_t> basis;
  Eigen::MatrixXd matrix;
};

// Valid configurations and the conditional-hop matrix in units of J.
inline ToffoliReference toffoli_reference(const hqc::StateSpace& space) {
  ToffoliReference ref;
  for (std::size_t o = 0; o < space.dim(); ++o) {
    if (valid(decode(space, o))) ref.basis.push_back(o);
  }
  std::map<std::size_t, Eigen::Index> row;
  for (std::size_t k = 0; k < ref.basis.size(); ++k) row[ref.basis[k]] = static_cast<Eigen::Index>(k);
  const auto n = static_cast<Eigen::Index>(ref.basis.size());
  ref.matrix = Eigen::MatrixXd::Zero(n, n);
  auto add = [&](const Config& from, const Config& to) {
    const auto a = row.at(encode(space, from)), b = row.at(encode(space, to));
    ref.matrix(b, a) -= 1.0;
    ref.matrix(a, b) -= 1.0;
  };
  for (std::size_t o : ref.basis) {
    const Config c = decode(space, o);
    for (const auto& d : target_moves(c)) add(c, d);
    // Controls advance with the identity whenever both strings are valid.
    for (int track : {C1, C2}) {
      if (c.pos[track] == 2) continue;
      Config d = c;
      ++d.pos[track];
      if (valid(d)) add(c, d);
    }
  }
  return ref;
}

}  // namespace oracle
