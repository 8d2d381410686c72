#include "hqc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "hqc/errors.hpp"
#include "hqc/io.hpp"

namespace hqc {

StateSpace::StateSpace(LatticeSpec lattice, bool spin_factored, std::size_t dimension_cap)
    : lattice_(std::make_shared<const LatticeSpec>(std::move(lattice))), spin_factored_(spin_factored) {
  lattice_->validate();
  const auto& tracks = lattice_->tracks;
  if (!spin_factored_ && tracks.size() > 30) throw TooLargeError("too many tracks for a spin word");
  radix_.reserve(tracks.size());
  for (const auto& t : tracks) radix_.push_back(static_cast<int>(t.size()));
  stride_.assign(radix_.size(), 1);
  const double cap = static_cast<double>(dimension_cap);
  double approx = 1.0;
  for (int t = static_cast<int>(radix_.size()) - 1; t >= 0; --t) {
    stride_[t] = positions_;
    positions_ *= static_cast<std::size_t>(radix_[t]);
    approx *= radix_[t];
    if (approx > cap) throw TooLargeError("state space exceeds the dimension cap");
  }
  dim_ = positions_ * spin_states();
  if (static_cast<double>(dim_) > cap) throw TooLargeError("state space exceeds the dimension cap");
  for (int t = 0; t < track_count(); ++t) {
    for (int p = 0; p < radix_[t]; ++p) where_[tracks[t][p]] = {t, p};
  }
}

std::size_t StateSpace::index(const std::vector<int>& positions, std::uint32_t spins) const {
  if (static_cast<int>(positions.size()) != track_count()) throw std::invalid_argument("position tuple size mismatch");
  std::size_t ord = 0;
  for (int t = 0; t < track_count(); ++t) {
    if (positions[t] < 0 || positions[t] >= radix_[t]) throw std::invalid_argument("position out of range");
    ord += stride_[t] * static_cast<std::size_t>(positions[t]);
  }
  return ord * spin_states() + (spin_factored_ ? 0 : spins);
}

std::vector<int> StateSpace::positions(std::size_t ordinal) const {
  std::size_t rest = ordinal / spin_states();
  std::vector<int> out(radix_.size());
  for (int t = 0; t < track_count(); ++t) {
    out[t] = static_cast<int>(rest / stride_[t]);
    rest %= stride_[t];
  }
  return out;
}

std::uint32_t StateSpace::spin_word(std::size_t ordinal) const {
  return spin_factored_ ? 0u : static_cast<std::uint32_t>(ordinal % spin_states());
}

int StateSpace::spin_of(std::uint32_t word, int track) const {
  return static_cast<int>((word >> (track_count() - 1 - track)) & 1u);
}

std::uint32_t StateSpace::with_spin(std::uint32_t word, int track, int s) const {
  const std::uint32_t bit = 1u << (track_count() - 1 - track);
  return s ? (word | bit) : (word & ~bit);
}

std::uint32_t StateSpace::spin_word_of(const std::vector<int>& spins) const {
  if (spins.empty()) return 0;
  if (static_cast<int>(spins.size()) != track_count()) throw std::invalid_argument("spin list size mismatch");
  std::uint32_t w = 0;
  for (int t = 0; t < track_count(); ++t) w = with_spin(w, t, spins[t]);
  return w;
}

std::pair<int, int> StateSpace::locate(const Site& s) const {
  auto it = where_.find(s);
  if (it == where_.end()) throw std::invalid_argument("unknown site " + to_string(s));
  return it->second;
}

std::size_t StateSpace::index_of_sites(const std::vector<Site>& sites, std::uint32_t spins) const {
  if (static_cast<int>(sites.size()) != track_count()) throw std::invalid_argument("site list size mismatch");
  std::vector<int> pos(sites.size());
  for (int t = 0; t < track_count(); ++t) {
    auto [tt, p] = locate(sites[t]);
    if (tt != t) throw std::invalid_argument("site " + to_string(sites[t]) + " is not on track " + std::to_string(t));
    pos[t] = p;
  }
  return index(pos, spins);
}

StateSpace enumerate_basis(const LatticeSpec& lattice, bool spin_factored, std::size_t dimension_cap) {
  return StateSpace(lattice, spin_factored, dimension_cap);
}

bool SparseOperator::is_hermitian(double tol) const {
  if (matrix.rows() != matrix.cols()) return false;
  Eigen::SparseMatrix<double, Eigen::RowMajor> diff = matrix - Eigen::SparseMatrix<double, Eigen::RowMajor>(matrix.transpose());
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (decltype(diff)::InnerIterator it(diff, k); it; ++it) {
      if (std::abs(it.value()) > tol) return false;
    }
  }
  return true;
}

double SparseOperator::norm_bound() const {
  double best = 0.0;
  for (int k = 0; k < matrix.outerSize(); ++k) {
    double row = 0.0;
    for (decltype(matrix)::InnerIterator it(matrix, k); it; ++it) row += std::abs(it.value());
    best = std::max(best, row);
  }
  return best;
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("operator dimension mismatch");
  SparseOperator out;
  out.matrix = matrix + other.matrix;
  out.hermitian = hermitian && other.hermitian;
  return out;
}

SparseOperator SparseOperator::scaled(double factor) const {
  SparseOperator out;
  out.matrix = matrix * factor;
  out.hermitian = hermitian;
  return out;
}

void SparseOperator::write_triplets_csv(std::ostream& out) const {
  out << "row,col,value\r\n";
  for (int k = 0; k < matrix.outerSize(); ++k) {
    for (decltype(matrix)::InnerIterator it(matrix, k); it; ++it) {
      out << it.row() << ',' << it.col() << ',' << format_number(it.value()) << "\r\n";
    }
  }
}

SparseOperator make_operator(std::size_t dim, const std::vector<Eigen::Triplet<double>>& triplets) {
  SparseOperator op;
  op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

void DisorderSpec::validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("disorder sigma must be non-negative");
  if (runs < 1) throw std::invalid_argument("disorder needs at least one run");
}

namespace {

std::mt19937_64 member_stream(std::uint64_t seed, int run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run)};
  return std::mt19937_64(seq);
}

std::vector<double> gaussian_draws(const DisorderSpec& spec, int run, std::size_t count) {
  spec.validate();
  std::vector<double> out(count, spec.mean);
  if (spec.sigma == 0.0) return out;
  auto rng = member_stream(spec.seed, run);
  std::normal_distribution<double> dist(spec.mean, spec.sigma);
  for (auto& v : out) v = dist(rng);
  return out;
}

}  // namespace

std::vector<double> draw_hopping(const LatticeSpec& lattice, const DisorderSpec& spec, int run) {
  return gaussian_draws(spec, run, lattice.plaquettes.size());
}

std::map<Site, double> draw_onsite(const LatticeSpec& lattice, const DisorderSpec& spec, int run) {
  const auto sites = lattice.sites();
  const auto values = gaussian_draws(spec, run, sites.size());
  std::map<Site, double> out;
  for (std::size_t k = 0; k < sites.size(); ++k) out[sites[k]] = values[k];
  return out;
}

Eigen::VectorXd edge_energies(const StateSpace& space) {
  struct Resolved {
    int ta, pa, tb, pb;
    int control_spin;
    double scale;
  };
  std::vector<Resolved> edges;
  for (const auto& e : space.lattice().edges) {
    auto [ta, pa] = space.locate(e.a);
    auto [tb, pb] = space.locate(e.b);
    int cs = -1;
    if (e.kind == EdgeKind::spin_selective) {
      if (space.spin_factored()) throw std::invalid_argument("spin-selective edges need spin degrees of freedom");
      cs = e.control_spin;
    }
    edges.push_back({ta, pa, tb, pb, cs, e.strength_scale});
  }
  Eigen::VectorXd energy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.dim()));
  const std::size_t spins = space.spin_states();
  for (std::size_t pidx = 0; pidx < space.position_count(); ++pidx) {
    const auto pos = space.positions(pidx * spins);
    for (std::uint32_t w = 0; w < spins; ++w) {
      double e_sum = 0.0;
      for (const auto& r : edges) {
        if (pos[r.ta] != r.pa || pos[r.tb] != r.pb) continue;
        if (r.control_spin >= 0 && space.spin_of(w, r.ta) != r.control_spin) continue;
        e_sum -= r.scale;
      }
      energy[static_cast<Eigen::Index>(pidx * spins + w)] = e_sum;
    }
  }
  return energy;
}

SparseOperator build_h_valid(const StateSpace& space, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("attraction strength must be positive");
  const Eigen::VectorXd e = edge_energies(space) * delta;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(space.dim());
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    if (e[k] != 0.0) trip.emplace_back(k, k, e[k]);
  }
  return make_operator(space.dim(), trip);
}

SparseOperator build_v_hop(const StateSpace& space, double J, const std::optional<std::vector<double>>& plaquette_j) {
  if (!(J > 0)) throw std::invalid_argument("hopping strength must be positive");
  const auto& hops = space.lattice().plaquettes;
  if (plaquette_j && plaquette_j->size() != hops.size()) throw std::invalid_argument("one hopping strength per plaquette required");
  struct Resolved {
    int track, from, to;
    Gate gate;
    double j;
  };
  std::vector<Resolved> res;
  for (std::size_t k = 0; k < hops.size(); ++k) {
    auto [tf, pf] = space.locate(hops[k].from);
    auto [tt, pt] = space.locate(hops[k].to);
    res.push_back({tf, pf, pt, hops[k].gate, plaquette_j ? (*plaquette_j)[k] : J});
    (void)tt;
  }
  const std::size_t spins = space.spin_states();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(space.dim() * 4);
  for (std::size_t pidx = 0; pidx < space.position_count(); ++pidx) {
    auto pos = space.positions(pidx * spins);
    for (const auto& r : res) {
      if (pos[r.track] != r.from) continue;
      pos[r.track] = r.to;
      const std::size_t dest = space.index(pos, 0);
      pos[r.track] = r.from;
      const std::size_t src = pidx * spins;
      if (space.spin_factored()) {
        // Each track is a line, so gates act as a position-dependent gauge.
        trip.emplace_back(dest, src, -r.j);
        trip.emplace_back(src, dest, -r.j);
        continue;
      }
      for (std::uint32_t w = 0; w < spins; ++w) {
        const int s = space.spin_of(w, r.track);
        for (int s2 = 0; s2 < 2; ++s2) {
          const double amp = r.gate(s2, s);
          if (amp == 0.0) continue;
          const std::size_t d = dest + space.with_spin(w, r.track, s2);
          trip.emplace_back(d, src + w, -r.j * amp);
          trip.emplace_back(src + w, d, -r.j * amp);
        }
      }
    }
  }
  return make_operator(space.dim(), trip);
}

SparseOperator add_onsite(const StateSpace& space, const std::map<Site, double>& energies) {
  std::vector<std::pair<std::pair<int, int>, double>> resolved;
  for (const auto& [site, w] : energies) resolved.push_back({space.locate(site), w});
  const std::size_t spins = space.spin_states();
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t pidx = 0; pidx < space.position_count(); ++pidx) {
    const auto pos = space.positions(pidx * spins);
    double e = 0.0;
    for (const auto& [tp, w] : resolved) {
      if (pos[tp.first] == tp.second) e += w;
    }
    if (e == 0.0) continue;
    for (std::uint32_t s = 0; s < spins; ++s) trip.emplace_back(pidx * spins + s, pidx * spins + s, e);
  }
  return make_operator(space.dim(), trip);
}

EffectiveOperator project_effective(const SparseOperator& H_full, const StateSpace& space,
                                    std::optional<double> expected_ground) {
  if (H_full.dim() != space.dim()) throw std::invalid_argument("operator does not match the state space");
  const Eigen::VectorXd diag = H_full.diagonal();
  const double e0 = diag.minCoeff();
  const double tol = 1e-9 * std::max(1.0, std::abs(e0));
  if (expected_ground && std::abs(*expected_ground - e0) > tol) {
    throw InternalError("no basis state at the expected ground energy");
  }
  EffectiveOperator out;
  out.ground_energy = e0;
  std::vector<long> sub(space.dim(), -1);
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    if (diag[k] <= e0 + tol) {
      sub[k] = static_cast<long>(out.basis.size());
      out.basis.push_back(static_cast<std::size_t>(k));
    }
  }
  if (out.basis.empty()) throw InternalError("empty ground space");
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < out.basis.size(); ++r) {
    const auto row = static_cast<Eigen::Index>(out.basis[r]);
    for (decltype(H_full.matrix)::InnerIterator it(H_full.matrix, row); it; ++it) {
      const long c = sub[it.col()];
      if (c < 0) continue;
      const double v = (it.col() == row) ? it.value() - e0 : it.value();
      if (v != 0.0) trip.emplace_back(static_cast<Eigen::Index>(r), c, v);
    }
  }
  out.op = make_operator(out.basis.size(), trip);
  return out;
}

std::vector<char> valid_mask(const StateSpace& space) {
  const Eigen::VectorXd e = edge_energies(space);
  const double e0 = e.minCoeff();
  std::vector<char> mask(space.dim());
  for (Eigen::Index k = 0; k < e.size(); ++k) mask[k] = e[k] <= e0 + 1e-9 ? 1 : 0;
  return mask;
}

StateVector basis_state(const StateSpace& space, const std::vector<Site>& sites, const std::vector<int>& spins) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(space.dim()));
  v[static_cast<Eigen::Index>(space.index_of_sites(sites, space.spin_word_of(spins)))] = 1.0;
  return v;
}

}  // namespace hqc
