#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "hqc/lattice.hpp"

namespace hqc {

using StateVector = Eigen::VectorXcd;

// Basis of one-particle-per-track configurations.
//
// Ordinal layout: position tuple in mixed radix (track 0 most significant),
// then the spin word (track 0 in the most significant bit). With
// spin_factored the spin word is omitted.
class StateSpace {
 public:
  static constexpr std::size_t default_dimension_cap = 4'000'000;

  StateSpace(LatticeSpec lattice, bool spin_factored, std::size_t dimension_cap = default_dimension_cap);

  const LatticeSpec& lattice() const { return *lattice_; }
  bool spin_factored() const { return spin_factored_; }
  int track_count() const { return static_cast<int>(radix_.size()); }
  std::size_t dim() const { return dim_; }
  std::size_t position_count() const { return positions_; }
  std::size_t spin_states() const { return spin_factored_ ? 1u : (std::size_t{1} << radix_.size()); }

  std::size_t index(const std::vector<int>& positions, std::uint32_t spins = 0) const;
  std::vector<int> positions(std::size_t ordinal) const;
  std::uint32_t spin_word(std::size_t ordinal) const;
  int spin_of(std::uint32_t word, int track) const;
  std::uint32_t with_spin(std::uint32_t word, int track, int s) const;

  // Ordinal of the configuration with the given site on every track.
  std::size_t index_of_sites(const std::vector<Site>& sites, std::uint32_t spins = 0) const;
  // (track, position) of a site; throws std::invalid_argument if unknown.
  std::pair<int, int> locate(const Site& s) const;
  const Site& site_at(int track, int pos) const { return lattice_->tracks[track][pos]; }

  // Spin word from per-track spins listed in track order.
  std::uint32_t spin_word_of(const std::vector<int>& spins) const;

 private:
  std::shared_ptr<const LatticeSpec> lattice_;
  bool spin_factored_;
  std::vector<int> radix_;
  std::vector<std::size_t> stride_;
  std::size_t positions_ = 1;
  std::size_t dim_ = 1;
  std::map<Site, std::pair<int, int>> where_;
};

StateSpace enumerate_basis(const LatticeSpec& lattice, bool spin_factored,
                           std::size_t dimension_cap = StateSpace::default_dimension_cap);

// Real sparse operator over a StateSpace, stored row-major.
struct SparseOperator {
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
  bool hermitian = true;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  StateVector apply(const StateVector& x) const { return matrix * x; }
  Eigen::VectorXd diagonal() const { return matrix.diagonal(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
  bool is_hermitian(double tol = 1e-12) const;
  // Upper bound on the spectral norm (maximum absolute row sum).
  double norm_bound() const;
  double element(std::size_t row, std::size_t col) const { return matrix.coeff(row, col); }

  SparseOperator operator+(const SparseOperator& other) const;
  SparseOperator scaled(double factor) const;

  // Writes "row,col,value" lines with a header, row-major order.
  void write_triplets_csv(std::ostream& out) const;
};

SparseOperator make_operator(std::size_t dim, const std::vector<Eigen::Triplet<double>>& triplets);

enum class DisorderTarget { hopping, onsite };

struct DisorderSpec {
  DisorderTarget target = DisorderTarget::hopping;
  double mean = 0.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  int runs = 50;

  void validate() const;
};

// Per-plaquette hopping strengths for one ensemble member.
std::vector<double> draw_hopping(const LatticeSpec& lattice, const DisorderSpec& spec, int run);
// Per-site on-site energies for one ensemble member.
std::map<Site, double> draw_onsite(const LatticeSpec& lattice, const DisorderSpec& spec, int run);

// Diagonal edge energies per basis ordinal for unit attraction strength.
Eigen::VectorXd edge_energies(const StateSpace& space);

SparseOperator build_h_valid(const StateSpace& space, double delta);

// Optional per-plaquette strengths override the uniform J.
SparseOperator build_v_hop(const StateSpace& space, double J,
                           const std::optional<std::vector<double>>& plaquette_j = std::nullopt);

SparseOperator add_onsite(const StateSpace& space, const std::map<Site, double>& energies);

// Lowest-order effective Hamiltonian on the minimal-energy subspace.
struct EffectiveOperator {
  SparseOperator op;
  // Ordinals of the retained basis states, ascending.
  std::vector<std::size_t> basis;
  double ground_energy = 0.0;
};

EffectiveOperator project_effective(const SparseOperator& H_full, const StateSpace& space,
                                    std::optional<double> expected_ground = std::nullopt);

// Mask of the minimal-energy (valid) strings of H_valid.
std::vector<char> valid_mask(const StateSpace& space);

// Basis vector for a configuration given by sites and per-track spins.
StateVector basis_state(const StateSpace& space, const std::vector<Site>& sites,
                        const std::vector<int>& spins = {});

}  // namespace hqc
