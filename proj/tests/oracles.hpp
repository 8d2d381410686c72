#pragma once

// Reference computations shared by the unit and acceptance tests. None of
// these call into the library's own evolution or projection code.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "hqc/hamiltonian.hpp"

namespace oracle {

// exp(-iHt) psi by full diagonalization of a real symmetric H.
inline Eigen::VectorXcd expm_apply(const Eigen::MatrixXd& H, const Eigen::VectorXcd& psi, double t) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::MatrixXcd V = es.eigenvectors().cast<std::complex<double>>();
  Eigen::VectorXcd phase(H.rows());
  for (Eigen::Index k = 0; k < H.rows(); ++k) phase[k] = std::exp(std::complex<double>(0.0, -es.eigenvalues()[k] * t));
  return V * phase.asDiagonal() * (V.adjoint() * psi);
}

// Sites on neighboring tracks are joined when they are lattice neighbors.
inline bool adjacent(const hqc::Site& a, const hqc::Site& b) {
  return std::abs(a.i - b.i) + std::abs(a.j - b.j) == 1;
}

// Plain rotated lattice: every adjacent track pair joined by a neighbor bond.
inline bool rotated_connected(const std::vector<hqc::Site>& sites) {
  for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
    if (!adjacent(sites[k], sites[k + 1])) return false;
  }
  return true;
}

// Sites of every track for a position tuple.
inline std::vector<hqc::Site> sites_of(const hqc::StateSpace& space, const std::vector<int>& pos) {
  std::vector<hqc::Site> out;
  for (int t = 0; t < space.track_count(); ++t) out.push_back(space.site_at(t, pos[t]));
  return out;
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hqc-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
