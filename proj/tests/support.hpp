#pragma once

// Helpers shared by the unit tests: seeded random states and scratch files.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qpol/fock.hpp"
#include "qpol/polarization.hpp"

namespace qpol::testing {

// Random normalized state supported on n_x + n_y <= cutoff, the sector that a
// polarization-basis rotation keeps inside the truncated space.
inline FockState random_pure_state(std::mt19937& rng, int cutoff) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<AmplitudeEntry> entries;
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; nx + ny <= cutoff; ++ny) {
      entries.push_back({nx, ny, {g(rng), g(rng)}});
    }
  }
  return make_pure_state(entries, cutoff, true);
}

inline DensityOperator random_density(std::mt19937& rng, int cutoff, int rank = 3) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> weights;
  std::vector<DensityOperator> parts;
  double total = 0.0;
  for (int k = 0; k < rank; ++k) {
    weights.push_back(u(rng));
    total += weights.back();
    parts.push_back(density_from_pure(random_pure_state(rng, cutoff)));
  }
  for (auto& w : weights) w /= total;
  return mix(weights, parts);
}

inline PolarizationVector random_direction(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  return {std::acos(u(rng)), phase(rng)};
}

// W rho W^dagger for the mode change built from v.
inline DensityOperator rotate(const DensityOperator& rho, const PolarizationVector& v) {
  const Eigen::MatrixXcd w = mode_rotation_matrix(v, rho.cutoff());
  Eigen::MatrixXcd m = w * rho.matrix() * w.adjoint();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator(rho.cutoff(), m, Normalization::Normalized);
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("qpol-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::filesystem::path write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace qpol::testing
