#pragma once

// Truncated two-mode Fock space: pure states, density operators and the
// bosonic ladder algebra acting on them.
//
// Basis ordering is row-major in (n_x, n_y):
//     index(n_x, n_y) = n_x * (cutoff + 1) + n_y
// and is shared with the on-disk formats.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qpol {

using Complex = std::complex<double>;

enum class Mode { X, Y };

// Tolerance under which a state claiming to be normalized must have unit norm.
inline constexpr double kStateNormTolerance = 1e-12;
// Trace tolerance for normalized density operators.
inline constexpr double kTraceTolerance = 1e-10;
// Entrywise tolerance for Hermiticity.
inline constexpr double kHermiticityTolerance = 1e-12;

enum class Normalization { Normalized, Unnormalized };

constexpr int basis_size(int cutoff) { return (cutoff + 1) * (cutoff + 1); }

constexpr std::size_t basis_index(int nx, int ny, int cutoff) {
  return static_cast<std::size_t>(nx) * static_cast<std::size_t>(cutoff + 1) +
         static_cast<std::size_t>(ny);
}

struct BasisPair {
  int nx;
  int ny;
};

constexpr BasisPair basis_pair(std::size_t index, int cutoff) {
  return {static_cast<int>(index / static_cast<std::size_t>(cutoff + 1)),
          static_cast<int>(index % static_cast<std::size_t>(cutoff + 1))};
}

/// A pure two-mode state (or unnormalized intermediate vector) over the
/// truncated basis 0 <= n_x, n_y <= cutoff.
///
/// Values are immutable. Results of ladder operators are flagged
/// `Unnormalized`; comparisons of such values compare raw amplitudes.
/// `truncation_loss()` carries the squared amplitude that was dropped because
/// it would have landed beyond the cutoff (or the tail a constructor cut off).
class FockState {
 public:
  FockState(int cutoff, Eigen::VectorXcd amplitudes, Normalization normalization,
            double truncation_loss = 0.0);

  static FockState zero(int cutoff);

  int cutoff() const noexcept { return cutoff_; }
  int dimension() const noexcept { return basis_size(cutoff_); }
  bool is_normalized() const noexcept { return normalized_; }
  double truncation_loss() const noexcept { return truncation_loss_; }

  // Throws OutOfRangeError for indices outside [0, cutoff].
  Complex amplitude(int nx, int ny) const;
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }

 private:
  int cutoff_;
  Eigen::VectorXcd amplitudes_;
  bool normalized_;
  double truncation_loss_;
};

struct AmplitudeEntry {
  int nx;
  int ny;
  Complex amplitude;
};

FockState make_pure_state(const std::vector<AmplitudeEntry>& entries, int cutoff,
                          bool normalize);

// Rescales to unit norm. Throws DegenerateStateError on the zero vector.
FockState normalized(const FockState& state);

// <a|b>, antilinear in the first argument.
Complex inner(const FockState& a, const FockState& b);

FockState operator+(const FockState& a, const FockState& b);
FockState operator-(const FockState& a, const FockState& b);
FockState operator*(Complex factor, const FockState& state);

/// Hermitian, unit-trace (unless flagged) matrix over the truncated basis.
class DensityOperator {
 public:
  // Validates Hermiticity, and the trace when `Normalized` is claimed.
  DensityOperator(int cutoff, Eigen::MatrixXcd matrix, Normalization normalization,
                  double truncation_loss = 0.0);

  int cutoff() const noexcept { return cutoff_; }
  int dimension() const noexcept { return basis_size(cutoff_); }
  bool is_normalized() const noexcept { return normalized_; }
  double truncation_loss() const noexcept { return truncation_loss_; }

  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  Complex element(BasisPair row, BasisPair col) const;
  double trace() const { return matrix_.trace().real(); }

 private:
  int cutoff_;
  Eigen::MatrixXcd matrix_;
  bool normalized_;
  double truncation_loss_;
};

struct DensityDiagnostics {
  double hermiticity_error;
  double trace;
  double min_eigenvalue;
};

// Full invariant audit including an eigen-decomposition; O(dim^3).
DensityDiagnostics diagnose(const DensityOperator& rho);

DensityOperator density_from_pure(const FockState& state);
DensityOperator mix(const std::vector<double>& weights,
                    const std::vector<DensityOperator>& densities);

double purity(const DensityOperator& rho);
double mean_photon_number(const DensityOperator& rho);

// Ladder action. Annihilation never leaves the truncated space; creation and
// the inverse annihilation operator drop components pushed past the cutoff
// and add the dropped squared mass to truncation_loss().
FockState apply_annihilation(const FockState& state, Mode mode);
FockState apply_creation(const FockState& state, Mode mode);

// a_x^{-1} = a_x^dagger (1 + a_x^dagger a_x)^{-1}:  |n_x> -> |n_x + 1> / sqrt(n_x + 1).
FockState apply_inverse_annihilation_x(const FockState& state);

// Projector onto the vacuum of `mode`: keeps only components with zero photons there.
FockState apply_vacuum_projector(const FockState& state, Mode mode);
DensityOperator apply_vacuum_projector(const DensityOperator& rho, Mode mode);

// Dense matrices of the truncated operators, for algebraic checks and for the
// mixed-state polarization criterion.
Eigen::MatrixXcd annihilation_matrix(Mode mode, int cutoff);
Eigen::MatrixXcd creation_matrix(Mode mode, int cutoff);
Eigen::MatrixXcd number_matrix(Mode mode, int cutoff);
Eigen::MatrixXcd vacuum_projector_matrix(Mode mode, int cutoff);

/// Powers of a_x^dagger, a_y^dagger, a_x, a_y in that (normal) order.
struct MomentOrder {
  int p = 0;
  int q = 0;
  int r = 0;
  int s = 0;
};

struct MomentValue {
  Complex value;
  // Set when a single power exceeds the cutoff, or when basis
  // states carrying more than 1e-12 of diagonal weight were mapped past the
  // cutoff. `value` is then the partial in-space sum.
  bool truncated = false;
  double dropped_weight = 0.0;
};

/// Tr[rho a_x^dagger^p a_y^dagger^q a_x^r a_y^s] in the truncated space.
MomentValue normally_ordered_moment(const DensityOperator& rho, MomentOrder order);

}  // namespace qpol
