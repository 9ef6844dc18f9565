#include "qpol/fock.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qpol/error.hpp"

namespace qpol {

namespace {

void require_cutoff(int cutoff) {
  if (cutoff < 0) {
    throw OutOfRangeError("cutoff must be nonnegative, got " + std::to_string(cutoff));
  }
}

void require_in_range(int nx, int ny, int cutoff) {
  if (nx < 0 || ny < 0 || nx > cutoff || ny > cutoff) {
    throw OutOfRangeError("basis index (" + std::to_string(nx) + ", " + std::to_string(ny) +
                          ") outside cutoff " + std::to_string(cutoff));
  }
}

void require_same_cutoff(int a, int b) {
  if (a != b) {
    throw ContractError("cutoff mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// sqrt(n (n-1) ... (n-k+1)), the amplitude factor of a^k on |n>.
double sqrt_falling_factorial(int n, int k) {
  double product = 1.0;
  for (int j = 0; j < k; ++j) product *= static_cast<double>(n - j);
  return std::sqrt(product);
}

}  // namespace

// ---------------------------------------------------------------------------
// FockState

FockState::FockState(int cutoff, Eigen::VectorXcd amplitudes, Normalization normalization,
                     double truncation_loss)
    : cutoff_(cutoff),
      amplitudes_(std::move(amplitudes)),
      normalized_(normalization == Normalization::Normalized),
      truncation_loss_(truncation_loss) {
  require_cutoff(cutoff_);
  if (amplitudes_.size() != basis_size(cutoff_)) {
    throw ContractError("amplitude table has " + std::to_string(amplitudes_.size()) +
                        " entries, expected " + std::to_string(basis_size(cutoff_)));
  }
  if (normalized_ && std::abs(amplitudes_.squaredNorm() - 1.0) > kStateNormTolerance) {
    throw NormalizationError("state flagged normalized has squared norm " +
                             std::to_string(amplitudes_.squaredNorm()));
  }
}

FockState FockState::zero(int cutoff) {
  require_cutoff(cutoff);
  return FockState(cutoff, Eigen::VectorXcd::Zero(basis_size(cutoff)),
                   Normalization::Unnormalized);
}

Complex FockState::amplitude(int nx, int ny) const {
  require_in_range(nx, ny, cutoff_);
  return amplitudes_[static_cast<Eigen::Index>(basis_index(nx, ny, cutoff_))];
}

FockState make_pure_state(const std::vector<AmplitudeEntry>& entries, int cutoff,
                          bool normalize) {
  require_cutoff(cutoff);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(basis_size(cutoff));
  std::vector<bool> seen(static_cast<std::size_t>(basis_size(cutoff)), false);
  for (const auto& e : entries) {
    require_in_range(e.nx, e.ny, cutoff);
    const auto i = basis_index(e.nx, e.ny, cutoff);
    if (seen[i]) {
      throw ContractError("duplicate amplitude for (" + std::to_string(e.nx) + ", " +
                          std::to_string(e.ny) + ")");
    }
    seen[i] = true;
    amps[static_cast<Eigen::Index>(i)] = e.amplitude;
  }
  FockState raw(cutoff, std::move(amps), Normalization::Unnormalized);
  if (normalize) return normalized(raw);
  const bool unit = std::abs(raw.squared_norm() - 1.0) <= kStateNormTolerance;
  return FockState(cutoff, raw.amplitudes(),
                   unit ? Normalization::Normalized : Normalization::Unnormalized);
}

FockState normalized(const FockState& state) {
  const double n = state.norm();
  if (n == 0.0) throw DegenerateStateError("cannot normalize the zero vector");
  return FockState(state.cutoff(), state.amplitudes() / n, Normalization::Normalized,
                   state.truncation_loss());
}

Complex inner(const FockState& a, const FockState& b) {
  require_same_cutoff(a.cutoff(), b.cutoff());
  return a.amplitudes().dot(b.amplitudes());
}

FockState operator+(const FockState& a, const FockState& b) {
  require_same_cutoff(a.cutoff(), b.cutoff());
  return FockState(a.cutoff(), a.amplitudes() + b.amplitudes(), Normalization::Unnormalized,
                   a.truncation_loss() + b.truncation_loss());
}

FockState operator-(const FockState& a, const FockState& b) {
  require_same_cutoff(a.cutoff(), b.cutoff());
  return FockState(a.cutoff(), a.amplitudes() - b.amplitudes(), Normalization::Unnormalized,
                   a.truncation_loss() + b.truncation_loss());
}

FockState operator*(Complex factor, const FockState& state) {
  return FockState(state.cutoff(), factor * state.amplitudes(), Normalization::Unnormalized,
                   std::norm(factor) * state.truncation_loss());
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(int cutoff, Eigen::MatrixXcd matrix,
                                 Normalization normalization, double truncation_loss)
    : cutoff_(cutoff),
      matrix_(std::move(matrix)),
      normalized_(normalization == Normalization::Normalized),
      truncation_loss_(truncation_loss) {
  require_cutoff(cutoff_);
  const auto dim = basis_size(cutoff_);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw ContractError("density matrix must be " + std::to_string(dim) + "x" +
                        std::to_string(dim));
  }
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermiticityTolerance) {
    throw ContractError("density matrix not Hermitian (max deviation " + std::to_string(herm) +
                        ")");
  }
  if (normalized_ && std::abs(trace() - 1.0) > kTraceTolerance) {
    throw NormalizationError("density flagged normalized has trace " + std::to_string(trace()));
  }
}

Complex DensityOperator::element(BasisPair row, BasisPair col) const {
  require_in_range(row.nx, row.ny, cutoff_);
  require_in_range(col.nx, col.ny, cutoff_);
  return matrix_(static_cast<Eigen::Index>(basis_index(row.nx, row.ny, cutoff_)),
                 static_cast<Eigen::Index>(basis_index(col.nx, col.ny, cutoff_)));
}

DensityDiagnostics diagnose(const DensityOperator& rho) {
  const auto& m = rho.matrix();
  DensityDiagnostics d{};
  d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace = rho.trace();
  const Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

DensityOperator density_from_pure(const FockState& state) {
  if (!state.is_normalized()) {
    throw ContractError("density_from_pure requires a normalized state");
  }
  const auto& v = state.amplitudes();
  return DensityOperator(state.cutoff(), v * v.adjoint(), Normalization::Normalized,
                         state.truncation_loss());
}

DensityOperator mix(const std::vector<double>& weights,
                    const std::vector<DensityOperator>& densities) {
  if (weights.size() != densities.size() || densities.empty()) {
    throw ContractError("mix needs one weight per density and at least one density");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw NormalizationError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw NormalizationError("mixture weights sum to " + std::to_string(total));
  }
  const int cutoff = densities.front().cutoff();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(basis_size(cutoff), basis_size(cutoff));
  double loss = 0.0;
  bool all_normalized = true;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require_same_cutoff(cutoff, densities[i].cutoff());
    acc += weights[i] * densities[i].matrix();
    loss += weights[i] * densities[i].truncation_loss();
    all_normalized = all_normalized && densities[i].is_normalized();
  }
  return DensityOperator(cutoff, std::move(acc),
                         all_normalized ? Normalization::Normalized : Normalization::Unnormalized,
                         loss);
}

double purity(const DensityOperator& rho) {
  // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

double mean_photon_number(const DensityOperator& rho) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < rho.matrix().rows(); ++i) {
    const auto b = basis_pair(static_cast<std::size_t>(i), rho.cutoff());
    total += (b.nx + b.ny) * rho.matrix()(i, i).real();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ladder operators

FockState apply_annihilation(const FockState& state, Mode mode) {
  const int c = state.cutoff();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.dimension());
  const auto& in = state.amplitudes();
  for (int nx = 0; nx <= c; ++nx) {
    for (int ny = 0; ny <= c; ++ny) {
      const int n = (mode == Mode::X) ? nx : ny;
      if (n == 0) continue;
      const int tx = (mode == Mode::X) ? nx - 1 : nx;
      const int ty = (mode == Mode::Y) ? ny - 1 : ny;
      out[static_cast<Eigen::Index>(basis_index(tx, ty, c))] +=
          std::sqrt(static_cast<double>(n)) *
          in[static_cast<Eigen::Index>(basis_index(nx, ny, c))];
    }
  }
  return FockState(c, std::move(out), Normalization::Unnormalized, state.truncation_loss());
}

FockState apply_creation(const FockState& state, Mode mode) {
  const int c = state.cutoff();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.dimension());
  const auto& in = state.amplitudes();
  double dropped = 0.0;
  for (int nx = 0; nx <= c; ++nx) {
    for (int ny = 0; ny <= c; ++ny) {
      const int n = (mode == Mode::X) ? nx : ny;
      const Complex amp = std::sqrt(static_cast<double>(n + 1)) *
                          in[static_cast<Eigen::Index>(basis_index(nx, ny, c))];
      if (n == c) {
        dropped += std::norm(amp);
        continue;
      }
      const int tx = (mode == Mode::X) ? nx + 1 : nx;
      const int ty = (mode == Mode::Y) ? ny + 1 : ny;
      out[static_cast<Eigen::Index>(basis_index(tx, ty, c))] = amp;
    }
  }
  return FockState(c, std::move(out), Normalization::Unnormalized,
                   state.truncation_loss() + dropped);
}

FockState apply_inverse_annihilation_x(const FockState& state) {
  const int c = state.cutoff();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.dimension());
  const auto& in = state.amplitudes();
  double dropped = 0.0;
  for (int nx = 0; nx <= c; ++nx) {
    const double factor = 1.0 / std::sqrt(static_cast<double>(nx + 1));
    for (int ny = 0; ny <= c; ++ny) {
      const Complex amp = factor * in[static_cast<Eigen::Index>(basis_index(nx, ny, c))];
      if (nx == c) {
        dropped += std::norm(amp);
        continue;
      }
      out[static_cast<Eigen::Index>(basis_index(nx + 1, ny, c))] = amp;
    }
  }
  return FockState(c, std::move(out), Normalization::Unnormalized,
                   state.truncation_loss() + dropped);
}

FockState apply_vacuum_projector(const FockState& state, Mode mode) {
  const int c = state.cutoff();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.dimension());
  for (int k = 0; k <= c; ++k) {
    const auto i = static_cast<Eigen::Index>(mode == Mode::X ? basis_index(0, k, c)
                                                             : basis_index(k, 0, c));
    out[i] = state.amplitudes()[i];
  }
  return FockState(c, std::move(out), Normalization::Unnormalized, state.truncation_loss());
}

DensityOperator apply_vacuum_projector(const DensityOperator& rho, Mode mode) {
  const int c = rho.cutoff();
  const auto dim = rho.dimension();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k <= c; ++k) {
    const auto i = static_cast<Eigen::Index>(mode == Mode::X ? basis_index(0, k, c)
                                                             : basis_index(k, 0, c));
    for (int l = 0; l <= c; ++l) {
      const auto j = static_cast<Eigen::Index>(mode == Mode::X ? basis_index(0, l, c)
                                                               : basis_index(l, 0, c));
      out(i, j) = rho.matrix()(i, j);
    }
  }
  return DensityOperator(c, std::move(out), Normalization::Unnormalized,
                         rho.truncation_loss());
}

Eigen::MatrixXcd annihilation_matrix(Mode mode, int cutoff) {
  require_cutoff(cutoff);
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; ny <= cutoff; ++ny) {
      const int n = (mode == Mode::X) ? nx : ny;
      if (n == 0) continue;
      const int tx = (mode == Mode::X) ? nx - 1 : nx;
      const int ty = (mode == Mode::Y) ? ny - 1 : ny;
      m(static_cast<Eigen::Index>(basis_index(tx, ty, cutoff)),
        static_cast<Eigen::Index>(basis_index(nx, ny, cutoff))) =
          std::sqrt(static_cast<double>(n));
    }
  }
  return m;
}

Eigen::MatrixXcd creation_matrix(Mode mode, int cutoff) {
  return annihilation_matrix(mode, cutoff).adjoint();
}

Eigen::MatrixXcd number_matrix(Mode mode, int cutoff) {
  require_cutoff(cutoff);
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto b = basis_pair(static_cast<std::size_t>(i), cutoff);
    m(i, i) = (mode == Mode::X) ? b.nx : b.ny;
  }
  return m;
}

Eigen::MatrixXcd vacuum_projector_matrix(Mode mode, int cutoff) {
  require_cutoff(cutoff);
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k <= cutoff; ++k) {
    const auto i = static_cast<Eigen::Index>(mode == Mode::X ? basis_index(0, k, cutoff)
                                                             : basis_index(k, 0, cutoff));
    m(i, i) = 1.0;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Moments

MomentValue normally_ordered_moment(const DensityOperator& rho, MomentOrder order) {
  if (order.p < 0 || order.q < 0 || order.r < 0 || order.s < 0) {
    throw ContractError("moment powers must be nonnegative");
  }
  const int c = rho.cutoff();
  const auto& m = rho.matrix();
  MomentValue result{};
  result.value = 0.0;
  // Tr[rho A] = sum_m <m|rho|A m>, and A|m> = coeff |target(m)>.
  for (int mx = order.r; mx <= c; ++mx) {
    for (int my = order.s; my <= c; ++my) {
      const int tx = mx - order.r + order.p;
      const int ty = my - order.s + order.q;
      const auto col = static_cast<Eigen::Index>(basis_index(mx, my, c));
      if (tx > c || ty > c) {
        result.dropped_weight += m(col, col).real();
        continue;
      }
      const double coeff = sqrt_falling_factorial(mx, order.r) *
                           sqrt_falling_factorial(my, order.s) *
                           sqrt_falling_factorial(tx, order.p) *
                           sqrt_falling_factorial(ty, order.q);
      result.value += coeff * m(col, static_cast<Eigen::Index>(basis_index(tx, ty, c)));
    }
  }
  result.truncated = std::max({order.p, order.q, order.r, order.s}) > c ||
                     result.dropped_weight > 1e-12;
  return result;
}

}  // namespace qpol
