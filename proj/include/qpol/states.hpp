#pragma once

// Constructors for the state families analysed by the engine, each realized
// exactly in the truncated Fock space.
//
// Mixed families are built from closed-form matrix elements. Their trace is
// 1 - tail, where the tail beyond the cutoff must stay below kMaxTailMass; the
// tail is carried in DensityOperator::truncation_loss() and never silently
// renormalized away.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qpol/fock.hpp"

namespace qpol {

inline constexpr double kMaxTailMass = 1e-12;

// Probability that a Poisson(mean) variable exceeds `cutoff`.
double poisson_tail(double mean, int cutoff);
// Probability that a geometric (thermal) variable with the given mean exceeds `cutoff`.
double thermal_tail(double mean, int cutoff);

// Pure coherent state |alpha_x, alpha_y>, renormalized after truncation.
// Throws CutoffTooSmallError if the discarded tail is >= kMaxTailMass.
FockState coherent_state(Complex alpha_x, Complex alpha_y, int cutoff);

// Both modes with amplitude sqrt(n0) and independent uniform phases:
// diagonal Poisson x Poisson.
DensityOperator phase_randomized_coherent(double n0, int cutoff);

// Amplitudes sqrt(n0) with anti-correlated phases theta_x = -theta_y, averaged:
// coherences survive only between basis states with equal n_x - n_y.
DensityOperator hidden_polarized(double n0, int cutoff);

/// Block weights B_n of an unpolarized state; sum_n (n+1) B_n = 1.
class UnpolarizedWeights {
 public:
  explicit UnpolarizedWeights(std::vector<double> weights);

  const std::vector<double>& values() const noexcept { return weights_; }
  // Largest n with B_n > 0 (0 for the vacuum).
  int max_photon_number() const;

 private:
  std::vector<double> weights_;
};

// rho = sum_n B_n sum_{r=0}^{n} |r, n-r><r, n-r|
DensityOperator unpolarized(const UnpolarizedWeights& weights, int cutoff);

// Product of two single-mode thermal states with the same mean photon number.
DensityOperator thermal_product(double mean, int cutoff);

// (1/3)|2,0> + (2/3)|1,1> + (2/3)|0,2>
FockState biphoton_qutrit(int cutoff = 2);

enum class FamilyKind {
  Coherent,
  PhaseRandomizedCoherent,
  HiddenPolarized,
  Unpolarized,
  ThermalProduct,
  BiphotonQutrit,
};

// File-level names: coherent, phase-randomized, hidden-polarized, unpolarized,
// thermal, qutrit.
std::string family_name(FamilyKind kind);
std::optional<FamilyKind> family_from_name(const std::string& name);

/// Declarative description of a state. Parameters per family:
///   coherent          alpha_x_re, alpha_y_re (required); alpha_x_im, alpha_y_im
///   phase-randomized  n0
///   hidden-polarized  n0
///   unpolarized       B0, B1, ... (missing entries are zero)
///   thermal           mean
///   qutrit            (none)
struct StateFamily {
  FamilyKind kind;
  std::map<std::string, double> params;
  std::optional<int> cutoff;

  friend bool operator==(const StateFamily&, const StateFamily&) = default;
};

// Throws ContractError when a required parameter is absent or an unknown one present.
void validate_family(const StateFamily& family);

// Multiplies the mean photon number by m (amplitudes by sqrt(m)).
// Throws UnsupportedError for families without an intensity scale.
StateFamily scale_intensity(const StateFamily& family, double m);

// Smallest cutoff whose truncation tail is below kMaxTailMass (or which holds
// the full support, for finite-support families).
int minimal_cutoff(const StateFamily& family);

using State = std::variant<FockState, DensityOperator>;

// Builds at family.cutoff if set, else at minimal_cutoff(family).
State build_state(const StateFamily& family);
bool is_pure_family(FamilyKind kind);

DensityOperator as_density(const State& state);
int cutoff_of(const State& state);

}  // namespace qpol
