#pragma once

// Intensity functionals over the Poincare sphere, their extremization, the two
// degree-of-polarization definitions built on them, and the perfect
// polarization criterion a_y|psi> = p a_x|psi>.

#include <functional>
#include <string>

#include "qpol/fock.hpp"
#include "qpol/polarization.hpp"

namespace qpol {

enum class DopMethod {
  First,   // <N_v>
  Second,  // <N_v V_{v_perp}>: mean count along v with the orthogonal mode empty
};

std::string method_name(DopMethod method);

// |eps_x|^2 <a_x^+ a_x> + |eps_y|^2 <a_y^+ a_y> + eps_x eps_y^* <a_x^+ a_y> + c.c.
double intensity_first(const DensityOperator& rho, const PolarizationVector& v);

// sum_{n=1}^{cutoff} n <n,0|rho|n,0> in the (v, v_perp) basis.
double intensity_second(const DensityOperator& rho, const PolarizationVector& v);

// Precomputed intensity as a function of direction, for repeated evaluation.
class IntensitySurface {
 public:
  IntensitySurface(const DensityOperator& rho, DopMethod method);
  double operator()(const PolarizationVector& v) const { return eval_(v); }
  DopMethod method() const noexcept { return method_; }

 private:
  DopMethod method_;
  std::function<double(const PolarizationVector&)> eval_;
};

struct GridResolution {
  int n_chi = 64;
  int n_delta = 64;
};

inline constexpr double kDefaultRefineTol = 1e-10;
// Below this value of max + min the DOP is reported as 0 and flagged degenerate.
inline constexpr double kDegenerateFloor = 1e-14;

struct DopReport {
  DopMethod method;
  double max_intensity;
  double min_intensity;
  PolarizationVector argmax;
  PolarizationVector argmin;
  double dop;
  bool degenerate;
  GridResolution grid;
  int refinement_iterations;
};

// Coarse scan of chi in [0, pi] x delta in (-pi, pi], then alternating
// golden-section refinement of the best cells until the intensity changes by
// less than refine_tol between sweeps.
DopReport extremize_intensity(const DensityOperator& rho, DopMethod method,
                              GridResolution grid = {}, double refine_tol = kDefaultRefineTol);

DopReport dop_first(const DensityOperator& rho);
DopReport dop_second(const DensityOperator& rho);

enum class IndexKind {
  Finite,       // p is a finite complex number
  YPolarized,   // a_x|psi> = 0 but a_y|psi> != 0: p is infinite
  Vacuum,       // both vanish; p undefined
};

struct PolarizationIndexResult {
  bool polarized;
  IndexKind kind;
  Complex p;        // NaN unless kind == Finite
  double residual;  // ||w - p u||, divided by ||w|| when ||w|| > 1
  double ratio;     // |p|: ratio of real amplitudes
  double phase;     // arg p: phase difference
};

inline constexpr double kDefaultPolarizationTol = 1e-10;

// Least-squares test of a_y|psi> = p a_x|psi>. Requires a normalized state.
PolarizationIndexResult perfect_polarization_index(const FockState& psi,
                                                   double tol = kDefaultPolarizationTol);

// Mixed-state form a_y rho = p a_x rho, least squares in the Frobenius norm.
PolarizationIndexResult perfect_polarization_index(const DensityOperator& rho,
                                                   double tol = kDefaultPolarizationTol);

// || a_x^{-1} a_y |psi> - p (1 - V_x)|psi> ||
double polarization_operator_residual(const FockState& psi, Complex p);

}  // namespace qpol
