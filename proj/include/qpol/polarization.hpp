#pragma once

// Poincare-sphere directions, the SU(2) change of mode basis and Fock vectors
// expressed in a rotated polarization basis.

#include <Eigen/Dense>

#include "qpol/fock.hpp"

namespace qpol {

/// A point (chi, delta) on the Poincare sphere with components
///   eps_x = cos(chi/2) e^{-i delta/2},   eps_y = sin(chi/2) e^{+i delta/2}.
///
/// Any real (chi, delta) is accepted and canonicalized to chi in [0, pi],
/// delta in (-pi, pi]; at the poles delta is set to 0. Canonicalization only
/// changes the global phase of the components.
class PolarizationVector {
 public:
  PolarizationVector(double chi, double delta);

  static PolarizationVector x_axis() { return {0.0, 0.0}; }
  static PolarizationVector y_axis();

  double chi() const noexcept { return chi_; }
  double delta() const noexcept { return delta_; }
  Complex eps_x() const noexcept { return eps_x_; }
  Complex eps_y() const noexcept { return eps_y_; }

 private:
  double chi_;
  double delta_;
  Complex eps_x_;
  Complex eps_y_;
};

struct PolarizationComponents {
  Complex x;
  Complex y;
};

// Partner (-sin(chi/2) e^{-i delta/2}, cos(chi/2) e^{i delta/2}); orthonormal to v
// and chosen so the basis-change matrix has unit determinant.
PolarizationComponents orthogonal_vector(const PolarizationVector& v);

// The antipodal sphere point, i.e. the orthogonal direction as a PolarizationVector.
PolarizationVector antipode(const PolarizationVector& v);

// Rows map (a_x, a_y) onto (a_eps, a_eps_perp):
//   a_eps = eps_x^* a_x + eps_y^* a_y,   a_perp = perp_x^* a_x + perp_y^* a_y.
Eigen::Matrix2cd transform_annihilation_coefficients(const PolarizationVector& v);

struct RotatedFockVector {
  int n;
  PolarizationVector direction;
  // sum_k sqrt(C(n,k)) eps_x^k eps_y^{n-k} |k, n-k>
  FockState expansion;
};

// |n photons along v, vacuum in the orthogonal mode>. Throws OutOfRangeError if n > cutoff.
RotatedFockVector rotated_fock_vector(int n, const PolarizationVector& v, int cutoff);

// Columns are the two-mode Fock states |j, k> of the (v, v_perp) mode basis,
// expanded in the (x, y) basis, for every j + k <= cutoff. On basis states with
// n_x + n_y > cutoff (whose rotated images leave the truncated space) the
// matrix acts as the identity, so the result is always unitary.
Eigen::MatrixXcd mode_rotation_matrix(const PolarizationVector& v, int cutoff);

// The state as described in the (v, v_perp) basis: W^dagger rho W with W from
// mode_rotation_matrix. Its x mode is the v mode of the input.
DensityOperator to_polarization_basis(const DensityOperator& rho, const PolarizationVector& v);

struct StokesParameters {
  double s0;
  double s1;
  double s2;
  double s3;
};

StokesParameters stokes_parameters(const DensityOperator& rho);

}  // namespace qpol
