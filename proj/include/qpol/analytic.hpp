#pragma once

// Closed-form intensities and DOP for the phase-randomized coherent state,
// and the modified Bessel functions I_0, I_1 they are built on.

namespace qpol {

struct BesselEval {
  int order;
  double x;
  double value;          // I_m(x); +inf when overflow_saturated
  double scaled_value;   // e^{-x} I_m(x), always finite
  bool overflow_saturated;
};

// Below this argument the power series is summed; above it the exponentially
// scaled asymptotic expansion is used.
inline constexpr double kBesselSeriesLimit = 20.0;

// I_m(x) for m in {0, 1}, x >= 0. Throws DomainError otherwise.
BesselEval bessel_i(int order, double x);

// n0 e^{-n0} [I_0(n0 sin chi) + sin chi I_1(n0 sin chi)], evaluated through
// scaled Bessel values so it stays finite for very large n0.
double ntilde_analytic(double n0, double chi);

// Trapezoidal rule over the relative phase theta in [0, 2 pi) of
//   n0 [1 + sin chi cos(theta + delta)] e^{-n0} e^{n0 sin chi cos(theta + delta)}.
// Requires panels >= 64.
double ntilde_quadrature(double n0, double chi, double delta, int panels = 512);

// (I(n0) - 1) / (I(n0) + 1) with I = I_0 + I_1.
double dop_second_analytic(double n0);

// (A0^4 / 4)(5 - cos 4 theta), taking A0^2 as input.
double fourth_moment_analytic(double a0_squared, double theta);

}  // namespace qpol
