#include "qpol/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qpol/error.hpp"

namespace qpol {

namespace {

void require_argument(double x) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError("Bessel argument must be finite and nonnegative, got " + std::to_string(x));
  }
}

// sum_{k >= first} (x/2)^{2k+m} / (k! (k+m)!)
double bessel_series(int m, double x, int first) {
  const double half = 0.5 * x;
  const double q = half * half;
  double term = (m == 0) ? 1.0 : half;  // k = 0 term
  for (int k = 0; k < first; ++k) term *= q / ((k + 1.0) * (k + 1.0 + m));
  double sum = 0.0;
  for (int k = first; k < 500; ++k) {
    sum += term;
    if (term <= sum * 1e-17) break;
    term *= q / ((k + 1.0) * (k + 1.0 + m));
  }
  return sum;
}

// e^{-x} I_m(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k prod_{j<=k}(4m^2 - (2j-1)^2) / (k! (8x)^k)
double bessel_scaled_asymptotic(int m, double x) {
  const double mu = 4.0 * m * m;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(next) >= std::abs(term)) break;  // series starts diverging
    term = next;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

BesselEval bessel_i(int order, double x) {
  if (order != 0 && order != 1) {
    throw DomainError("only Bessel orders 0 and 1 are supported, got " + std::to_string(order));
  }
  require_argument(x);
  BesselEval out{order, x, 0.0, 0.0, false};
  if (x <= kBesselSeriesLimit) {
    out.value = bessel_series(order, x, 0);
    out.scaled_value = std::exp(-x) * out.value;
    return out;
  }
  out.scaled_value = bessel_scaled_asymptotic(order, x);
  const double log_value = x + std::log(out.scaled_value);
  if (log_value >= std::log(std::numeric_limits<double>::max())) {
    out.value = std::numeric_limits<double>::infinity();
    out.overflow_saturated = true;
  } else {
    out.value = std::exp(log_value);
  }
  return out;
}

double ntilde_analytic(double n0, double chi) {
  if (!std::isfinite(n0) || n0 < 0.0) throw DomainError("n0 must be finite and nonnegative");
  if (n0 == 0.0) return 0.0;
  // I_0 is even and I_1 odd, so the bracket depends on |sin chi| only.
  const double s = std::abs(std::sin(chi));
  const double z = n0 * s;
  const auto i0 = bessel_i(0, z);
  const auto i1 = bessel_i(1, z);
  // e^{-n0} I(z) = e^{-n0 (1 - s)} e^{-z} I(z)
  return n0 * std::exp(-n0 * (1.0 - s)) * (i0.scaled_value + s * i1.scaled_value);
}

double ntilde_quadrature(double n0, double chi, double delta, int panels) {
  if (!std::isfinite(n0) || n0 < 0.0) throw DomainError("n0 must be finite and nonnegative");
  if (panels < 64) throw ContractError("quadrature needs at least 64 panels");
  const double s = std::sin(chi);
  const double h = 2.0 * std::numbers::pi / panels;
  double sum = 0.0;
  for (int j = 0; j < panels; ++j) {
    const double c = s * std::cos(j * h + delta);
    sum += n0 * (1.0 + c) * std::exp(n0 * (c - 1.0));
  }
  return sum / panels;
}

double dop_second_analytic(double n0) {
  if (!std::isfinite(n0) || n0 < 0.0) throw DomainError("n0 must be finite and nonnegative");
  if (n0 <= kBesselSeriesLimit) {
    // I - 1 summed without the leading 1 of I_0, exact as n0 -> 0.
    const double excess = bessel_series(0, n0, 1) + bessel_series(1, n0, 0);
    return excess / (excess + 2.0);
  }
  const double i0 = bessel_i(0, n0).scaled_value;
  const double i1 = bessel_i(1, n0).scaled_value;
  const double decay = std::exp(-n0);
  return 1.0 - 2.0 * decay / (i0 + i1 + decay);
}

double fourth_moment_analytic(double a0_squared, double theta) {
  return 0.25 * a0_squared * a0_squared * (5.0 - std::cos(4.0 * theta));
}

}  // namespace qpol
