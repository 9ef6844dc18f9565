#include "qpol/polarization.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qpol/error.hpp"

namespace qpol {

namespace {

constexpr double kPi = std::numbers::pi;

// Wrap into (-pi, pi].
double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

std::vector<double> binomial_row(int n) {
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k < n; ++k) {
    // C(n,k) = C(n,k-1) (n-k+1)/k
    row[static_cast<std::size_t>(k)] =
        row[static_cast<std::size_t>(k) - 1] * (n - k + 1) / static_cast<double>(k);
  }
  return row;
}

// Integer powers of a complex number, exact for small exponents and stable
// where std::pow(complex, int) would go through log/exp.
std::vector<Complex> powers(Complex z, int n) {
  std::vector<Complex> out(static_cast<std::size_t>(n) + 1);
  out[0] = 1.0;
  for (int k = 1; k <= n; ++k) out[static_cast<std::size_t>(k)] = out[static_cast<std::size_t>(k) - 1] * z;
  return out;
}

}  // namespace

PolarizationVector::PolarizationVector(double chi, double delta) {
  if (!std::isfinite(chi) || !std::isfinite(delta)) {
    throw DomainError("polarization angles must be finite");
  }
  // chi -> -chi is the same direction with delta shifted by pi.
  double c = wrap_angle(chi);
  double d = delta;
  if (c < 0.0) {
    c = -c;
    d += kPi;
  }
  d = wrap_angle(d);
  if (c == 0.0 || c == kPi) d = 0.0;
  chi_ = c;
  delta_ = d;
  eps_x_ = std::cos(chi_ / 2.0) * std::polar(1.0, -delta_ / 2.0);
  eps_y_ = std::sin(chi_ / 2.0) * std::polar(1.0, delta_ / 2.0);
}

PolarizationVector PolarizationVector::y_axis() { return {kPi, 0.0}; }

PolarizationComponents orthogonal_vector(const PolarizationVector& v) {
  const double c = std::cos(v.chi() / 2.0);
  const double s = std::sin(v.chi() / 2.0);
  return {-s * std::polar(1.0, -v.delta() / 2.0), c * std::polar(1.0, v.delta() / 2.0)};
}

PolarizationVector antipode(const PolarizationVector& v) {
  return {kPi - v.chi(), v.delta() + kPi};
}

Eigen::Matrix2cd transform_annihilation_coefficients(const PolarizationVector& v) {
  const auto perp = orthogonal_vector(v);
  Eigen::Matrix2cd t;
  t << std::conj(v.eps_x()), std::conj(v.eps_y()),
       std::conj(perp.x), std::conj(perp.y);
  return t;
}

RotatedFockVector rotated_fock_vector(int n, const PolarizationVector& v, int cutoff) {
  if (n < 0 || n > cutoff) {
    throw OutOfRangeError("photon count " + std::to_string(n) + " outside cutoff " +
                          std::to_string(cutoff));
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(basis_size(cutoff));
  const auto binom = binomial_row(n);
  const auto px = powers(v.eps_x(), n);
  const auto py = powers(v.eps_y(), n);
  for (int k = 0; k <= n; ++k) {
    amps[static_cast<Eigen::Index>(basis_index(k, n - k, cutoff))] =
        std::sqrt(binom[static_cast<std::size_t>(k)]) * px[static_cast<std::size_t>(k)] *
        py[static_cast<std::size_t>(n - k)];
  }
  return {n, v, FockState(cutoff, std::move(amps), Normalization::Normalized)};
}

Eigen::MatrixXcd mode_rotation_matrix(const PolarizationVector& v, int cutoff) {
  if (cutoff < 0) throw OutOfRangeError("cutoff must be nonnegative");
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
  const auto perp = orthogonal_vector(v);

  // log-factorials for sqrt(a! b! / (j! k!)) without overflow.
  std::vector<double> log_fact(static_cast<std::size_t>(cutoff) + 2, 0.0);
  for (int i = 1; i <= cutoff + 1; ++i) {
    log_fact[static_cast<std::size_t>(i)] =
        log_fact[static_cast<std::size_t>(i) - 1] + std::log(static_cast<double>(i));
  }
  const auto lf = [&](int i) { return log_fact[static_cast<std::size_t>(i)]; };

  const auto ex = powers(v.eps_x(), cutoff);
  const auto ey = powers(v.eps_y(), cutoff);
  const auto qx = powers(perp.x, cutoff);
  const auto qy = powers(perp.y, cutoff);

  // (eps.a^dag)^j (perp.a^dag)^k |0> / sqrt(j! k!), expanded binomially.
  for (int j = 0; j <= cutoff; ++j) {
    const auto bj = binomial_row(j);
    for (int k = 0; j + k <= cutoff; ++k) {
      const auto bk = binomial_row(k);
      const auto col = static_cast<Eigen::Index>(basis_index(j, k, cutoff));
      w.col(col).setZero();
      const int n = j + k;
      for (int a = 0; a <= j; ++a) {
        for (int b = 0; b <= k; ++b) {
          const int nx = a + b;
          const int ny = n - nx;
          const double scale =
              bj[static_cast<std::size_t>(a)] * bk[static_cast<std::size_t>(b)] *
              std::exp(0.5 * (lf(nx) + lf(ny) - lf(j) - lf(k)));
          w(static_cast<Eigen::Index>(basis_index(nx, ny, cutoff)), col) +=
              scale * ex[static_cast<std::size_t>(a)] * ey[static_cast<std::size_t>(j - a)] *
              qx[static_cast<std::size_t>(b)] * qy[static_cast<std::size_t>(k - b)];
        }
      }
    }
  }
  return w;
}

DensityOperator to_polarization_basis(const DensityOperator& rho, const PolarizationVector& v) {
  const Eigen::MatrixXcd w = mode_rotation_matrix(v, rho.cutoff());
  Eigen::MatrixXcd out = w.adjoint() * rho.matrix() * w;
  // Restore exact Hermiticity lost to rounding in the triple product.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator(rho.cutoff(), std::move(out),
                         rho.is_normalized() ? Normalization::Normalized
                                             : Normalization::Unnormalized,
                         rho.truncation_loss());
}

StokesParameters stokes_parameters(const DensityOperator& rho) {
  const double nx = normally_ordered_moment(rho, {1, 0, 1, 0}).value.real();
  const double ny = normally_ordered_moment(rho, {0, 1, 0, 1}).value.real();
  // <a_x^dag a_y>; S2 = 2 Re, S3 = i(<a_y^dag a_x> - <a_x^dag a_y>) = 2 Im.
  const Complex cross = normally_ordered_moment(rho, {1, 0, 0, 1}).value;
  return {nx + ny, nx - ny, 2.0 * cross.real(), 2.0 * cross.imag()};
}

}  // namespace qpol
