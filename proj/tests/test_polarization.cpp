#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qpol/dop.hpp"
#include "qpol/error.hpp"
#include "qpol/fock.hpp"
#include "qpol/polarization.hpp"
#include "qpol/states.hpp"
#include "support.hpp"

using namespace qpol;
using std::numbers::pi;

namespace {

// |<a|b>| = 1 for unit vectors equal up to a global phase.
double phase_free_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return std::abs(1.0 - std::abs(a.dot(b)));
}

// (eps_x a_x^dagger + eps_y a_y^dagger)^n |0> / sqrt(n!) from dense creation matrices.
Eigen::VectorXcd rotated_by_matrices(int n, const PolarizationVector& v, int cutoff) {
  const Eigen::MatrixXcd c = v.eps_x() * creation_matrix(Mode::X, cutoff) +
                             v.eps_y() * creation_matrix(Mode::Y, cutoff);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(basis_size(cutoff));
  s(0) = 1.0;
  for (int k = 1; k <= n; ++k) s = c * s / std::sqrt(static_cast<double>(k));
  return s;
}

}  // namespace

TEST_CASE("polarization vector components and canonical form") {
  std::mt19937 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto v = qpol::testing::random_direction(rng);
    CHECK(std::abs(std::norm(v.eps_x()) + std::norm(v.eps_y()) - 1.0) < 1e-14);
    CHECK(v.chi() >= 0.0);
    CHECK(v.chi() <= pi);
    CHECK(v.delta() > -pi);
    CHECK(v.delta() <= pi);
  }
  const PolarizationVector v(pi / 3, 0.7);
  CHECK(std::abs(v.eps_x() - std::polar(std::cos(pi / 6), -0.35)) < 1e-15);
  CHECK(std::abs(v.eps_y() - std::polar(std::sin(pi / 6), 0.35)) < 1e-15);

  SUBCASE("wrapping only changes a global phase") {
    const PolarizationVector a(1.1, 0.4);
    for (const PolarizationVector& b :
         {PolarizationVector(1.1, 0.4 + 2 * pi), PolarizationVector(-1.1, 0.4 - pi),
          PolarizationVector(1.1, 0.4 - 4 * pi)}) {
      CHECK(b.chi() == doctest::Approx(a.chi()).epsilon(1e-14));
      CHECK(b.delta() == doctest::Approx(a.delta()).epsilon(1e-12));
      CHECK(std::abs(std::abs(std::conj(a.eps_x()) * b.eps_x() + std::conj(a.eps_y()) * b.eps_y()) -
                     1.0) < 1e-14);
    }
  }
  SUBCASE("poles carry delta = 0") {
    CHECK(PolarizationVector(0.0, 2.0).delta() == 0.0);
    CHECK(PolarizationVector(pi, -1.0).delta() == 0.0);
    CHECK(PolarizationVector::y_axis().chi() == pi);
  }
}

TEST_CASE("orthogonal partner") {
  SUBCASE("x axis pairs with y") {
    const auto p = orthogonal_vector(PolarizationVector::x_axis());
    CHECK(std::abs(p.x) < 1e-16);
    CHECK(std::abs(std::abs(p.y) - 1.0) < 1e-16);
  }
  SUBCASE("diagonal pairs with anti-diagonal") {
    const auto p = orthogonal_vector(PolarizationVector(pi / 2, 0.0));
    CHECK(std::abs(p.x + p.y) < 1e-15);
    CHECK(std::abs(std::abs(p.x) - 1.0 / std::sqrt(2.0)) < 1e-15);
  }
  SUBCASE("orthonormal for random directions") {
    std::mt19937 rng(22);
    for (int t = 0; t < 100; ++t) {
      const auto v = qpol::testing::random_direction(rng);
      const auto p = orthogonal_vector(v);
      CHECK(std::abs(std::conj(v.eps_x()) * p.x + std::conj(v.eps_y()) * p.y) < 1e-14);
      CHECK(std::abs(std::norm(p.x) + std::norm(p.y) - 1.0) < 1e-14);
      const auto a = antipode(v);
      CHECK(std::abs(std::abs(std::conj(a.eps_x()) * p.x + std::conj(a.eps_y()) * p.y) - 1.0) <
            1e-14);
    }
  }
}

TEST_CASE("annihilation-operator basis change") {
  SUBCASE("x axis gives the identity") {
    const Eigen::Matrix2cd t = transform_annihilation_coefficients(PolarizationVector::x_axis());
    CHECK((t - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
  }
  SUBCASE("y axis swaps the modes up to phase") {
    const Eigen::Matrix2cd t = transform_annihilation_coefficients(PolarizationVector(pi, 0.0));
    CHECK(std::abs(t(0, 0)) < 1e-15);
    CHECK(std::abs(t(1, 1)) < 1e-15);
    CHECK(std::abs(std::abs(t(0, 1)) - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(t(1, 0)) - 1.0) < 1e-15);
  }
  SUBCASE("unitary with unit determinant") {
    std::mt19937 rng(23);
    for (int t = 0; t < 100; ++t) {
      const Eigen::Matrix2cd m = transform_annihilation_coefficients(qpol::testing::random_direction(rng));
      CHECK((m * m.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
      CHECK(std::abs(m.determinant() - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("rotated Fock vectors") {
  SUBCASE("zero photons is the vacuum") {
    const auto r = rotated_fock_vector(0, PolarizationVector(1.0, 2.0), 3);
    CHECK(std::abs(r.expansion.amplitude(0, 0) - 1.0) < 1e-15);
    CHECK(r.expansion.norm() == doctest::Approx(1.0));
  }
  SUBCASE("two photons along x") {
    const auto r = rotated_fock_vector(2, PolarizationVector::x_axis(), 3);
    CHECK(std::abs(std::abs(r.expansion.amplitude(2, 0)) - 1.0) < 1e-15);
  }
  SUBCASE("one diagonal photon") {
    const auto r = rotated_fock_vector(1, PolarizationVector(pi / 2, 0.0), 2);
    const auto expected =
        make_pure_state({{1, 0, 1.0 / std::sqrt(2.0)}, {0, 1, 1.0 / std::sqrt(2.0)}}, 2, false);
    CHECK(phase_free_distance(r.expansion.amplitudes(), expected.amplitudes()) < 1e-15);
  }
  SUBCASE("agrees with rotated creation operators on the vacuum") {
    std::mt19937 rng(24);
    for (int t = 0; t < 10; ++t) {
      const auto v = qpol::testing::random_direction(rng);
      for (int n = 0; n <= 5; ++n) {
        const auto r = rotated_fock_vector(n, v, 5);
        CHECK((r.expansion.amplitudes() - rotated_by_matrices(n, v, 5)).norm() < 1e-13);
        for (int nx = 0; nx <= 5; ++nx)
          for (int ny = 0; ny <= 5; ++ny)
            if (nx + ny != n) CHECK(r.expansion.amplitude(nx, ny) == Complex(0.0));
      }
    }
  }
  SUBCASE("orthonormal family with complete coefficients") {
    const PolarizationVector v(0.9, -2.2);
    for (int m = 0; m <= 6; ++m) {
      const auto a = rotated_fock_vector(m, v, 6).expansion;
      CHECK(std::abs(a.squared_norm() - 1.0) < 1e-14);
      for (int n = 0; n <= 6; ++n) {
        const auto b = rotated_fock_vector(n, v, 6).expansion;
        CHECK(std::abs(inner(a, b) - (m == n ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(rotated_fock_vector(4, PolarizationVector::x_axis(), 3), OutOfRangeError);
}

TEST_CASE("mode rotation matrix") {
  std::mt19937 rng(25);
  for (int t = 0; t < 5; ++t) {
    const auto v = qpol::testing::random_direction(rng);
    const Eigen::MatrixXcd w = mode_rotation_matrix(v, 4);
    CHECK((w * w.adjoint() - Eigen::MatrixXcd::Identity(w.rows(), w.cols())).norm() < 1e-12);
    const auto r = rotated_fock_vector(3, v, 4);
    CHECK((w.col(static_cast<Eigen::Index>(basis_index(3, 0, 4))) - r.expansion.amplitudes()).norm() <
          1e-13);
  }
}

TEST_CASE("Stokes parameters") {
  SUBCASE("single x photon") {
    const auto s = stokes_parameters(density_from_pure(make_pure_state({{1, 0, 1.0}}, 1, false)));
    CHECK(s.s0 == doctest::Approx(1.0));
    CHECK(s.s1 == doctest::Approx(1.0));
    CHECK(std::abs(s.s2) < 1e-15);
    CHECK(std::abs(s.s3) < 1e-15);
  }
  SUBCASE("circular photon has S3 = +-1") {
    const auto psi = make_pure_state({{1, 0, 1.0 / std::sqrt(2.0)}, {0, 1, Complex(0, 1.0 / std::sqrt(2.0))}}, 1, false);
    const auto s = stokes_parameters(density_from_pure(psi));
    CHECK(std::abs(std::abs(s.s3) - 1.0) < 1e-14);
    CHECK(std::abs(s.s1) < 1e-14);
  }
  SUBCASE("phase-randomized and hidden-polarized light look unpolarized") {
    for (const auto& rho : {phase_randomized_coherent(1.0, 25), hidden_polarized(1.0, 25)}) {
      const auto s = stokes_parameters(rho);
      CHECK(s.s0 == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(std::abs(s.s1) < 1e-10);
      CHECK(std::abs(s.s2) < 1e-10);
      CHECK(std::abs(s.s3) < 1e-10);
    }
    const auto m = normally_ordered_moment(hidden_polarized(1.0, 25), {0, 0, 1, 1});
    CHECK(std::abs(m.value - 1.0) < 1e-10);
  }
}

TEST_CASE("first intensity is covariant under the mode change") {
  std::mt19937 rng(26);
  for (int t = 0; t < 10; ++t) {
    const auto rho = qpol::testing::random_density(rng, 3);
    const auto v = qpol::testing::random_direction(rng);
    const auto in_v_basis = to_polarization_basis(rho, v);
    CHECK(std::abs(intensity_first(rho, v) -
                   intensity_first(in_v_basis, PolarizationVector::x_axis())) < 1e-10);
    CHECK(std::abs(intensity_second(rho, v) -
                   intensity_second(in_v_basis, PolarizationVector::x_axis())) < 1e-10);
  }
}
