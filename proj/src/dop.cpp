#include "qpol/dop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "qpol/error.hpp"

namespace qpol {

namespace {

constexpr double kPi = std::numbers::pi;

struct FirstMoments {
  double nx;
  double ny;
  Complex cross;  // <a_x^+ a_y>
};

FirstMoments first_moments(const DensityOperator& rho) {
  return {normally_ordered_moment(rho, {1, 0, 1, 0}).value.real(),
          normally_ordered_moment(rho, {0, 1, 0, 1}).value.real(),
          normally_ordered_moment(rho, {1, 0, 0, 1}).value};
}

double eval_first(const FirstMoments& m, const PolarizationVector& v) {
  const Complex ex = v.eps_x();
  const Complex ey = v.eps_y();
  return std::norm(ex) * m.nx + std::norm(ey) * m.ny +
         2.0 * (ex * std::conj(ey) * m.cross).real();
}

// Blocks of rho on the fixed-total-photon manifolds n = 1..cutoff, in the
// basis |k, n-k>, k = 0..n, with the sqrt(C(n,k)) factors folded in.
struct ManifoldBlocks {
  std::vector<Eigen::MatrixXcd> blocks;  // blocks[n]
};

ManifoldBlocks manifold_blocks(const DensityOperator& rho) {
  const int c = rho.cutoff();
  ManifoldBlocks out;
  out.blocks.resize(static_cast<std::size_t>(c) + 1);
  for (int n = 1; n <= c; ++n) {
    std::vector<double> root_binom(static_cast<std::size_t>(n) + 1, 1.0);
    double b = 1.0;
    for (int k = 0; k <= n; ++k) {
      root_binom[static_cast<std::size_t>(k)] = std::sqrt(b);
      b = b * (n - k) / (k + 1.0);
    }
    Eigen::MatrixXcd block(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
      const auto i = static_cast<Eigen::Index>(basis_index(k, n - k, c));
      for (int l = 0; l <= n; ++l) {
        const auto j = static_cast<Eigen::Index>(basis_index(l, n - l, c));
        block(k, l) = root_binom[static_cast<std::size_t>(k)] *
                      root_binom[static_cast<std::size_t>(l)] * rho.matrix()(i, j);
      }
    }
    out.blocks[static_cast<std::size_t>(n)] = std::move(block);
  }
  return out;
}

double eval_second(const ManifoldBlocks& mb, const PolarizationVector& v) {
  const int c = static_cast<int>(mb.blocks.size()) - 1;
  if (c < 1) return 0.0;
  std::vector<Complex> px(static_cast<std::size_t>(c) + 1);
  std::vector<Complex> py(static_cast<std::size_t>(c) + 1);
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= c; ++k) {
    px[static_cast<std::size_t>(k)] = px[static_cast<std::size_t>(k) - 1] * v.eps_x();
    py[static_cast<std::size_t>(k)] = py[static_cast<std::size_t>(k) - 1] * v.eps_y();
  }
  double total = 0.0;
  Eigen::VectorXcd vec;
  for (int n = 1; n <= c; ++n) {
    vec.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
      vec[k] = px[static_cast<std::size_t>(k)] * py[static_cast<std::size_t>(n - k)];
    }
    const auto& block = mb.blocks[static_cast<std::size_t>(n)];
    total += n * vec.dot(block * vec).real();
  }
  return total;
}

struct Point {
  double chi;
  double delta;
  double value;  // signed objective: larger is better
};

using Objective = std::function<double(double, double)>;

constexpr double kGoldenTolerance = 1e-9;

// Maximizes g on [a, b]; the incumbent (t0, g0) is kept unless beaten.
std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b,
                                     double t0, double g0) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double best_t = t0;
  double best_g = g0;
  const auto consider = [&](double t, double val) {
    if (val > best_g) {
      best_g = val;
      best_t = t;
    }
  };
  consider(a, g(a));
  consider(b, g(b));
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  while (b - a > kGoldenTolerance) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
  }
  consider(c, gc);
  consider(d, gd);
  return {best_t, best_g};
}

Point refine(const Objective& f, Point start, double h_chi, double h_delta, double tol,
             int& iterations) {
  Point cur = start;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double previous = cur.value;
    auto [chi, vc] = golden_max([&](double t) { return f(t, cur.delta); }, cur.chi - h_chi,
                                cur.chi + h_chi, cur.chi, cur.value);
    cur.chi = chi;
    cur.value = vc;
    auto [delta, vd] = golden_max([&](double t) { return f(cur.chi, t); },
                                  cur.delta - h_delta, cur.delta + h_delta, cur.delta,
                                  cur.value);
    cur.delta = delta;
    cur.value = vd;
    ++iterations;
    if (cur.value - previous < tol) break;
  }
  return cur;
}

// Replaces a near-pole optimum by the pole itself when that costs at most tol.
Point snap_to_pole(const Objective& f, Point p, double tol) {
  const PolarizationVector v(p.chi, p.delta);
  for (double pole : {0.0, kPi}) {
    if (std::abs(v.chi() - pole) < 1e-6) {
      const double at_pole = f(pole, 0.0);
      if (at_pole >= p.value - tol) return {pole, 0.0, at_pole};
    }
  }
  return {v.chi(), v.delta(), p.value};
}

std::vector<double> evaluate_grid(const Objective& f, const std::vector<double>& chis,
                                  const std::vector<double>& deltas) {
  const std::size_t rows = chis.size();
  const std::size_t cols = deltas.size();
  std::vector<double> values(rows * cols);
  const auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const bool pole = (i == 0 || i + 1 == rows);
      const double at_pole = pole ? f(chis[i], 0.0) : 0.0;
      for (std::size_t j = 0; j < cols; ++j) {
        values[i * cols + j] = pole ? at_pole : f(chis[i], deltas[j]);
      }
    }
  };
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, rows);
  if (workers == 1) {
    fill_rows(0, rows);
    return values;
  }
  std::vector<std::jthread> threads;
  const std::size_t chunk = (rows + workers - 1) / workers;
  for (std::size_t begin = 0; begin < rows; begin += chunk) {
    threads.emplace_back(fill_rows, begin, std::min(rows, begin + chunk));
  }
  threads.clear();  // joins
  return values;
}

// Best `count` grid cells for the signed objective, poles counted once.
std::vector<Point> best_cells(const std::vector<double>& values, const std::vector<double>& chis,
                              const std::vector<double>& deltas, double sign, std::size_t count) {
  std::vector<Point> cells;
  const std::size_t rows = chis.size();
  const std::size_t cols = deltas.size();
  for (std::size_t i = 0; i < rows; ++i) {
    const bool pole = (i == 0 || i + 1 == rows);
    for (std::size_t j = 0; j < (pole ? 1 : cols); ++j) {
      cells.push_back({chis[i], pole ? 0.0 : deltas[j], sign * values[i * cols + j]});
    }
  }
  count = std::min(count, cells.size());
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(count),
                    cells.end(), [](const Point& a, const Point& b) { return a.value > b.value; });
  cells.resize(count);
  return cells;
}

}  // namespace

std::string method_name(DopMethod method) {
  return method == DopMethod::First ? "first" : "second";
}

double intensity_first(const DensityOperator& rho, const PolarizationVector& v) {
  return eval_first(first_moments(rho), v);
}

double intensity_second(const DensityOperator& rho, const PolarizationVector& v) {
  return eval_second(manifold_blocks(rho), v);
}

IntensitySurface::IntensitySurface(const DensityOperator& rho, DopMethod method)
    : method_(method) {
  if (method == DopMethod::First) {
    eval_ = [m = first_moments(rho)](const PolarizationVector& v) { return eval_first(m, v); };
  } else {
    eval_ = [mb = manifold_blocks(rho)](const PolarizationVector& v) {
      return eval_second(mb, v);
    };
  }
}

DopReport extremize_intensity(const DensityOperator& rho, DopMethod method,
                              GridResolution grid, double refine_tol) {
  if (grid.n_chi < 2 || grid.n_delta < 1) {
    throw ContractError("grid needs at least 2 polar and 1 azimuthal points");
  }
  if (!(refine_tol > 0.0)) throw ContractError("refine_tol must be positive");

  const IntensitySurface surface(rho, method);
  const auto intensity = [&](double chi, double delta) {
    return surface(PolarizationVector(chi, delta));
  };

  std::vector<double> chis(static_cast<std::size_t>(grid.n_chi));
  std::vector<double> deltas(static_cast<std::size_t>(grid.n_delta));
  for (int i = 0; i < grid.n_chi; ++i) chis[static_cast<std::size_t>(i)] = kPi * i / (grid.n_chi - 1);
  for (int j = 0; j < grid.n_delta; ++j) {
    deltas[static_cast<std::size_t>(j)] = -kPi + 2.0 * kPi * (j + 1) / grid.n_delta;
  }
  const auto values = evaluate_grid(intensity, chis, deltas);
  const double h_chi = kPi / (grid.n_chi - 1);
  const double h_delta = 2.0 * kPi / grid.n_delta;

  int iterations = 0;
  const auto search = [&](double sign) {
    const Objective f = [&](double chi, double delta) { return sign * intensity(chi, delta); };
    Point best{0.0, 0.0, -std::numeric_limits<double>::infinity()};
    for (const auto& seed : best_cells(values, chis, deltas, sign, 4)) {
      const Point p = refine(f, seed, h_chi, h_delta, refine_tol, iterations);
      if (p.value > best.value) best = p;
    }
    best = snap_to_pole(f, best, refine_tol);
    best.value *= sign;
    return best;
  };
  const Point hi = search(+1.0);
  const Point lo = search(-1.0);

  const double max_i = std::max(hi.value, 0.0);
  const double min_i = std::clamp(lo.value, 0.0, max_i);
  const bool degenerate = max_i + min_i < kDegenerateFloor;
  const double dop = degenerate ? 0.0 : std::clamp((max_i - min_i) / (max_i + min_i), 0.0, 1.0);
  return DopReport{method,
                   max_i,
                   min_i,
                   PolarizationVector(hi.chi, hi.delta),
                   PolarizationVector(lo.chi, lo.delta),
                   dop,
                   degenerate,
                   grid,
                   iterations};
}

DopReport dop_first(const DensityOperator& rho) {
  return extremize_intensity(rho, DopMethod::First);
}

DopReport dop_second(const DensityOperator& rho) {
  return extremize_intensity(rho, DopMethod::Second);
}

// ---------------------------------------------------------------------------
// Perfect polarization

namespace {

PolarizationIndexResult classify(double norm_u, double norm_w, Complex uw, double uu,
                                 const std::function<double(Complex)>& residual_of, double tol) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (norm_u > tol) {
    const Complex p = uw / uu;
    double residual = residual_of(p);
    if (norm_w > 1.0) residual /= norm_w;
    return {residual < tol, IndexKind::Finite, p, residual, std::abs(p), std::arg(p)};
  }
  if (norm_w > tol) {
    return {true, IndexKind::YPolarized, {nan, nan}, norm_u,
            std::numeric_limits<double>::infinity(), nan};
  }
  return {true, IndexKind::Vacuum, {nan, nan}, std::max(norm_u, norm_w), nan, nan};
}

// Rows of (a rho) for a in {a_x, a_y}: (a rho)(i, :) = sqrt(n+1) rho(raised i, :).
Eigen::MatrixXcd annihilate_rows(const DensityOperator& rho, Mode mode) {
  const int c = rho.cutoff();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.dimension(), rho.dimension());
  for (int nx = 0; nx <= c; ++nx) {
    for (int ny = 0; ny <= c; ++ny) {
      const int n = (mode == Mode::X) ? nx : ny;
      if (n == c) continue;
      const int sx = (mode == Mode::X) ? nx + 1 : nx;
      const int sy = (mode == Mode::Y) ? ny + 1 : ny;
      out.row(static_cast<Eigen::Index>(basis_index(nx, ny, c))) =
          std::sqrt(n + 1.0) * rho.matrix().row(static_cast<Eigen::Index>(basis_index(sx, sy, c)));
    }
  }
  return out;
}

}  // namespace

PolarizationIndexResult perfect_polarization_index(const FockState& psi, double tol) {
  if (!psi.is_normalized()) {
    throw ContractError("perfect polarization test requires a normalized state");
  }
  const FockState u = apply_annihilation(psi, Mode::X);
  const FockState w = apply_annihilation(psi, Mode::Y);
  return classify(
      u.norm(), w.norm(), inner(u, w), u.squared_norm(),
      [&](Complex p) { return (w - p * u).norm(); }, tol);
}

PolarizationIndexResult perfect_polarization_index(const DensityOperator& rho, double tol) {
  if (!rho.is_normalized()) {
    throw ContractError("perfect polarization test requires a unit-trace density operator");
  }
  const Eigen::MatrixXcd a = annihilate_rows(rho, Mode::X);
  const Eigen::MatrixXcd b = annihilate_rows(rho, Mode::Y);
  // Frobenius inner product <A, B> = sum conj(A_ij) B_ij
  const Complex ab = (a.conjugate().cwiseProduct(b)).sum();
  return classify(
      a.norm(), b.norm(), ab, a.squaredNorm(),
      [&](Complex p) { return (b - p * a).norm(); }, tol);
}

double polarization_operator_residual(const FockState& psi, Complex p) {
  const FockState lhs = apply_inverse_annihilation_x(apply_annihilation(psi, Mode::Y));
  const FockState rhs = p * (psi - apply_vacuum_projector(psi, Mode::X));
  return (lhs - rhs).norm();
}

}  // namespace qpol
