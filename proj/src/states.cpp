#include "qpol/states.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qpol/error.hpp"

namespace qpol {

namespace {

// Upper bound for automatic cutoff searches.
constexpr int kCutoffSearchLimit = 2000;

// log of the Poisson weight e^{-mean} mean^n / n!
double log_poisson(double mean, int n) {
  return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

// Single-mode coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!) for n = 0..cutoff.
std::vector<Complex> coherent_amplitudes(Complex alpha, int cutoff) {
  std::vector<Complex> amps(static_cast<std::size_t>(cutoff) + 1);
  amps[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) {
    amps[static_cast<std::size_t>(n)] =
        amps[static_cast<std::size_t>(n) - 1] * alpha / std::sqrt(static_cast<double>(n));
  }
  return amps;
}

// sqrt of the Poisson weights, i.e. the real coherent amplitudes for alpha = sqrt(mean).
std::vector<double> poisson_root_weights(double mean, int cutoff) {
  std::vector<double> out(static_cast<std::size_t>(cutoff) + 1, 0.0);
  if (mean == 0.0) {
    out[0] = 1.0;
    return out;
  }
  for (int n = 0; n <= cutoff; ++n) {
    out[static_cast<std::size_t>(n)] = std::exp(0.5 * log_poisson(mean, n));
  }
  return out;
}

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be finite and nonnegative");
  }
}

void require_cutoff(int cutoff) {
  if (cutoff < 0) throw OutOfRangeError("cutoff must be nonnegative");
}

int search_cutoff(const auto& tail_of) {
  for (int c = 0; c <= kCutoffSearchLimit; ++c) {
    if (tail_of(c) < kMaxTailMass) return c;
  }
  throw UnsupportedError("no adequate cutoff below " + std::to_string(kCutoffSearchLimit));
}

// Joint tail of two independent modes with per-mode tails ta, tb.
double joint_tail(double ta, double tb) { return ta + tb - ta * tb; }

void check_tail(int cutoff, double tail, const auto& tail_of) {
  if (tail >= kMaxTailMass) {
    throw CutoffTooSmallError(cutoff, search_cutoff(tail_of), tail);
  }
}

double param(const StateFamily& f, const std::string& key, double fallback = 0.0) {
  const auto it = f.params.find(key);
  return it == f.params.end() ? fallback : it->second;
}

}  // namespace

double poisson_tail(double mean, int cutoff) {
  require_nonnegative(mean, "mean");
  if (mean == 0.0) return 0.0;
  // Sum the tail directly; 1 - head would lose everything below ~1e-16.
  double tail = 0.0;
  for (int n = cutoff + 1;; ++n) {
    const double term = std::exp(log_poisson(mean, n));
    tail += term;
    if (n > mean && term <= 1e-30 * tail) break;
    if (n > cutoff + 100000) break;
  }
  return tail;
}

double thermal_tail(double mean, int cutoff) {
  require_nonnegative(mean, "mean");
  return std::pow(mean / (1.0 + mean), cutoff + 1);
}

FockState coherent_state(Complex alpha_x, Complex alpha_y, int cutoff) {
  require_cutoff(cutoff);
  const auto tail_of = [&](int c) {
    return joint_tail(poisson_tail(std::norm(alpha_x), c), poisson_tail(std::norm(alpha_y), c));
  };
  const double tail = tail_of(cutoff);
  check_tail(cutoff, tail, tail_of);
  const auto ax = coherent_amplitudes(alpha_x, cutoff);
  const auto ay = coherent_amplitudes(alpha_y, cutoff);
  Eigen::VectorXcd amps(basis_size(cutoff));
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; ny <= cutoff; ++ny) {
      amps[static_cast<Eigen::Index>(basis_index(nx, ny, cutoff))] =
          ax[static_cast<std::size_t>(nx)] * ay[static_cast<std::size_t>(ny)];
    }
  }
  amps /= amps.norm();
  return FockState(cutoff, std::move(amps), Normalization::Normalized, tail);
}

DensityOperator phase_randomized_coherent(double n0, int cutoff) {
  require_nonnegative(n0, "n0");
  require_cutoff(cutoff);
  const auto tail_of = [&](int c) {
    const double t = poisson_tail(n0, c);
    return joint_tail(t, t);
  };
  const double tail = tail_of(cutoff);
  check_tail(cutoff, tail, tail_of);
  const auto root = poisson_root_weights(n0, cutoff);
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; ny <= cutoff; ++ny) {
      const auto i = static_cast<Eigen::Index>(basis_index(nx, ny, cutoff));
      const double w = root[static_cast<std::size_t>(nx)] * root[static_cast<std::size_t>(ny)];
      m(i, i) = w * w;
    }
  }
  return DensityOperator(cutoff, std::move(m), Normalization::Normalized, tail);
}

DensityOperator hidden_polarized(double n0, int cutoff) {
  require_nonnegative(n0, "n0");
  require_cutoff(cutoff);
  const auto tail_of = [&](int c) {
    const double t = poisson_tail(n0, c);
    return joint_tail(t, t);
  };
  const double tail = tail_of(cutoff);
  check_tail(cutoff, tail, tail_of);
  const auto root = poisson_root_weights(n0, cutoff);
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // <n|rho|m> = c_n c_m when n_x - n_y = m_x - m_y, c_n the real coherent amplitude.
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; ny <= cutoff; ++ny) {
      const auto i = static_cast<Eigen::Index>(basis_index(nx, ny, cutoff));
      const double ci = root[static_cast<std::size_t>(nx)] * root[static_cast<std::size_t>(ny)];
      const int diff = nx - ny;
      for (int mx = std::max(0, diff); mx <= cutoff && mx - diff <= cutoff; ++mx) {
        const int my = mx - diff;
        const auto j = static_cast<Eigen::Index>(basis_index(mx, my, cutoff));
        m(i, j) = ci * root[static_cast<std::size_t>(mx)] * root[static_cast<std::size_t>(my)];
      }
    }
  }
  return DensityOperator(cutoff, std::move(m), Normalization::Normalized, tail);
}

UnpolarizedWeights::UnpolarizedWeights(std::vector<double> weights)
    : weights_(std::move(weights)) {
  double total = 0.0;
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    if (!(weights_[n] >= 0.0) || !std::isfinite(weights_[n])) {
      throw NormalizationError("unpolarized weight B" + std::to_string(n) +
                               " must be finite and nonnegative");
    }
    total += static_cast<double>(n + 1) * weights_[n];
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw NormalizationError("unpolarized weights give trace sum (n+1) B_n = " +
                             std::to_string(total) + ", expected 1");
  }
}

int UnpolarizedWeights::max_photon_number() const {
  for (std::size_t n = weights_.size(); n > 0; --n) {
    if (weights_[n - 1] > 0.0) return static_cast<int>(n - 1);
  }
  return 0;
}

DensityOperator unpolarized(const UnpolarizedWeights& weights, int cutoff) {
  require_cutoff(cutoff);
  const int top = weights.max_photon_number();
  if (top > cutoff) {
    double lost = 0.0;
    for (int n = cutoff + 1; n <= top; ++n) {
      lost += (n + 1) * weights.values()[static_cast<std::size_t>(n)];
    }
    throw CutoffTooSmallError(cutoff, top, lost);
  }
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n <= top; ++n) {
    const double b = weights.values()[static_cast<std::size_t>(n)];
    for (int r = 0; r <= n; ++r) {
      const auto i = static_cast<Eigen::Index>(basis_index(r, n - r, cutoff));
      m(i, i) = b;
    }
  }
  return DensityOperator(cutoff, std::move(m), Normalization::Normalized);
}

DensityOperator thermal_product(double mean, int cutoff) {
  require_nonnegative(mean, "mean");
  require_cutoff(cutoff);
  const auto tail_of = [&](int c) {
    const double t = thermal_tail(mean, c);
    return joint_tail(t, t);
  };
  const double tail = tail_of(cutoff);
  check_tail(cutoff, tail, tail_of);
  const double ratio = mean / (1.0 + mean);
  std::vector<double> p(static_cast<std::size_t>(cutoff) + 1);
  p[0] = 1.0 / (1.0 + mean);
  for (int n = 1; n <= cutoff; ++n) {
    p[static_cast<std::size_t>(n)] = p[static_cast<std::size_t>(n) - 1] * ratio;
  }
  const auto dim = basis_size(cutoff);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (int nx = 0; nx <= cutoff; ++nx) {
    for (int ny = 0; ny <= cutoff; ++ny) {
      const auto i = static_cast<Eigen::Index>(basis_index(nx, ny, cutoff));
      m(i, i) = p[static_cast<std::size_t>(nx)] * p[static_cast<std::size_t>(ny)];
    }
  }
  return DensityOperator(cutoff, std::move(m), Normalization::Normalized, tail);
}

FockState biphoton_qutrit(int cutoff) {
  if (cutoff < 2) throw CutoffTooSmallError(cutoff, 2, 1.0);
  return make_pure_state({{2, 0, 1.0 / 3.0}, {1, 1, 2.0 / 3.0}, {0, 2, 2.0 / 3.0}}, cutoff,
                         false);
}

// ---------------------------------------------------------------------------
// Declarative families

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Coherent: return "coherent";
    case FamilyKind::PhaseRandomizedCoherent: return "phase-randomized";
    case FamilyKind::HiddenPolarized: return "hidden-polarized";
    case FamilyKind::Unpolarized: return "unpolarized";
    case FamilyKind::ThermalProduct: return "thermal";
    case FamilyKind::BiphotonQutrit: return "qutrit";
  }
  return "unknown";
}

std::optional<FamilyKind> family_from_name(const std::string& name) {
  for (auto k : {FamilyKind::Coherent, FamilyKind::PhaseRandomizedCoherent,
                 FamilyKind::HiddenPolarized, FamilyKind::Unpolarized,
                 FamilyKind::ThermalProduct, FamilyKind::BiphotonQutrit}) {
    if (family_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_pure_family(FamilyKind kind) {
  return kind == FamilyKind::Coherent || kind == FamilyKind::BiphotonQutrit;
}

namespace {

bool is_weight_key(const std::string& key) {
  if (key.size() < 2 || key[0] != 'B') return false;
  return std::all_of(key.begin() + 1, key.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

UnpolarizedWeights weights_of(const StateFamily& f) {
  std::vector<double> b;
  for (const auto& [key, value] : f.params) {
    const auto n = static_cast<std::size_t>(std::stoul(key.substr(1)));
    if (b.size() <= n) b.resize(n + 1, 0.0);
    b[n] = value;
  }
  return UnpolarizedWeights(std::move(b));
}

}  // namespace

void validate_family(const StateFamily& f) {
  std::set<std::string> required;
  std::set<std::string> optional;
  switch (f.kind) {
    case FamilyKind::Coherent:
      required = {"alpha_x_re", "alpha_y_re"};
      optional = {"alpha_x_im", "alpha_y_im"};
      break;
    case FamilyKind::PhaseRandomizedCoherent:
    case FamilyKind::HiddenPolarized:
      required = {"n0"};
      break;
    case FamilyKind::ThermalProduct:
      required = {"mean"};
      break;
    case FamilyKind::Unpolarized:
      if (f.params.empty()) throw ContractError("unpolarized family needs weights B0, B1, ...");
      for (const auto& [key, value] : f.params) {
        if (!is_weight_key(key)) {
          throw ContractError("unknown parameter '" + key + "' for family unpolarized");
        }
      }
      return;
    case FamilyKind::BiphotonQutrit:
      break;
  }
  for (const auto& key : required) {
    if (!f.params.contains(key)) {
      throw ContractError("family " + family_name(f.kind) + " requires parameter '" + key + "'");
    }
  }
  for (const auto& [key, value] : f.params) {
    if (!required.contains(key) && !optional.contains(key)) {
      throw ContractError("unknown parameter '" + key + "' for family " + family_name(f.kind));
    }
  }
}

StateFamily scale_intensity(const StateFamily& family, double m) {
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("intensity factor must be positive");
  validate_family(family);
  StateFamily out = family;
  switch (family.kind) {
    case FamilyKind::Coherent:
      for (auto& [key, value] : out.params) value *= std::sqrt(m);
      return out;
    case FamilyKind::PhaseRandomizedCoherent:
    case FamilyKind::HiddenPolarized:
      out.params["n0"] *= m;
      return out;
    case FamilyKind::ThermalProduct:
      out.params["mean"] *= m;
      return out;
    case FamilyKind::Unpolarized:
    case FamilyKind::BiphotonQutrit:
      break;
  }
  throw UnsupportedError("family " + family_name(family.kind) + " has no intensity scale");
}

int minimal_cutoff(const StateFamily& f) {
  validate_family(f);
  switch (f.kind) {
    case FamilyKind::Coherent: {
      const double mx = std::norm(Complex(param(f, "alpha_x_re"), param(f, "alpha_x_im")));
      const double my = std::norm(Complex(param(f, "alpha_y_re"), param(f, "alpha_y_im")));
      return search_cutoff(
          [&](int c) { return joint_tail(poisson_tail(mx, c), poisson_tail(my, c)); });
    }
    case FamilyKind::PhaseRandomizedCoherent:
    case FamilyKind::HiddenPolarized: {
      const double n0 = param(f, "n0");
      require_nonnegative(n0, "n0");
      return search_cutoff([&](int c) {
        const double t = poisson_tail(n0, c);
        return joint_tail(t, t);
      });
    }
    case FamilyKind::ThermalProduct: {
      const double mean = param(f, "mean");
      require_nonnegative(mean, "mean");
      return search_cutoff([&](int c) {
        const double t = thermal_tail(mean, c);
        return joint_tail(t, t);
      });
    }
    case FamilyKind::Unpolarized:
      return weights_of(f).max_photon_number();
    case FamilyKind::BiphotonQutrit:
      return 2;
  }
  return 0;
}

State build_state(const StateFamily& f) {
  validate_family(f);
  const int cutoff = f.cutoff ? *f.cutoff : minimal_cutoff(f);
  switch (f.kind) {
    case FamilyKind::Coherent:
      return coherent_state({param(f, "alpha_x_re"), param(f, "alpha_x_im")},
                            {param(f, "alpha_y_re"), param(f, "alpha_y_im")}, cutoff);
    case FamilyKind::PhaseRandomizedCoherent:
      return phase_randomized_coherent(param(f, "n0"), cutoff);
    case FamilyKind::HiddenPolarized:
      return hidden_polarized(param(f, "n0"), cutoff);
    case FamilyKind::Unpolarized:
      return unpolarized(weights_of(f), cutoff);
    case FamilyKind::ThermalProduct:
      return thermal_product(param(f, "mean"), cutoff);
    case FamilyKind::BiphotonQutrit:
      return biphoton_qutrit(cutoff);
  }
  throw UnsupportedError("unknown family");
}

DensityOperator as_density(const State& state) {
  if (const auto* psi = std::get_if<FockState>(&state)) {
    return density_from_pure(psi->is_normalized() ? *psi : normalized(*psi));
  }
  return std::get<DensityOperator>(state);
}

int cutoff_of(const State& state) {
  return std::visit([](const auto& s) { return s.cutoff(); }, state);
}

}  // namespace qpol
