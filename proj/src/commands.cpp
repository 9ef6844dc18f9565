#include "qpol/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "qpol/analytic.hpp"
#include "qpol/error.hpp"
#include "qpol/state_file.hpp"
#include "qpol/states.hpp"

namespace qpol::cli {

namespace {

class OutputError : public Error {
 public:
  using Error::Error;
};

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const CutoffTooSmallError& e) {
    err << "error: " << e.what() << '\n';
    return kExitCutoff;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitOutput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::out | std::ios::trunc);
  if (!f) throw OutputError("cannot write output file '" + path + "'");
  return f;
}

struct LoadedState {
  State state;
  std::string cutoff_origin;  // file | default | override
  double tail;
};

FockState with_cutoff(const FockState& psi, int cutoff) {
  int needed = 0;
  double dropped = 0.0;
  for (int nx = 0; nx <= psi.cutoff(); ++nx) {
    for (int ny = 0; ny <= psi.cutoff(); ++ny) {
      const Complex a = psi.amplitude(nx, ny);
      if (a == Complex(0.0, 0.0)) continue;
      needed = std::max({needed, nx, ny});
      if (nx > cutoff || ny > cutoff) dropped += std::norm(a);
    }
  }
  if (needed > cutoff) throw CutoffTooSmallError(cutoff, needed, dropped);
  std::vector<AmplitudeEntry> entries;
  for (int nx = 0; nx <= needed; ++nx) {
    for (int ny = 0; ny <= needed; ++ny) {
      const Complex a = psi.amplitude(nx, ny);
      if (a != Complex(0.0, 0.0)) entries.push_back({nx, ny, a});
    }
  }
  return make_pure_state(entries, cutoff, false);
}

LoadedState load(const std::string& path, const CommonOptions& common, std::ostream& err) {
  const StateSpec spec = read_state_spec(path);
  if (const auto* psi = std::get_if<FockState>(&spec)) {
    FockState state = common.cutoff ? with_cutoff(*psi, *common.cutoff) : *psi;
    if (!state.is_normalized()) {
      err << fmt::format("note: normalizing input (squared norm {:.17g})\n", state.squared_norm());
      state = normalized(state);
    }
    return {std::move(state), common.cutoff ? "override" : "file", 0.0};
  }
  StateFamily family = std::get<StateFamily>(spec);
  std::string origin = family.cutoff ? "file" : "default";
  if (common.cutoff) {
    family.cutoff = common.cutoff;
    origin = "override";
  }
  State state = build_state(family);
  const double tail = std::visit([](const auto& s) { return s.truncation_loss(); }, state);
  return {std::move(state), origin, tail};
}

void print_header(std::ostream& out, const std::string& path, const LoadedState& loaded) {
  out << "state: " << path << '\n';
  out << fmt::format("cutoff: {} ({})\n", cutoff_of(loaded.state), loaded.cutoff_origin);
  out << fmt::format("truncation tail: {:.3e}\n", loaded.tail);
}

std::string direction(const PolarizationVector& v) {
  return "chi=" + format_fixed(v.chi()) + " delta=" + format_fixed(v.delta());
}

}  // namespace

std::string format_fixed(double value, int digits) {
  std::string s = fmt::format("{:.{}f}", value, digits);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_residual(double value) {
  if (value == 0.0) return "0.0e0";
  if (!std::isfinite(value)) return fmt::format("{}", value);
  int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
  double mantissa = value / std::pow(10.0, exponent);
  if (std::abs(std::round(mantissa * 10.0) / 10.0) >= 10.0) {
    mantissa /= 10.0;
    ++exponent;
  }
  return fmt::format("{:.1f}e{}", mantissa, exponent);
}

GridResolution parse_grid(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      const int n = parse_count(text);
      return {n, n};
    }
    return {parse_count(text.substr(0, x)), parse_count(text.substr(x + 1))};
  } catch (const ParseError&) {
    throw ParseError("--grid", 0, "expected N or NxM, got '" + text + "'");
  }
}

int run_dop(const DopOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<DopMethod> methods;
    if (options.method == "first" || options.method == "both") methods.push_back(DopMethod::First);
    if (options.method == "second" || options.method == "both") {
      methods.push_back(DopMethod::Second);
    }
    if (methods.empty()) {
      throw ParseError("--method", 0, "expected first, second or both; got '" + options.method + "'");
    }
    std::ofstream csv;
    if (!options.common.output.empty()) csv = open_output(options.common.output);

    const LoadedState loaded = load(options.state_path, options.common, err);
    const DensityOperator rho = as_density(loaded.state);
    print_header(out, options.state_path, loaded);
    out << fmt::format("grid: {}x{}\n", options.common.grid.n_chi, options.common.grid.n_delta);

    if (csv.is_open()) {
      csv << "method,max_intensity,argmax_chi,argmax_delta,min_intensity,argmin_chi,argmin_delta,"
             "dop,degenerate\n";
    }
    std::vector<DopReport> reports;
    for (auto method : methods) {
      const DopReport r = extremize_intensity(rho, method, options.common.grid,
                                              options.common.tol.value_or(kDefaultRefineTol));
      out << "\nmethod: " << method_name(method) << '\n';
      out << "max_intensity: " << format_fixed(r.max_intensity, 10) << "  at "
          << direction(r.argmax) << '\n';
      out << "min_intensity: " << format_fixed(r.min_intensity, 10) << "  at "
          << direction(r.argmin) << '\n';
      out << "dop: " << format_fixed(r.dop) << '\n';
      out << "degenerate: " << (r.degenerate ? "yes" : "no") << '\n';
      out << "refinement sweeps: " << r.refinement_iterations << '\n';
      if (csv.is_open()) {
        csv << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                           method_name(method), r.max_intensity, r.argmax.chi(),
                           r.argmax.delta(), r.min_intensity, r.argmin.chi(), r.argmin.delta(),
                           r.dop, r.degenerate ? 1 : 0);
      }
      reports.push_back(r);
    }
    out << '\n';
    for (const auto& r : reports) {
      out << (r.method == DopMethod::First ? "P(I) = " : "P(II) = ") << format_fixed(r.dop)
          << '\n';
    }
    if (csv.is_open() && !csv.flush()) throw OutputError("failed writing " + options.common.output);
    return static_cast<int>(kExitOk);
  });
}

int run_check_perfect(const CheckPerfectOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedState loaded = load(options.state_path, options.common, err);
    const double tol = options.common.tol.value_or(kDefaultPolarizationTol);
    const auto* psi = std::get_if<FockState>(&loaded.state);
    if (psi == nullptr && !options.mixed) {
      err << "error: state is mixed; pass --mixed for the density-operator criterion\n";
      return static_cast<int>(kExitMixedState);
    }
    print_header(out, options.state_path, loaded);
    PolarizationIndexResult r{};
    if (options.mixed) {
      out << "criterion: mixed (a_y rho = p a_x rho)\n";
      r = perfect_polarization_index(as_density(loaded.state), tol);
    } else {
      out << "criterion: pure (a_y |psi> = p a_x |psi>)\n";
      r = perfect_polarization_index(*psi, tol);
    }
    switch (r.kind) {
      case IndexKind::YPolarized:
        out << "y-polarized (p infinite), residual " << format_residual(r.residual) << '\n';
        break;
      case IndexKind::Vacuum:
        out << "vacuum: trivially polarized, p undefined\n";
        break;
      case IndexKind::Finite: {
        out << (r.polarized ? "perfectly polarized" : "not perfectly polarized") << ", residual "
            << format_residual(r.residual) << '\n';
        const std::string im = format_fixed(std::abs(r.p.imag()));
        const bool negative = r.p.imag() < 0.0 && format_fixed(r.p.imag()) != im;
        out << "p = " << format_fixed(r.p.real()) << (negative ? " - " : " + ") << im << "i\n";
        out << "|p| = " << format_fixed(r.ratio) << '\n';
        out << "arg p = " << format_fixed(r.phase) << '\n';
        if (psi != nullptr && !options.mixed) {
          out << "operator identity residual: "
              << format_residual(polarization_operator_residual(*psi, r.p)) << '\n';
        }
        break;
      }
    }
    out << "polarized: " << (r.polarized ? "yes" : "no") << '\n';
    return static_cast<int>(kExitOk);
  });
}

int run_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto kind = family_from_name(options.family);
    if (!kind || (*kind != FamilyKind::PhaseRandomizedCoherent &&
                  *kind != FamilyKind::HiddenPolarized)) {
      throw ParseError("--family", 0,
                       "sweep supports phase-randomized or hidden-polarized, got '" +
                           options.family + "'");
    }
    if (options.n0_range.empty()) throw ParseError("--n0", 0, "missing start:stop:step");
    const SweepRange range = parse_sweep_range(options.n0_range);
    if (options.common.output.empty()) throw ParseError("--output", 0, "sweep needs --output");
    std::ofstream csv = open_output(options.common.output);

    struct Row {
      double n0, first, second, analytic;
    };
    const std::size_t count = range.count();
    std::vector<Row> rows(count);
    const auto compute = [&](std::size_t i) {
      const double n0 = range.at(i);
      const StateFamily family{*kind, {{"n0", n0}}, options.common.cutoff};
      const DensityOperator rho = as_density(build_state(family));
      const double tol = options.common.tol.value_or(kDefaultRefineTol);
      rows[i] = {n0, extremize_intensity(rho, DopMethod::First, options.common.grid, tol).dop,
                 extremize_intensity(rho, DopMethod::Second, options.common.grid, tol).dop,
                 dop_second_analytic(n0)};
    };

    // Rows are independent; workers pull indices and results land in order.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          compute(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1,
                                                        std::max<std::size_t>(count, 1));
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
      worker();
    }
    if (failure) std::rethrow_exception(failure);

    csv << kSweepHeader << '\n';
    for (const auto& r : rows) {
      csv << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", r.n0, r.first, r.second,
                         r.analytic, std::abs(r.second - r.analytic));
    }
    if (!csv.flush()) throw OutputError("failed writing " + options.common.output);
    out << fmt::format("wrote {} rows to {}\n", count, options.common.output);
    return static_cast<int>(kExitOk);
  });
}

int run_moment(const MomentOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const LoadedState loaded = load(options.state_path, options.common, err);
    const MomentValue m = normally_ordered_moment(as_density(loaded.state), options.order);
    if (m.truncated) {
      err << fmt::format("warning: moment truncated by cutoff {} (dropped weight {:.3e})\n",
                         cutoff_of(loaded.state), m.dropped_weight);
    }
    out << format_fixed(m.value.real()) << ' ' << format_fixed(m.value.imag()) << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace qpol::cli
