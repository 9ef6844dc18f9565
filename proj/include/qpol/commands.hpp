#pragma once

// Subcommands of the `qpol` tool, callable in-process. Each returns the
// process exit code and writes its report to `out`, diagnostics to `err`.

#include <iosfwd>
#include <optional>
#include <string>

#include "qpol/dop.hpp"
#include "qpol/fock.hpp"

namespace qpol::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitCutoff = 3,
  kExitMixedState = 4,
  kExitOutput = 5,
};

struct CommonOptions {
  std::optional<int> cutoff;
  GridResolution grid{};
  std::optional<double> tol;
  std::string output;  // empty: none
};

// "64x48" or "64" (square).
GridResolution parse_grid(const std::string& text);

struct DopOptions {
  std::string state_path;
  std::string method = "both";  // first | second | both
  CommonOptions common;
};

struct CheckPerfectOptions {
  std::string state_path;
  bool mixed = false;
  CommonOptions common;
};

struct SweepOptions {
  std::string family = "phase-randomized";
  std::string n0_range;  // start:stop:step
  CommonOptions common;
};

struct MomentOptions {
  std::string state_path;
  MomentOrder order{};
  CommonOptions common;
};

inline constexpr const char* kSweepHeader =
    "n0,dop_first,dop_second_numeric,dop_second_analytic,abs_err";

int run_dop(const DopOptions& options, std::ostream& out, std::ostream& err);
int run_check_perfect(const CheckPerfectOptions& options, std::ostream& out, std::ostream& err);
int run_sweep(const SweepOptions& options, std::ostream& out, std::ostream& err);
int run_moment(const MomentOptions& options, std::ostream& out, std::ostream& err);

// Fixed-point with `digits` decimals, dot separator, and no "-0.000000".
std::string format_fixed(double value, int digits = 6);
// Scientific with one mantissa decimal and a bare exponent: 1.0e0, 2.5e-13.
std::string format_residual(double value);

}  // namespace qpol::cli
