// qpol: degree-of-polarization calculations for two-mode quantum light.
//
//   qpol dop <state-file> [--method first|second|both] [--grid 64x64] [--tol 1e-10] [--output report.csv]
//   qpol check-perfect <state-file> [--tol 1e-10] [--mixed]
//   qpol sweep --n0 0.1:4.0:0.1 --output sweep.csv [--family phase-randomized]
//   qpol moment <state-file> -p 0 -q 0 -r 1 -s 1
//
// Global flags --cutoff, --grid, --tol and --output may appear before or after
// the subcommand.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qpol/commands.hpp"
#include "qpol/error.hpp"

int main(int argc, char** argv) {
  namespace cli = qpol::cli;

  CLI::App app{"Degree of polarization of two-mode quantum light"};
  app.require_subcommand(1);

  cli::CommonOptions common;
  std::string grid_text = "64x64";
  int cutoff = -1;
  double tol = -1.0;
  app.add_option("--cutoff", cutoff, "Photons per mode kept in the truncated Fock space")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--grid", grid_text, "Coarse extremization grid, NxM (chi x delta) or N");
  app.add_option("--tol", tol,
                 "Residual tolerance (check-perfect) or refinement tolerance (dop, sweep)")
      ->check(CLI::PositiveNumber);
  app.add_option("--output", common.output, "CSV output path");

  cli::DopOptions dop;
  auto* dop_cmd = app.add_subcommand("dop", "Extremize intensities and report P(I) / P(II)");
  dop_cmd->add_option("state", dop.state_path, "State-spec file")->required();
  dop_cmd->add_option("--method", dop.method, "first, second or both")
      ->check(CLI::IsMember({"first", "second", "both"}));

  cli::CheckPerfectOptions check;
  auto* check_cmd =
      app.add_subcommand("check-perfect", "Test the perfect-polarization criterion");
  check_cmd->add_option("state", check.state_path, "State-spec file")->required();
  check_cmd->add_flag("--mixed", check.mixed, "Use the density-operator form of the criterion");

  cli::SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Numeric vs closed-form P(II) over n0");
  sweep_cmd->add_option("--family", sweep.family, "phase-randomized or hidden-polarized");
  sweep_cmd->add_option("--n0", sweep.n0_range, "start:stop:step")->required();

  cli::MomentOptions moment;
  auto* moment_cmd = app.add_subcommand("moment", "Normally ordered moment <a_x+^p a_y+^q a_x^r a_y^s>");
  moment_cmd->add_option("state", moment.state_path, "State-spec file")->required();
  moment_cmd->add_option("-p", moment.order.p, "Power of a_x^dagger")->check(CLI::NonNegativeNumber);
  moment_cmd->add_option("-q", moment.order.q, "Power of a_y^dagger")->check(CLI::NonNegativeNumber);
  moment_cmd->add_option("-r", moment.order.r, "Power of a_x")->check(CLI::NonNegativeNumber);
  moment_cmd->add_option("-s", moment.order.s, "Power of a_y")->check(CLI::NonNegativeNumber);

  for (auto* sub : {dop_cmd, check_cmd, sweep_cmd, moment_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
    if (cutoff >= 0) common.cutoff = cutoff;
    if (tol > 0.0) common.tol = tol;
    common.grid = cli::parse_grid(grid_text);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitParse;
  } catch (const qpol::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitParse;
  }

  if (dop_cmd->parsed()) {
    dop.common = common;
    return cli::run_dop(dop, std::cout, std::cerr);
  }
  if (check_cmd->parsed()) {
    check.common = common;
    return cli::run_check_perfect(check, std::cout, std::cerr);
  }
  if (sweep_cmd->parsed()) {
    sweep.common = common;
    return cli::run_sweep(sweep, std::cout, std::cerr);
  }
  moment.common = common;
  return cli::run_moment(moment, std::cout, std::cerr);
}
