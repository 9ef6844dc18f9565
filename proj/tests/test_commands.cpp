#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qpol/analytic.hpp"
#include "qpol/commands.hpp"
#include "qpol/error.hpp"
#include "support.hpp"

using namespace qpol;
using namespace qpol::cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename Options, typename F>
Run run(F f, const Options& options) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = f(options, out, err);
  return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l == line) return true;
  return false;
}

// Value printed after "prefix" on the first line that starts with it.
double value_after(const std::string& text, const std::string& prefix) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l.rfind(prefix, 0) == 0) return std::stod(l.substr(prefix.size()));
  FAIL("no line starting with '" << prefix << "'");
  return 0.0;
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& p, std::string& header) {
  std::ifstream in(p);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  for (std::string l; std::getline(in, l);) {
    std::vector<double> row;
    std::istringstream cells(l);
    for (std::string c; std::getline(cells, c, ',');) row.push_back(std::stod(c));
    rows.push_back(row);
  }
  return rows;
}

const char* kQutrit =
    "format: fockstate-v1\ncutoff: 2\n"
    "amp: 2 0 0.33333333333333331 0\namp: 1 1 0.66666666666666663 0\namp: 0 2 0.66666666666666663 0\n";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_fixed(1.41421356) == "1.414214");
  CHECK(format_fixed(-1e-9) == "0.000000");
  CHECK(format_fixed(-0.0) == "0.000000");
  CHECK(format_fixed(-0.5) == "-0.500000");
  CHECK(format_fixed(2.0, 2) == "2.00");
  CHECK(format_residual(1.0) == "1.0e0");
  CHECK(format_residual(0.0) == "0.0e0");
  CHECK(format_residual(2.5e-13) == "2.5e-13");
  CHECK(format_residual(9.96e-5) == "1.0e-4");
  CHECK(parse_grid("64x48").n_delta == 48);
  CHECK(parse_grid("16").n_chi == 16);
  CHECK_THROWS_AS(parse_grid("8y8"), ParseError);
}

TEST_CASE("dop command") {
  const qpol::testing::ScratchDir dir("dop");

  SUBCASE("qutrit reports unit second DOP") {
    const auto r = run(run_dop, DopOptions{dir.write("q.state", kQutrit).string(), "both", {}});
    CHECK(r.code == kExitOk);
    CHECK(has_line(r.out, "P(II) = 1.000000"));
    CHECK(has_line(r.out, "P(I) = 1.000000"));
    CHECK(has_line(r.out, "cutoff: 2 (file)"));
  }
  SUBCASE("phase-randomized n0 = 1") {
    const auto p = dir.write("pr.state", "format: family-v1\nfamily: phase-randomized\nparam: n0 1\n");
    const auto r = run(run_dop, DopOptions{p.string(), "second", {}});
    CHECK(r.code == kExitOk);
    CHECK(std::abs(value_after(r.out, "dop: ") - 0.293590) < 1e-5);
    CHECK(has_line(r.out, "method: second"));
    CHECK(r.out.find("method: first") == std::string::npos);
    CHECK(r.out.find("(default)") != std::string::npos);
  }
  SUBCASE("unpolarized") {
    const auto p = dir.write("u.state", "format: family-v1\nfamily: unpolarized\nparam: B0 0.5\nparam: B1 0.25\n");
    const auto r = run(run_dop, DopOptions{p.string(), "second", {}});
    CHECK(r.code == kExitOk);
    CHECK(has_line(r.out, "dop: 0.000000"));
  }
  SUBCASE("csv output") {
    CommonOptions common;
    common.output = (dir.path() / "report.csv").string();
    const auto r = run(run_dop, DopOptions{dir.write("q.state", kQutrit).string(), "both", common});
    CHECK(r.code == kExitOk);
    std::ifstream in(common.output);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("method,max_intensity", 0) == 0);
    int lines = 0;
    for (std::string l; std::getline(in, l);) ++lines;
    CHECK(lines == 2);
  }
  SUBCASE("cutoff override") {
    const auto p = dir.write("pr.state", "format: family-v1\nfamily: phase-randomized\nparam: n0 1\n");
    CommonOptions common;
    common.cutoff = 3;
    const auto small = run(run_dop, DopOptions{p.string(), "first", common});
    CHECK(small.code == kExitCutoff);
    CHECK(small.err.find("minimal adequate cutoff is 14") != std::string::npos);
    common.cutoff = 20;
    const auto big = run(run_dop, DopOptions{p.string(), "first", common});
    CHECK(big.code == kExitOk);
    CHECK(has_line(big.out, "cutoff: 20 (override)"));
    common.cutoff = 1;
    CHECK(run(run_dop, DopOptions{dir.write("q.state", kQutrit).string(), "first", common}).code ==
          kExitCutoff);
  }
  SUBCASE("unnormalized files are normalized with a note") {
    const auto p = dir.write("n.state", "format: fockstate-v1\ncutoff: 1\namp: 1 0 3 0\namp: 0 1 4 0\n");
    const auto r = run(run_dop, DopOptions{p.string(), "first", {}});
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("normalizing") != std::string::npos);
  }
  SUBCASE("failures map to exit codes") {
    const auto bad = dir.write("bad.state", "format: fockstate-v1\ncutoff: 2\namp: 0 0 1 0\namp: 0 0 1 0\n");
    const auto r = run(run_dop, DopOptions{bad.string(), "both", {}});
    CHECK(r.code == kExitParse);
    CHECK(r.err.find("bad.state:4:") != std::string::npos);
    CHECK(run(run_dop, DopOptions{(dir.path() / "none").string(), "both", {}}).code == kExitParse);
    CHECK(run(run_dop, DopOptions{dir.write("q.state", kQutrit).string(), "third", {}}).code == kExitParse);
    CommonOptions common;
    common.output = (dir.path() / "no" / "such" / "dir.csv").string();
    CHECK(run(run_dop, DopOptions{dir.write("q.state", kQutrit).string(), "both", common}).code == kExitOutput);
  }
}

TEST_CASE("check-perfect command") {
  const qpol::testing::ScratchDir dir("check");
  SUBCASE("qutrit") {
    const auto r = run(run_check_perfect, CheckPerfectOptions{dir.write("q.state", kQutrit).string(), false, {}});
    CHECK(r.code == kExitOk);
    CHECK(has_line(r.out, "p = 1.414214 + 0.000000i"));
    CHECK(has_line(r.out, "|p| = 1.414214"));
    CHECK(has_line(r.out, "arg p = 0.000000"));
    CHECK(has_line(r.out, "polarized: yes"));
  }
  SUBCASE("three y photons") {
    const auto p = dir.write("y.state", "format: fockstate-v1\ncutoff: 3\namp: 0 3 1 0\n");
    const auto r = run(run_check_perfect, CheckPerfectOptions{p.string(), false, {}});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("y-polarized") != std::string::npos);
  }
  SUBCASE("two-photon superposition") {
    const auto p = dir.write("s.state",
                             "format: fockstate-v1\ncutoff: 2\namp: 2 0 0.70710678118654757 0\n"
                             "amp: 0 2 0.70710678118654757 0\n");
    const auto r = run(run_check_perfect, CheckPerfectOptions{p.string(), false, {}});
    CHECK(r.code == kExitOk);
    CHECK(has_line(r.out, "not perfectly polarized, residual 1.0e0"));
    CHECK(has_line(r.out, "polarized: no"));
  }
  SUBCASE("negative imaginary part") {
    const auto p = dir.write("c.state",
                             "format: fockstate-v1\ncutoff: 1\namp: 1 0 0.70710678118654757 0\n"
                             "amp: 0 1 0 -0.70710678118654757\n");
    const auto r = run(run_check_perfect, CheckPerfectOptions{p.string(), false, {}});
    CHECK(has_line(r.out, "p = 0.000000 - 1.000000i"));
  }
  SUBCASE("mixed input needs the flag") {
    const auto p = dir.write("pr.state", "format: family-v1\nfamily: phase-randomized\nparam: n0 1\n");
    const auto r = run(run_check_perfect, CheckPerfectOptions{p.string(), false, {}});
    CHECK(r.code == kExitMixedState);
    const auto m = run(run_check_perfect, CheckPerfectOptions{p.string(), true, {}});
    CHECK(m.code == kExitOk);
    CHECK(has_line(m.out, "polarized: no"));
  }
  SUBCASE("tolerance flag") {
    const auto p = dir.write("coh.state",
                             "format: family-v1\nfamily: coherent\nparam: alpha_x_re 1\n"
                             "param: alpha_y_re 1.4142135623730951\n");
    CommonOptions strict;
    const auto r = run(run_check_perfect, CheckPerfectOptions{p.string(), false, strict});
    CHECK(has_line(r.out, "polarized: no"));
    CommonOptions loose;
    loose.tol = 1e-4;
    const auto l = run(run_check_perfect, CheckPerfectOptions{p.string(), false, loose});
    CHECK(has_line(l.out, "polarized: yes"));
    CHECK(has_line(l.out, "p = 1.414214 + 0.000000i"));
  }
}

TEST_CASE("sweep command") {
  const qpol::testing::ScratchDir dir("sweep");
  CommonOptions common;
  common.output = (dir.path() / "sweep.csv").string();
  const auto r = run(run_sweep, SweepOptions{"phase-randomized", "0.1:4.0:0.1", common});
  REQUIRE(r.code == kExitOk);
  std::string header;
  const auto rows = read_csv(common.output, header);
  CHECK(header == kSweepHeader);
  REQUIRE(rows.size() == 40);
  double prev = -1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i][0] == doctest::Approx(0.1 * static_cast<double>(i + 1)));
    CHECK(rows[i][1] < 1e-8);
    CHECK(rows[i][4] < 1e-6);
    CHECK(rows[i][3] == doctest::Approx(dop_second_analytic(rows[i][0])).epsilon(1e-11));
    CHECK(rows[i][3] > prev);
    prev = rows[i][3];
  }
}

TEST_CASE("sweep output is byte-stable across runs") {
  const qpol::testing::ScratchDir dir("stable");
  CommonOptions a, b;
  a.output = (dir.path() / "a.csv").string();
  b.output = (dir.path() / "b.csv").string();
  REQUIRE(run(run_sweep, SweepOptions{"phase-randomized", "0.5:2:0.5", a}).code == kExitOk);
  REQUIRE(run(run_sweep, SweepOptions{"phase-randomized", "0.5:2:0.5", b}).code == kExitOk);
  std::ifstream fa(a.output), fb(b.output);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().rfind(std::string(kSweepHeader) + "\n", 0) == 0);
}

TEST_CASE("sweep of hidden-polarized light follows the same closed form") {
  const qpol::testing::ScratchDir dir("hidden");
  CommonOptions h;
  h.output = (dir.path() / "hidden.csv").string();
  REQUIRE(run(run_sweep, SweepOptions{"hidden-polarized", "0.5:2:0.5", h}).code == kExitOk);
  std::string header;
  const auto hidden = read_csv(h.output, header);
  CHECK(hidden.size() == 4);
  for (const auto& row : hidden) CHECK(row[4] < 1e-6);
}

TEST_CASE("sweep errors") {
  const qpol::testing::ScratchDir dir("sweeperr");
  CommonOptions common;
  common.output = (dir.path() / "s.csv").string();
  CommonOptions bad;
  bad.output = (dir.path() / "missing" / "x.csv").string();
  CHECK(run(run_sweep, SweepOptions{"phase-randomized", "0.1:0.2:0.1", bad}).code == kExitOutput);
  CHECK(run(run_sweep, SweepOptions{"phase-randomized", "1:0:0.1", common}).code == kExitParse);
  CHECK(run(run_sweep, SweepOptions{"qutrit", "0.1:0.2:0.1", common}).code == kExitParse);
  CommonOptions none;
  CHECK(run(run_sweep, SweepOptions{"phase-randomized", "0.1:0.2:0.1", none}).code == kExitParse);
}

TEST_CASE("moment command") {
  const qpol::testing::ScratchDir dir("moment");
  const auto hidden = dir.write("h.state", "format: family-v1\nfamily: hidden-polarized\nparam: n0 1\n");
  const auto pr = dir.write("p.state", "format: family-v1\nfamily: phase-randomized\nparam: n0 1\n");
  const auto one = dir.write("o.state", "format: fockstate-v1\ncutoff: 1\namp: 1 1 1 0\n");
  CHECK(run(run_moment, MomentOptions{hidden.string(), {0, 0, 1, 1}, {}}).out == "1.000000 0.000000\n");
  CHECK(run(run_moment, MomentOptions{pr.string(), {0, 0, 1, 1}, {}}).out == "0.000000 0.000000\n");
  const auto r = run(run_moment, MomentOptions{one.string(), {1, 1, 1, 1}, {}});
  CHECK(r.out == "1.000000 0.000000\n");
  CHECK(r.err.empty());
  const auto w = run(run_moment, MomentOptions{one.string(), {3, 0, 3, 0}, {}});
  CHECK(w.code == kExitOk);
  CHECK(w.err.find("warning") != std::string::npos);
  CHECK(run(run_moment, MomentOptions{(dir.path() / "x").string(), {}, {}}).code == kExitParse);
}
