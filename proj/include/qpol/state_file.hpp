#pragma once

// Line-oriented state-spec files.
//
//   format: fockstate-v1          format: family-v1
//   cutoff: 2                     family: phase-randomized
//   amp: 2 0 0.333... 0           param: n0 1
//   amp: 1 1 0.666... 0           cutoff: 25        (optional)
//
// Blank lines and lines starting with '#' are ignored. Unknown keys, repeated
// single-valued keys and duplicate amp indices are rejected. Numbers are
// plain decimals with an optional exponent and are parsed independently of
// the process locale.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "qpol/fock.hpp"
#include "qpol/states.hpp"

namespace qpol {

using StateSpec = std::variant<FockState, StateFamily>;

StateSpec parse_state_spec(std::istream& in, const std::string& source = "<input>");
StateSpec read_state_spec(const std::filesystem::path& path);

// Writes every nonzero amplitude with 17 significant digits, so reparsing
// reproduces the amplitudes bit for bit.
void write_fockstate(std::ostream& out, const FockState& state);
void write_family(std::ostream& out, const StateFamily& family);

// Strict decimal parsing; throws ParseError (line 0) on anything else.
double parse_decimal(std::string_view text);
int parse_count(std::string_view text);

/// start:stop:step, inclusive of stop up to rounding.
struct SweepRange {
  double start;
  double stop;
  double step;

  // floor((stop - start) / step) + 1, with a small guard so that e.g.
  // 0.1:4.0:0.1 yields 40 points despite binary rounding.
  std::size_t count() const;
  double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

SweepRange parse_sweep_range(std::string_view text);

}  // namespace qpol
