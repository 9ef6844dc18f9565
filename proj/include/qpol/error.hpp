#pragma once

#include <iomanip>
#include <locale>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qpol {

// Base of every error the library raises. Callers that only need a message can
// catch this; the CLI maps the concrete subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Fock index (or photon count) lies beyond the truncation cutoff.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Normalization was requested for an all-zero amplitude table.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

// Weights or traces that must sum to one do not.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// Argument outside a function's mathematical domain (e.g. negative Bessel argument).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for the given state family.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Precondition on the input value was violated (e.g. unnormalized state passed
// where a normalized one is required).
class ContractError : public Error {
 public:
  using Error::Error;
};

// The probability mass lost to truncation exceeds the tolerance. Carries the
// smallest cutoff that would have been adequate.
class CutoffTooSmallError : public Error {
 public:
  CutoffTooSmallError(int requested, int minimal, double tail)
      : Error(describe(requested, minimal, tail)),
        requested_(requested),
        minimal_(minimal),
        tail_(tail) {}

  int requested_cutoff() const noexcept { return requested_; }
  int minimal_cutoff() const noexcept { return minimal_; }
  double tail_mass() const noexcept { return tail_; }

 private:
  static std::string describe(int requested, int minimal, double tail) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << "cutoff " << requested << " too small (tail mass " << std::scientific
      << std::setprecision(3) << tail << "); minimal adequate cutoff is " << minimal;
    return s.str();
  }

  int requested_;
  int minimal_;
  double tail_;
};

// Malformed state-spec file or command argument. `line()` is 1-based, or 0
// when the problem is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, int line, const std::string& message)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace qpol
