#include "qpol/state_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "qpol/error.hpp"

namespace qpol {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

struct Line {
  int number;
  std::string key;
  std::string value;
};

class SpecParser {
 public:
  SpecParser(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto t = trim(raw);
      if (t.empty() || t.front() == '#') continue;
      const auto colon = t.find(':');
      if (colon == std::string_view::npos) fail(number, "expected 'key: value'");
      lines_.push_back({number, std::string(trim(t.substr(0, colon))),
                        std::string(trim(t.substr(colon + 1)))});
    }
  }

  StateSpec parse() {
    if (lines_.empty()) fail(0, "empty file");
    const auto& head = lines_.front();
    if (head.key != "format") fail(head.number, "first line must be 'format: <name>-v1'");
    if (head.value == "fockstate-v1") return parse_fockstate();
    if (head.value == "family-v1") return parse_family();
    fail(head.number, "unknown format '" + head.value + "'");
  }

 private:
  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ParseError(source_, line, message);
  }

  template <typename F>
  auto guarded(int line, F&& f) const {
    try {
      return f();
    } catch (const ParseError& e) {
      fail(line, e.what());
    }
  }

  double number(int line, std::string_view text) const {
    return guarded(line, [&] { return parse_decimal(text); });
  }

  int count(int line, std::string_view text) const {
    return guarded(line, [&] { return parse_count(text); });
  }

  FockState parse_fockstate() {
    std::optional<int> cutoff;
    std::vector<AmplitudeEntry> entries;
    std::set<std::pair<int, int>> seen;
    for (std::size_t i = 1; i < lines_.size(); ++i) {
      const auto& l = lines_[i];
      if (l.key == "cutoff") {
        if (cutoff) fail(l.number, "duplicate 'cutoff'");
        cutoff = count(l.number, l.value);
      } else if (l.key == "amp") {
        if (!cutoff) fail(l.number, "'amp' before 'cutoff'");
        const auto tok = split_ws(l.value);
        if (tok.size() != 4) fail(l.number, "expected 'amp: n_x n_y re im'");
        const int nx = count(l.number, tok[0]);
        const int ny = count(l.number, tok[1]);
        if (nx > *cutoff || ny > *cutoff) {
          fail(l.number, fmt::format("index ({}, {}) beyond cutoff {}", nx, ny, *cutoff));
        }
        if (!seen.insert({nx, ny}).second) {
          fail(l.number, fmt::format("duplicate amplitude for ({}, {})", nx, ny));
        }
        entries.push_back({nx, ny, {number(l.number, tok[2]), number(l.number, tok[3])}});
      } else {
        fail(l.number, "unknown key '" + l.key + "' in fockstate-v1");
      }
    }
    if (!cutoff) fail(0, "missing 'cutoff'");
    if (entries.empty()) fail(0, "no 'amp' lines");
    return make_pure_state(entries, *cutoff, false);
  }

  StateFamily parse_family() {
    std::optional<FamilyKind> kind;
    int family_line = 0;
    StateFamily f{FamilyKind::BiphotonQutrit, {}, std::nullopt};
    for (std::size_t i = 1; i < lines_.size(); ++i) {
      const auto& l = lines_[i];
      if (l.key == "family") {
        if (kind) fail(l.number, "duplicate 'family'");
        kind = family_from_name(l.value);
        if (!kind) fail(l.number, "unknown family '" + l.value + "'");
        family_line = l.number;
      } else if (l.key == "param") {
        const auto tok = split_ws(l.value);
        if (tok.size() != 2) fail(l.number, "expected 'param: <key> <real>'");
        const std::string key(tok[0]);
        if (f.params.contains(key)) fail(l.number, "duplicate parameter '" + key + "'");
        f.params[key] = number(l.number, tok[1]);
      } else if (l.key == "cutoff") {
        if (f.cutoff) fail(l.number, "duplicate 'cutoff'");
        f.cutoff = count(l.number, l.value);
      } else {
        fail(l.number, "unknown key '" + l.key + "' in family-v1");
      }
    }
    if (!kind) fail(0, "missing 'family'");
    f.kind = *kind;
    try {
      validate_family(f);
      (void)minimal_cutoff(f);  // domain checks on parameter values
    } catch (const CutoffTooSmallError&) {
      throw;
    } catch (const Error& e) {
      fail(family_line, e.what());
    }
    return f;
  }

  std::string source_;
  std::vector<Line> lines_;
};

const std::regex& decimal_pattern() {
  static const std::regex re(R"([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)");
  return re;
}

}  // namespace

double parse_decimal(std::string_view text) {
  const std::string s(text);
  if (!std::regex_match(s, decimal_pattern())) {
    throw ParseError("number", 0, "not a decimal number: '" + s + "'");
  }
  // from_chars rejects a leading '+'.
  const char* begin = s.data() + (s.front() == '+' ? 1 : 0);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ParseError("number", 0, "number out of range: '" + s + "'");
  }
  return value;
}

int parse_count(std::string_view text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw ParseError("number", 0, "not a nonnegative integer: '" + std::string(text) + "'");
  }
  return value;
}

StateSpec parse_state_spec(std::istream& in, const std::string& source) {
  return SpecParser(in, source).parse();
}

StateSpec read_state_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_state_spec(in, path.string());
}

void write_fockstate(std::ostream& out, const FockState& state) {
  out << "format: fockstate-v1\n";
  out << "cutoff: " << state.cutoff() << '\n';
  for (int nx = 0; nx <= state.cutoff(); ++nx) {
    for (int ny = 0; ny <= state.cutoff(); ++ny) {
      const Complex a = state.amplitude(nx, ny);
      if (a == Complex(0.0, 0.0)) continue;
      out << fmt::format("amp: {} {} {:.17g} {:.17g}\n", nx, ny, a.real(), a.imag());
    }
  }
}

void write_family(std::ostream& out, const StateFamily& family) {
  out << "format: family-v1\n";
  out << "family: " << family_name(family.kind) << '\n';
  for (const auto& [key, value] : family.params) {
    out << fmt::format("param: {} {:.17g}\n", key, value);
  }
  if (family.cutoff) out << "cutoff: " << *family.cutoff << '\n';
}

std::size_t SweepRange::count() const {
  return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

SweepRange parse_sweep_range(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ':') {
      parts.push_back(trim(text.substr(begin, i - begin)));
      begin = i + 1;
    }
  }
  if (parts.size() != 3) throw ParseError("range", 0, "expected start:stop:step");
  SweepRange r{parse_decimal(parts[0]), parse_decimal(parts[1]), parse_decimal(parts[2])};
  if (!(r.step > 0.0)) throw ParseError("range", 0, "step must be positive");
  if (r.start > r.stop) throw ParseError("range", 0, "start must not exceed stop");
  return r;
}

}  // namespace qpol
