#pragma once

// Line-oriented network/state description files.
//
//   # comment
//   builtin fig1|fig2
//   element <name> beamsplitter <r> <t> [minus=1|2] in=<a>,<b> out=<c>,<d>
//   element <name> phase_rotator <phi> in=<a> out=<b>
//   source <port>[@+|@-] [vacuum | coherent C | gaussian C <n_ex> C]
//   detector <name> port=<port>
//   command <name>
//   set <key> <value...>
//
// A complex literal C is either two tokens `RE IM` or one token `RE+IMi`.
// `source p` declares the port p as a source (if not already declared) and,
// with a state kind, assigns the state of mode p. The sideband form only
// assigns a state; its port must be declared somewhere in the file.

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "homodyne/mode_state.hpp"
#include "homodyne/network.hpp"

namespace homodyne {

struct SweepRange {
  double min = 0.0;
  double max = 2.0 * std::numbers::pi;
  int steps = 64;
  friend bool operator==(const SweepRange&, const SweepRange&) = default;
};

struct RunParameters {
  std::string command;
  double theta = 0.0;
  double frequency = 0.0;
  SweepRange sweep;
  std::uint64_t shots = 1'000'000;
  std::uint64_t seed = 1;
  int cutoff = 10;
  Complex gamma_plus{1.0, 0.0};
  Complex gamma_minus{1.0, 0.0};
  std::string output;
  friend bool operator==(const RunParameters&, const RunParameters&) = default;
};

struct RunSpec {
  std::string builtin;  // "fig1", "fig2" or empty for a custom network
  Network network;
  StateAssignment states;
  RunParameters params;
  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct ParseError {
  int line = 0;  // 0 for whole-file problems
  std::string message;
};

struct ParseResult {
  std::optional<RunSpec> spec;
  std::vector<ParseError> errors;
  bool ok() const { return spec.has_value(); }
};

inline constexpr std::string_view kCommands[] = {
    "validate", "analyze", "eight-port", "sweep-theta", "sweep-omega",
    "noise",    "refer",   "nogo",       "mc",          "oracle",
};

ParseResult parse_config(std::string_view text);
std::string render(const RunSpec& spec);

// Builtin network with its default states: b coherent 0.5 and l_i coherent 1
// on every sideband the scheme uses.
RunSpec builtin_spec(const std::string& name);
Network builtin_network(const std::string& name);

// Parses `RE+IMi`, `IMi` or a plain real; nullopt when malformed.
std::optional<Complex> parse_complex(std::string_view token);
// Parses a two-token or one-token complex starting at tokens[pos]; advances pos.
std::optional<Complex> parse_complex(const std::vector<std::string>& tokens, std::size_t& pos);

// %.17g, so parsing the text gives back the same double.
std::string format_double(double v);

}  // namespace homodyne
