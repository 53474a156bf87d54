#include "homodyne/config_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "homodyne/error.hpp"
#include "homodyne/schemes.hpp"

namespace homodyne {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_commas(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.emplace_back(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_complex(Complex c) { return format_double(c.real()) + " " + format_double(c.imag()); }

std::string render_state(const ModeState& s) {
  switch (s.kind) {
    case ModeState::Kind::Vacuum:
      return "vacuum";
    case ModeState::Kind::Coherent:
      return "coherent " + format_complex(s.mean);
    case ModeState::Kind::Gaussian:
      return "gaussian " + format_complex(s.mean) + " " + format_double(s.excess) + " " +
             format_complex(s.anomalous);
  }
  return "vacuum";
}

struct Parser {
  ParseResult result;
  RunSpec spec;
  std::map<std::string, int> element_line;
  std::vector<std::pair<ModeId, int>> sideband_states;
  bool has_elements = false;

  void error(int line, std::string message) { result.errors.push_back({line, std::move(message)}); }

  // Splits trailing key=value tokens off the positional ones.
  static std::map<std::string, std::string> options(std::vector<std::string>& tokens, std::size_t from) {
    std::map<std::string, std::string> opts;
    auto it = std::stable_partition(tokens.begin() + static_cast<std::ptrdiff_t>(from), tokens.end(),
                                    [](const std::string& t) { return t.find('=') == std::string::npos; });
    for (auto kv = it; kv != tokens.end(); ++kv) {
      const auto eq = kv->find('=');
      opts[kv->substr(0, eq)] = kv->substr(eq + 1);
    }
    tokens.erase(it, tokens.end());
    return opts;
  }

  void parse_element(int ln, std::vector<std::string> tok) {
    if (tok.size() < 3) return error(ln, "element record needs a name and a kind");
    has_elements = true;
    auto opts = options(tok, 3);
    const std::string& name = tok[1];
    const std::string& kind = tok[2];
    const auto ins = opts.contains("in") ? split_commas(opts["in"]) : std::vector<std::string>{};
    const auto outs = opts.contains("out") ? split_commas(opts["out"]) : std::vector<std::string>{};
    for (const auto& key : {"in", "out"}) opts.erase(key);
    for (const auto& p : ins) if (p.empty()) return error(ln, "empty port name in element '" + name + "'");
    for (const auto& p : outs) if (p.empty()) return error(ln, "empty port name in element '" + name + "'");

    Element el{name, Source{}, ins, outs};
    if (kind == "beamsplitter") {
      if (ins.size() != 2 || outs.size() != 2) {
        return error(ln, "unbalanced ports: beamsplitter '" + name + "' needs in=a,b and out=c,d");
      }
      if (tok.size() != 5) return error(ln, "beamsplitter '" + name + "' needs the parameters r t");
      const auto r = parse_real(tok[3]);
      const auto t = parse_real(tok[4]);
      if (!r || !t) return error(ln, "malformed number in beamsplitter '" + name + "'");
      MinusPort minus = MinusPort::Second;
      if (auto m = opts.find("minus"); m != opts.end()) {
        if (m->second == "1") minus = MinusPort::First;
        else if (m->second != "2") return error(ln, "minus= must be 1 or 2");
        opts.erase(m);
      }
      el.kind = BeamSplitter{*r, *t, minus};
    } else if (kind == "phase_rotator") {
      if (ins.size() != 1 || outs.size() != 1) {
        return error(ln, "unbalanced ports: phase_rotator '" + name + "' needs in=a and out=b");
      }
      if (tok.size() != 4) return error(ln, "phase_rotator '" + name + "' needs the parameter phi");
      const auto phi = parse_real(tok[3]);
      if (!phi) return error(ln, "malformed number in phase_rotator '" + name + "'");
      el.kind = PhaseRotator{*phi};
    } else {
      return error(ln, "unknown element kind '" + kind + "'");
    }
    if (!opts.empty()) return error(ln, "unknown option '" + opts.begin()->first + "'");
    element_line.emplace(name, ln);
    spec.network.add_element(std::move(el));
  }

  void parse_source(int ln, const std::vector<std::string>& tok) {
    if (tok.size() < 2) return error(ln, "source record needs a port");
    std::string port = tok[1];
    Sideband sb = Sideband::None;
    if (const auto at = port.find('@'); at != std::string::npos) {
      const std::string tag = port.substr(at + 1);
      if (tag == "+") sb = Sideband::Plus;
      else if (tag == "-") sb = Sideband::Minus;
      else return error(ln, "unknown sideband '@" + tag + "'");
      port.resize(at);
    }
    if (port.empty()) return error(ln, "source record needs a port");
    if (sb == Sideband::None && !spec.network.has_source(port)) {
      if (!spec.builtin.empty()) return error(ln, "builtin network has no source '" + port + "'");
      element_line.emplace(port, ln);
      spec.network.add_source(port);
    } else if (sb != Sideband::None) {
      sideband_states.emplace_back(ModeId{port, sb}, ln);
    }
    if (tok.size() == 2) return;

    const std::string& kind = tok[2];
    std::size_t pos = 3;
    ModeState state;
    if (kind == "vacuum") {
      state = ModeState::vacuum();
    } else if (kind == "coherent") {
      const auto c = parse_complex(tok, pos);
      if (!c) return error(ln, "malformed complex literal in coherent state of '" + tok[1] + "'");
      state = ModeState::coherent(*c);
    } else if (kind == "gaussian") {
      const auto mean = parse_complex(tok, pos);
      if (!mean) return error(ln, "malformed complex literal for the mean of '" + tok[1] + "'");
      if (pos >= tok.size()) return error(ln, "gaussian state of '" + tok[1] + "' needs n_ex");
      const auto excess = parse_real(tok[pos++]);
      if (!excess) return error(ln, "malformed number for n_ex of '" + tok[1] + "'");
      const auto anomalous = parse_complex(tok, pos);
      if (!anomalous) return error(ln, "malformed complex literal for the anomalous moment of '" + tok[1] + "'");
      state = ModeState::gaussian(*mean, *excess, *anomalous);
      if (!state.is_physical()) return error(ln, "unphysical Gaussian moments for '" + tok[1] + "'");
    } else {
      return error(ln, "unknown state kind '" + kind + "'");
    }
    if (pos != tok.size()) return error(ln, "unexpected trailing tokens in source '" + tok[1] + "'");
    spec.states.set(ModeId{port, sb}, state);
  }

  void parse_detector(int ln, std::vector<std::string> tok) {
    if (tok.size() < 2) return error(ln, "detector record needs a name");
    has_elements = true;
    auto opts = options(tok, 2);
    if (tok.size() != 2 || !opts.contains("port") || opts.size() != 1 || opts["port"].empty()) {
      return error(ln, "detector record must be: detector <name> port=<port>");
    }
    element_line.emplace(tok[1], ln);
    spec.network.add_detector(tok[1], opts["port"]);
  }

  void parse_set(int ln, const std::vector<std::string>& tok) {
    if (tok.size() < 3) return error(ln, "set record needs a key and a value");
    const std::string& key = tok[1];
    auto& p = spec.params;
    auto single_real = [&](double& dst) {
      const auto v = tok.size() == 3 ? parse_real(tok[2]) : std::nullopt;
      if (!v) return error(ln, "malformed value for '" + key + "'");
      dst = *v;
    };
    if (key == "theta") {
      single_real(p.theta);
    } else if (key == "frequency") {
      single_real(p.frequency);
    } else if (key == "sweep") {
      if (tok.size() != 5) return error(ln, "sweep must be: set sweep <min> <max> <steps>");
      const auto lo = parse_real(tok[2]);
      const auto hi = parse_real(tok[3]);
      const auto n = parse_integer<int>(tok[4]);
      if (!lo || !hi || !n) return error(ln, "sweep must be: set sweep <min> <max> <steps>");
      const SweepRange range{*lo, *hi, *n};
      if (range.min > range.max || range.steps < 1) {
        return error(ln, "sweep range needs min <= max and steps >= 1");
      }
      p.sweep = range;
    } else if (key == "shots" || key == "seed") {
      const auto v = tok.size() == 3 ? parse_integer<std::uint64_t>(tok[2]) : std::nullopt;
      if (!v) return error(ln, "malformed value for '" + key + "'");
      (key == "shots" ? p.shots : p.seed) = *v;
    } else if (key == "cutoff") {
      const auto v = tok.size() == 3 ? parse_integer<int>(tok[2]) : std::nullopt;
      if (!v || *v < 2) return error(ln, "cutoff must be an integer >= 2");
      p.cutoff = *v;
    } else if (key == "gamma_plus" || key == "gamma_minus") {
      std::size_t pos = 2;
      const auto c = parse_complex(tok, pos);
      if (!c || pos != tok.size()) return error(ln, "malformed complex literal for '" + key + "'");
      (key == "gamma_plus" ? p.gamma_plus : p.gamma_minus) = *c;
    } else if (key == "output") {
      if (tok.size() != 3) return error(ln, "output path must be a single token");
      p.output = tok[2];
    } else {
      error(ln, "unknown setting '" + key + "'");
    }
  }

  void parse_line(int ln, std::string_view raw) {
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto tok = tokenize(raw);
    if (tok.empty()) return;
    const std::string& rec = tok[0];
    if (rec == "element") {
      parse_element(ln, std::move(tok));
    } else if (rec == "source") {
      parse_source(ln, tok);
    } else if (rec == "detector") {
      parse_detector(ln, std::move(tok));
    } else if (rec == "builtin") {
      if (tok.size() != 2) return error(ln, "builtin record must be: builtin fig1|fig2");
      if (!spec.builtin.empty() || !spec.network.elements().empty()) {
        return error(ln, "builtin must be the first network record");
      }
      try {
        spec.network = builtin_network(tok[1]);
        spec.builtin = tok[1];
      } catch (const Error& e) {
        error(ln, e.what());
      }
    } else if (rec == "command") {
      if (tok.size() != 2) return error(ln, "command record must name one command");
      if (std::find(std::begin(kCommands), std::end(kCommands), tok[1]) == std::end(kCommands)) {
        return error(ln, "unknown command '" + tok[1] + "'");
      }
      if (!spec.params.command.empty()) return error(ln, "only one command per file");
      spec.params.command = tok[1];
    } else if (rec == "set") {
      parse_set(ln, tok);
    } else {
      error(ln, "unknown record '" + rec + "'");
    }
  }

  void finish() {
    if (!spec.builtin.empty() && has_elements) {
      error(0, "a builtin network cannot be extended with element or detector records");
    }
    for (const auto& [mode, ln] : sideband_states) {
      if (!spec.network.has_source(mode.port)) error(ln, "state for undeclared source '" + mode.port + "'");
    }
    if (result.errors.empty()) {
      for (const auto& v : validate(spec.network)) {
        auto it = element_line.find(v.element);
        const std::string kind(to_string(v.kind));
        error(it == element_line.end() ? 0 : it->second, v.message == kind ? kind : kind + ": " + v.message);
      }
    }
    std::stable_sort(result.errors.begin(), result.errors.end(),
                     [](const ParseError& a, const ParseError& b) { return a.line < b.line; });
    if (result.errors.empty()) result.spec = std::move(spec);
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<Complex> parse_complex(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    if (auto re = parse_real(s)) return Complex{*re, 0.0};
    return std::nullopt;
  }
  s.remove_suffix(1);
  // Split at the last sign that is not a leading sign or an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](std::string_view t) -> std::optional<double> {
    if (t == "+" || t == "") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string_view::npos) {
    const auto im = imag_part(s);
    if (!im) return std::nullopt;
    return Complex{0.0, *im};
  }
  const auto re = parse_real(s.substr(0, split));
  const auto im = imag_part(s.substr(split));
  if (!re || !im) return std::nullopt;
  return Complex{*re, *im};
}

std::optional<Complex> parse_complex(const std::vector<std::string>& tokens, std::size_t& pos) {
  if (pos >= tokens.size()) return std::nullopt;
  if (!tokens[pos].empty() && tokens[pos].back() == 'i') {
    auto c = parse_complex(tokens[pos]);
    if (c) ++pos;
    return c;
  }
  if (pos + 1 >= tokens.size()) return std::nullopt;
  const auto re = parse_real(tokens[pos]);
  const auto im = parse_real(tokens[pos + 1]);
  if (!re || !im) return std::nullopt;
  pos += 2;
  return Complex{*re, *im};
}

ParseResult parse_config(std::string_view text) {
  Parser p;
  int ln = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    p.parse_line(++ln, line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  p.finish();
  return std::move(p.result);
}

std::string render(const RunSpec& spec) {
  std::ostringstream out;
  std::set<ModeId> rendered;
  if (!spec.builtin.empty()) {
    out << "builtin " << spec.builtin << "\n";
  } else {
    for (const auto& el : spec.network.elements()) {
      if (std::holds_alternative<Source>(el.kind)) {
        const std::string& port = el.outputs.front();
        out << "source " << port;
        if (const auto* s = spec.states.find(ModeId{port})) {
          out << " " << render_state(*s);
          rendered.insert(ModeId{port});
        }
        out << "\n";
      } else if (const auto* bs = std::get_if<BeamSplitter>(&el.kind)) {
        out << "element " << el.name << " beamsplitter " << format_double(bs->r) << " " << format_double(bs->t)
            << " minus=" << (bs->minus == MinusPort::First ? 1 : 2) << " in=" << el.inputs[0] << ","
            << el.inputs[1] << " out=" << el.outputs[0] << "," << el.outputs[1] << "\n";
      } else if (const auto* pr = std::get_if<PhaseRotator>(&el.kind)) {
        out << "element " << el.name << " phase_rotator " << format_double(pr->phi) << " in=" << el.inputs[0]
            << " out=" << el.outputs[0] << "\n";
      } else {
        out << "detector " << el.name << " port=" << el.inputs.front() << "\n";
      }
    }
  }
  for (const auto& [mode, state] : spec.states.states()) {
    if (rendered.contains(mode)) continue;
    out << "source " << mode.port;
    if (mode.sideband != Sideband::None) out << "@" << to_string(mode.sideband);
    out << " " << render_state(state) << "\n";
  }
  const auto& p = spec.params;
  if (!p.command.empty()) out << "command " << p.command << "\n";
  out << "set theta " << format_double(p.theta) << "\n"
      << "set frequency " << format_double(p.frequency) << "\n"
      << "set sweep " << format_double(p.sweep.min) << " " << format_double(p.sweep.max) << " " << p.sweep.steps
      << "\n"
      << "set shots " << p.shots << "\n"
      << "set seed " << p.seed << "\n"
      << "set cutoff " << p.cutoff << "\n"
      << "set gamma_plus " << format_complex(p.gamma_plus) << "\n"
      << "set gamma_minus " << format_complex(p.gamma_minus) << "\n";
  if (!p.output.empty()) out << "set output " << p.output << "\n";
  return out.str();
}

Network builtin_network(const std::string& name) {
  if (name == "fig1") return build_balanced_homodyne();
  if (name == "fig2") return build_eight_port();
  throw Error("unknown builtin network '" + name + "' (expected fig1 or fig2)");
}

RunSpec builtin_spec(const std::string& name) {
  RunSpec spec;
  spec.builtin = name;
  spec.network = builtin_network(name);
  for (Sideband sb : {Sideband::None, Sideband::Plus, Sideband::Minus}) {
    if (name == "fig1" && sb != Sideband::None) continue;
    spec.states.set(ModeId{ports::kSignal, sb}, ModeState::coherent(0.5));
    spec.states.set(ModeId{ports::kLocalOscillator, sb}, ModeState::coherent(1.0));
  }
  return spec;
}

}  // namespace homodyne
