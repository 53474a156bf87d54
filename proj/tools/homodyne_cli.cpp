#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homodyne/config_io.hpp"
#include "homodyne/error.hpp"
#include "homodyne/fock_oracle.hpp"
#include "homodyne/noise.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/schemes.hpp"
#include "homodyne/state_engine.hpp"

using namespace homodyne;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct Options {
  std::string config;
  std::string builtin;
  std::string output;
  std::optional<double> theta;
  std::optional<double> frequency;
  std::optional<double> sweep_min;
  std::optional<double> sweep_max;
  std::optional<int> steps;
  std::optional<std::uint64_t> shots;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  double max_tail = 1e-12;
  std::string gamma_plus;
  std::string gamma_minus;
  std::string response;
};

std::string num(double v) { return format_double(v); }

std::string complex_literal(Complex c) {
  std::string im = format_double(c.imag());
  if (im.front() != '-') im = "+" + im;
  return format_double(c.real()) + im + "i";
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}
  void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) write_line(os, r);
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << "\n";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

Complex require_complex(const std::string& text, const char* what) {
  const auto c = parse_complex(text);
  if (!c) throw UsageError(std::string("malformed complex literal for ") + what + ": '" + text + "'");
  return *c;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of (Omega, Re R, Im R, S_hn); a non-numeric first line is a header.
std::vector<ResponseSample> read_response(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<ResponseSample> out;
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      const auto c = parse_complex(trim(cell));
      if (!c || c->imag() != 0.0) {
        numeric = false;
        break;
      }
      cells.push_back(c->real());
    }
    if (!numeric && out.empty() && ln == 1) continue;
    if (!numeric || cells.size() != 4) {
      throw UsageError(path + ":" + std::to_string(ln) + ": expected Omega,ReR,ImR,S_hn");
    }
    out.push_back({cells[0], {cells[1], cells[2]}, cells[3]});
  }
  if (out.empty()) throw UsageError(path + ": no response samples");
  return out;
}

const char* default_builtin(const std::string& command) {
  return command == "analyze" || command == "mc" || command == "oracle" || command == "validate" ? "fig1" : "fig2";
}

RunSpec load_spec(const std::string& command, const Options& opt, std::ostream& err, bool for_validate,
                  std::vector<ParseError>* parse_errors) {
  if (!opt.config.empty() && !opt.builtin.empty()) throw UsageError("--config and --builtin are exclusive");
  RunSpec spec;
  if (!opt.config.empty()) {
    auto parsed = parse_config(read_file(opt.config));
    if (!parsed.ok()) {
      if (for_validate && parse_errors) {
        *parse_errors = parsed.errors;
        return spec;
      }
      for (const auto& e : parsed.errors) err << opt.config << ":" << e.line << ": " << e.message << "\n";
      throw UsageError("configuration has errors");
    }
    spec = std::move(*parsed.spec);
  } else {
    spec = builtin_spec(opt.builtin.empty() ? default_builtin(command) : opt.builtin);
  }
  if (!spec.params.command.empty() && spec.params.command != command) {
    err << "note: configuration names command '" << spec.params.command << "', running '" << command << "'\n";
  }
  auto& p = spec.params;
  p.command = command;
  if (opt.theta) p.theta = *opt.theta;
  if (opt.frequency) p.frequency = *opt.frequency;
  if (opt.sweep_min) p.sweep.min = *opt.sweep_min;
  if (opt.sweep_max) p.sweep.max = *opt.sweep_max;
  if (opt.steps) p.sweep.steps = *opt.steps;
  if (opt.shots) p.shots = *opt.shots;
  if (opt.seed) p.seed = *opt.seed;
  if (opt.cutoff) p.cutoff = *opt.cutoff;
  if (!opt.gamma_plus.empty()) p.gamma_plus = require_complex(opt.gamma_plus, "--gamma-plus");
  if (!opt.gamma_minus.empty()) p.gamma_minus = require_complex(opt.gamma_minus, "--gamma-minus");
  if (!opt.output.empty()) p.output = opt.output;
  if (p.sweep.min > p.sweep.max || p.sweep.steps < 1) {
    throw UsageError("sweep range needs min <= max and steps >= 1");
  }
  return spec;
}

std::vector<double> linspace(const SweepRange& r) {
  std::vector<double> out(static_cast<std::size_t>(r.steps));
  for (int k = 0; k < r.steps; ++k) {
    out[static_cast<std::size_t>(k)] = r.steps == 1 ? r.min : r.min + (r.max - r.min) * k / (r.steps - 1);
  }
  return out;
}

Complex oscillator(const RunSpec& spec, Sideband sb) {
  const auto* s = spec.states.find(ModeId(ports::kLocalOscillator, sb));
  if (s == nullptr || !s->is_coherent() || s->mean == Complex{}) {
    throw Error("local oscillator '" + to_string(ModeId(ports::kLocalOscillator, sb)) +
                "' needs a nonzero coherent state");
  }
  return s->mean;
}

// Sideband states with the oscillator rotated to the homodyne angle.
std::pair<HomodyneConfig, StateAssignment> two_photon_setup(const RunSpec& spec, double theta) {
  const double mag = std::abs(oscillator(spec, Sideband::Plus));
  if (std::abs(std::abs(oscillator(spec, Sideband::Minus)) - mag) > 1e-12 * mag) {
    throw Error("two-photon analysis needs |l_i@+| = |l_i@-|");
  }
  const auto cfg = HomodyneConfig::aligned(mag, theta);
  StateAssignment st = spec.states;
  st.set({ports::kLocalOscillator, Sideband::Plus}, ModeState::coherent(cfg.gamma_plus));
  st.set({ports::kLocalOscillator, Sideband::Minus}, ModeState::coherent(cfg.gamma_minus));
  return {cfg, st.bound_to(spec.network, Sideband::Plus).bound_to(spec.network, Sideband::Minus)};
}

std::vector<std::string> breakdown_cells(const SpectralDensityResult& r) {
  return {num(r.total), num(r.breakdown.intrinsic), num(r.breakdown.photon_penalty), num(r.breakdown.vacuum_floor)};
}

Csv cmd_validate(const RunSpec& spec, const std::vector<ParseError>& parse_errors, int& code) {
  Csv csv({"status", "line", "message"});
  for (const auto& e : parse_errors) csv.row({"error", std::to_string(e.line), e.message});
  if (parse_errors.empty()) {
    for (const auto& v : validate(spec.network)) csv.row({"error", "0", std::string(to_string(v.kind)) + ": " + v.message});
  }
  code = 0;
  if (parse_errors.empty() && validate(spec.network).empty()) {
    csv.row({"ok", "0", ""});
  } else {
    code = kExitFailure;
  }
  return csv;
}

Csv cmd_analyze(const RunSpec& spec) {
  const Complex s = expectation(observable_s(spec.network).op(), spec.states.bound_to(spec.network));
  Csv csv({"s_re", "s_im"});
  csv.row({num(s.real()), num(s.imag())});
  return csv;
}

Csv cmd_eight_port(const RunSpec& spec) {
  const auto& net = spec.network;
  const auto st = spec.states.bound_to(net);
  const Complex gamma = oscillator(spec, Sideband::None);
  const auto rec = recover_b(net, gamma);
  const Complex s12 = expectation(observable_sD1D2(net).op(), st);
  const Complex s34 = expectation(observable_sD3D4(net).op(), st);
  const Complex tp = expectation(rec.t_plus.op(), st);
  const Complex tm = expectation(rec.t_minus.op(), st);
  const Complex b = mean_amplitude(st, ports::kSignal);
  Csv csv({"s_D1D2_re", "s_D1D2_im", "s_D3D4_re", "s_D3D4_im", "t_plus_re", "t_plus_im", "t_minus_re", "t_minus_im",
           "b_re", "b_im"});
  csv.row({num(s12.real()), num(s12.imag()), num(s34.real()), num(s34.imag()), num(tp.real()), num(tp.imag()),
           num(tm.real()), num(tm.imag()), num(b.real()), num(b.imag())});
  return csv;
}

Csv cmd_sweep_theta(const RunSpec& spec) {
  const auto thetas = linspace(spec.params.sweep);
  std::vector<std::vector<std::string>> rows(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t k) {
    const double theta = thetas[k];
    const auto [cfg, st] = two_photon_setup(spec, theta);
    const auto noise = t_theta_noise(spec.network, cfg, st, spec.params.frequency);
    const Complex t = expectation(observable_t_theta(spec.network, cfg).t_theta.op(), st);
    const Complex b = expectation(sideband_quadratures(theta).b_theta, st);
    auto row = std::vector<std::string>{num(theta)};
    for (auto& c : breakdown_cells(noise)) row.push_back(std::move(c));
    for (double v : {t.real(), t.imag(), b.real(), b.imag()}) row.push_back(num(v));
    rows[k] = std::move(row);
  });
  Csv csv({"theta", "S_total", "intrinsic", "photon_penalty", "vacuum_floor", "t_theta_re", "t_theta_im",
           "b_theta_re", "b_theta_im"});
  for (auto& r : rows) csv.row(std::move(r));
  return csv;
}

ResponseModel response_or_unit(const Options& opt) {
  if (!opt.response.empty()) return tabulated_response(read_response(opt.response));
  ResponseModel unit;
  unit.response = [](double) { return Complex{1.0}; };
  unit.noise_density = [](double) { return 0.0; };
  return unit;
}

std::vector<std::string> referred_row(double omega, const SpectralDensityResult& noise, const ResponseModel& model) {
  const auto ref = signal_referred(noise, model, omega);
  const Complex r = model.response(omega);
  return {num(omega), num(noise.total), num(r.real()), num(r.imag()), num(ref.total), num(ref.intrinsic),
          num(ref.penalty), num(ref.noise_density), num(ref.model_total)};
}

const std::vector<std::string> kReferredHeader = {"omega", "S_total", "R_re", "R_im", "referred_total",
                                                  "referred_intrinsic", "referred_penalty", "S_hn", "model_total"};

Csv cmd_sweep_omega(const RunSpec& spec, const Options& opt) {
  const auto model = response_or_unit(opt);
  const auto omegas = linspace(spec.params.sweep);
  const auto [cfg, st] = two_photon_setup(spec, spec.params.theta);
  std::vector<std::vector<std::string>> rows(omegas.size());
  parallel_for(omegas.size(), [&, &cfg = cfg, &st = st](std::size_t k) {
    rows[k] = referred_row(omegas[k], t_theta_noise(spec.network, cfg, st, omegas[k]), model);
  });
  Csv csv(kReferredHeader);
  for (auto& r : rows) csv.row(std::move(r));
  return csv;
}

Csv cmd_refer(const RunSpec& spec, const Options& opt) {
  if (opt.response.empty()) throw UsageError("refer needs --response <file>");
  const auto samples = read_response(opt.response);
  const auto model = tabulated_response(samples);
  const auto [cfg, st] = two_photon_setup(spec, spec.params.theta);
  Csv csv(kReferredHeader);
  for (const auto& s : samples) csv.row(referred_row(s.omega, t_theta_noise(spec.network, cfg, st, s.omega), model));
  return csv;
}

Csv cmd_noise(const RunSpec& spec) {
  const Complex gamma = oscillator(spec, Sideband::None);
  const auto r = eight_port_noise(spec.network, gamma, spec.states, spec.params.frequency);
  Csv csv({"frequency", "S_total", "intrinsic", "photon_penalty", "vacuum_floor", "direct"});
  auto row = std::vector<std::string>{num(r.frequency)};
  for (auto& c : breakdown_cells(r)) row.push_back(std::move(c));
  row.push_back(num(r.direct));
  csv.row(std::move(row));
  return csv;
}

Csv cmd_nogo(const RunSpec& spec) {
  const auto cert = check_quadrature_accessibility(spec.params.gamma_plus, spec.params.gamma_minus);
  Csv csv({"decision", "det"});
  csv.row({cert.accessible ? "accessible" : "inaccessible", complex_literal(cert.determinant)});
  return csv;
}

Csv cmd_mc(const RunSpec& spec) {
  const auto& net = spec.network;
  std::vector<std::pair<std::string, PostProcessedObservable>> obs;
  if (net.detectors().size() == 2 && net.has_detector("D1")) {
    obs.emplace_back("s", observable_s(net));
  } else if (net.detectors().size() == 4) {
    obs.emplace_back("s_D1D2", observable_sD1D2(net));
    obs.emplace_back("s_D3D4", observable_sD3D4(net));
    obs.emplace_back("t_plus", recover_b(net, oscillator(spec, Sideband::None)).t_plus);
  }
  const auto r = mc_counts(net, spec.states, spec.params.shots, spec.params.seed, obs);
  Csv csv({"quantity", "estimate_re", "estimate_im", "stderr_re", "stderr_im", "expected_re", "expected_im"});
  const double n = static_cast<double>(r.shots);
  for (const auto& d : net.detectors()) {
    const auto& c = r.detectors.at(d);
    csv.row({d, num(c.mean), "0", num(std::sqrt(c.variance / n)), "0", num(c.expected), "0"});
  }
  for (const auto& e : r.observables) {
    csv.row({e.name, num(e.estimate.real()), num(e.estimate.imag()), num(e.standard_error.real()),
             num(e.standard_error.imag()), num(e.expected.real()), num(e.expected.imag())});
  }
  return csv;
}

Csv cmd_oracle(const RunSpec& spec, const Options& opt) {
  FockConfig cfg;
  cfg.cutoff = spec.params.cutoff;
  cfg.max_tail = opt.max_tail;
  if (const char* env = std::getenv("HOMODYNE_FOCK_MAX_DIM")) {
    try {
      cfg.max_dimension = std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("HOMODYNE_FOCK_MAX_DIM is not a positive integer: '") + env + "'");
    }
  }
  const auto st = spec.states.bound_to(spec.network);
  const auto oracle = oracle_network(spec.network, st, cfg);
  Csv csv({"detector", "oracle_n", "symbolic_n", "abs_diff"});
  for (const auto& d : spec.network.detectors()) {
    const double sym = expectation(detector_operator(spec.network, d), st).real();
    csv.row({d, num(oracle.at(d)), num(sym), num(std::abs(oracle.at(d) - sym))});
  }
  return csv;
}

void emit(const Csv& csv, const std::string& path) {
  if (path.empty()) {
    csv.write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  csv.write(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homodyne readout network analysis. Results are CSV on stdout or --output."};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* sub) {
    auto* cfg = sub->add_option("--config", opt.config, "network/state description file")->check(CLI::ExistingFile);
    sub->add_option("--builtin", opt.builtin, "builtin network (fig1 or fig2)")
        ->check(CLI::IsMember({"fig1", "fig2"}))
        ->excludes(cfg);
    sub->add_option("--output,-o", opt.output, "write CSV to this file");
  };
  auto sweep = [&](CLI::App* sub) {
    sub->add_option("--min", opt.sweep_min, "sweep start");
    sub->add_option("--max", opt.sweep_max, "sweep end (inclusive)");
    sub->add_option("--steps", opt.steps, "number of sweep points")->check(CLI::PositiveNumber);
  };

  auto* validate_cmd = app.add_subcommand("validate", "check a network description");
  auto* analyze = app.add_subcommand("analyze", "<s> for the balanced network");
  auto* eight = app.add_subcommand("eight-port", "eight-port observables and recovered <b>");
  auto* sweep_theta = app.add_subcommand("sweep-theta", "t_theta noise across homodyne angles");
  auto* sweep_omega = app.add_subcommand("sweep-omega", "signal-referred t_theta noise across frequency");
  auto* noise = app.add_subcommand("noise", "eight-port noise spectral density of t_plus");
  auto* refer = app.add_subcommand("refer", "signal-referred noise at tabulated response samples");
  auto* nogo = app.add_subcommand("nogo", "quadrature accessibility of conventional balanced homodyne");
  auto* mc = app.add_subcommand("mc", "Monte-Carlo photocounting");
  auto* oracle = app.add_subcommand("oracle", "truncated-Fock brute-force detector photon numbers");

  for (auto* sub : {validate_cmd, analyze, eight, sweep_theta, sweep_omega, noise, refer, nogo, mc, oracle}) {
    common(sub);
  }
  sweep(sweep_theta);
  sweep(sweep_omega);
  for (auto* sub : {sweep_theta, sweep_omega, noise, refer}) {
    sub->add_option("--frequency", opt.frequency, "analysis frequency (informational)");
  }
  for (auto* sub : {sweep_omega, refer}) sub->add_option("--theta", opt.theta, "homodyne angle");
  for (auto* sub : {sweep_omega, refer}) {
    sub->add_option("--response", opt.response, "CSV of Omega,ReR,ImR,S_hn")->check(CLI::ExistingFile);
  }
  refer->get_option("--response")->required();
  nogo->add_option("--gamma-plus", opt.gamma_plus, "oscillator amplitude at the upper sideband");
  nogo->add_option("--gamma-minus", opt.gamma_minus, "oscillator amplitude at the lower sideband");
  mc->add_option("--shots", opt.shots, "number of shots")->check(CLI::PositiveNumber);
  mc->add_option("--seed", opt.seed, "random seed");
  oracle->add_option("--cutoff", opt.cutoff, "photons per mode")->check(CLI::Range(2, 200));
  oracle->add_option("--max-tail", opt.max_tail, "allowed probability above the cutoff")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string command = chosen->get_name();
  try {
    std::vector<ParseError> parse_errors;
    const RunSpec spec = load_spec(command, opt, std::cerr, command == "validate", &parse_errors);
    int code = 0;
    Csv csv({});
    if (command == "validate") csv = cmd_validate(spec, parse_errors, code);
    else if (command == "analyze") csv = cmd_analyze(spec);
    else if (command == "eight-port") csv = cmd_eight_port(spec);
    else if (command == "sweep-theta") csv = cmd_sweep_theta(spec);
    else if (command == "sweep-omega") csv = cmd_sweep_omega(spec, opt);
    else if (command == "noise") csv = cmd_noise(spec);
    else if (command == "refer") csv = cmd_refer(spec, opt);
    else if (command == "nogo") csv = cmd_nogo(spec);
    else if (command == "mc") csv = cmd_mc(spec);
    else csv = cmd_oracle(spec, opt);
    emit(csv, spec.params.output);
    return code;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
