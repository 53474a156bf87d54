#include "homodyne/noise.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "homodyne/error.hpp"
#include "homodyne/parallel.hpp"
#include "homodyne/state_engine.hpp"

namespace homodyne {

namespace {

constexpr double kZeroMeanTol = 1e-12;
constexpr double kImagTol = 1e-12;
constexpr double kClosedFormTol = 1e-10;
constexpr std::uint64_t kShotsPerBatch = 1u << 16;

// Expectation together with sum_k |c_k <m_k>|, the scale for rounding checks.
std::pair<Complex, double> expectation_and_scale(const OperatorPoly& p, const StateAssignment& states) {
  Complex total{};
  double scale = 0.0;
  for (const auto& [sig, c] : p.terms()) {
    const Complex v = expectation(OperatorPoly::term(c, sig), states);
    total += v;
    scale += std::abs(v);
  }
  return {total, std::max(1.0, scale)};
}

bool is_vacuum(const ModeState& s) { return s.is_coherent() && s.mean == Complex{}; }

void require_vacuum(const StateAssignment& states, const ModeId& mode) {
  const auto* s = states.find(mode);
  if (s != nullptr && !is_vacuum(*s)) {
    throw NoiseError("mode '" + to_string(mode) + "' must be in the vacuum state");
  }
}

void require_oscillator(const StateAssignment& states, const ModeId& mode, Complex gamma) {
  const auto& s = states.at(mode);
  if (!s.is_coherent() || std::abs(s.mean - gamma) > 1e-12 * std::max(1.0, std::abs(gamma))) {
    throw NoiseError("mode '" + to_string(mode) + "' must be coherent with the oscillator amplitude");
  }
}

void check_closed_form(double direct, double closed, const char* what) {
  if (std::abs(direct - closed) > kClosedFormTol * std::max(1.0, std::abs(closed))) {
    throw NoiseError(std::string(what) + ": operator density " + std::to_string(direct) +
                     " disagrees with closed form " + std::to_string(closed));
  }
}

}  // namespace

NoiseOperator make_noise_operator(const OperatorPoly& base, const StateAssignment& states) {
  const Complex mean = expectation(base, states);
  return {base, mean, base - OperatorPoly::scalar(mean)};
}

double spectral_density(const OperatorPoly& q, const StateAssignment& states) {
  const auto [mean, mean_scale] = expectation_and_scale(q, states);
  if (std::abs(mean) > kZeroMeanTol * mean_scale) {
    throw NoiseError("spectral density needs a zero-mean operator");
  }
  const OperatorPoly q_dag = adjoint(q);
  const OperatorPoly sym = multiply(q, q_dag) + multiply(q_dag, q);
  const auto [value, scale] = expectation_and_scale(sym, states);
  if (std::abs(value.imag()) > kImagTol * scale) {
    throw NoiseError("spectral density has an imaginary residue of " + std::to_string(value.imag()));
  }
  return value.real();
}

double spectral_density(const NoiseOperator& q, const StateAssignment& states) {
  return spectral_density(q.fluctuation, states);
}

SpectralDensityResult eight_port_noise(const Network& net, Complex gamma, const StateAssignment& states,
                                       double frequency) {
  if (gamma == Complex{}) throw NoiseError("local-oscillator amplitude must be nonzero");
  const StateAssignment bound = states.bound_to(net);
  require_oscillator(bound, ModeId(ports::kLocalOscillator), gamma);
  require_vacuum(bound, ModeId(ports::kSignalVacuum));
  require_vacuum(bound, ModeId(ports::kOscillatorVacuum));

  const auto rec = recover_b(net, gamma);
  const double s_plus = spectral_density(make_noise_operator(rec.t_plus.op(), bound), bound);
  const double s_minus = spectral_density(make_noise_operator(rec.t_minus.op(), bound), bound);

  const ModeId b(ports::kSignal);
  SpectralDensityResult out;
  out.frequency = frequency;
  out.direct = s_plus;
  out.breakdown.intrinsic = spectral_density(make_noise_operator(OperatorPoly::annihilator(b), bound), bound);
  out.breakdown.photon_penalty =
      2.0 * expectation(OperatorPoly::number(b), bound).real() / std::norm(gamma);
  out.breakdown.vacuum_floor = 1.0;
  out.total = out.breakdown.intrinsic + out.breakdown.photon_penalty + out.breakdown.vacuum_floor;
  check_closed_form(s_plus, out.total, "t_plus noise");
  check_closed_form(s_minus, s_plus, "t_minus noise");
  return out;
}

SpectralDensityResult t_theta_noise(const Network& net, const HomodyneConfig& config,
                                    const StateAssignment& states, double frequency) {
  const double mag = std::abs(config.gamma_plus);
  if (std::abs(std::abs(config.gamma_minus) - mag) > 1e-12 * std::max(1.0, mag)) {
    throw NoiseError("t_theta noise needs |gamma_plus| = |gamma_minus|");
  }
  const auto obs = observable_t_theta(net, config);
  const StateAssignment bound = states.bound_to(net, Sideband::Plus).bound_to(net, Sideband::Minus);
  require_oscillator(bound, ModeId(ports::kLocalOscillator, Sideband::Plus), config.gamma_plus);
  require_oscillator(bound, ModeId(ports::kLocalOscillator, Sideband::Minus), config.gamma_minus);
  for (auto sb : {Sideband::Plus, Sideband::Minus}) {
    require_vacuum(bound, ModeId(ports::kSignalVacuum, sb));
    require_vacuum(bound, ModeId(ports::kOscillatorVacuum, sb));
  }

  const auto quad = sideband_quadratures(config.theta);
  SpectralDensityResult out;
  out.frequency = frequency;
  out.direct = spectral_density(make_noise_operator(obs.t_theta.op(), bound), bound);
  out.breakdown.intrinsic = spectral_density(make_noise_operator(quad.b_theta, bound), bound);
  const double photons = expectation(OperatorPoly::number(ModeId(ports::kSignal, Sideband::Plus)) +
                                         OperatorPoly::number(ModeId(ports::kSignal, Sideband::Minus)),
                                     bound)
                             .real();
  out.breakdown.photon_penalty = photons / (mag * mag);
  out.breakdown.vacuum_floor = 1.0;
  out.total = out.breakdown.intrinsic + out.breakdown.photon_penalty + out.breakdown.vacuum_floor;
  check_closed_form(out.direct, out.total, "t_theta noise");
  return out;
}

SignalReferredNoise signal_referred(const SpectralDensityResult& noise, const ResponseModel& model,
                                    double omega) {
  if (!model.response) throw NoiseError("response model has no R(Omega)");
  const double r2 = std::norm(model.response(omega));
  if (!(r2 > 0.0)) throw NoiseError("response null at Omega = " + std::to_string(omega));
  SignalReferredNoise out;
  out.total = noise.total / r2;
  out.intrinsic = noise.breakdown.intrinsic / r2;
  out.penalty = (noise.breakdown.photon_penalty + noise.breakdown.vacuum_floor) / r2;
  out.noise_density = model.noise_density ? model.noise_density(omega) : 0.0;
  out.model_total = out.noise_density + out.penalty;
  return out;
}

ResponseModel tabulated_response(std::vector<ResponseSample> samples) {
  if (samples.empty()) throw NoiseError("response table is empty");
  std::sort(samples.begin(), samples.end(),
            [](const ResponseSample& a, const ResponseSample& b) { return a.omega < b.omega; });
  auto table = std::make_shared<const std::vector<ResponseSample>>(std::move(samples));
  auto lookup = [table](double omega) -> ResponseSample {
    const auto& t = *table;
    if (omega <= t.front().omega) return t.front();
    if (omega >= t.back().omega) return t.back();
    auto hi = std::upper_bound(t.begin(), t.end(), omega,
                               [](double w, const ResponseSample& s) { return w < s.omega; });
    auto lo = hi - 1;
    const double f = (omega - lo->omega) / (hi->omega - lo->omega);
    return {omega, lo->response + f * (hi->response - lo->response),
            lo->noise_density + f * (hi->noise_density - lo->noise_density)};
  };
  ResponseModel model;
  model.response = [lookup](double w) { return lookup(w).response; };
  model.noise_density = [lookup](double w) { return lookup(w).noise_density; };
  return model;
}

McResult mc_counts(const Network& net, const StateAssignment& states, std::uint64_t shots, std::uint64_t seed,
                   const std::vector<std::pair<std::string, PostProcessedObservable>>& observables,
                   Sideband sideband) {
  if (shots == 0) throw NoiseError("Monte-Carlo run needs at least one shot");
  const StateAssignment bound = states.bound_to(net, sideband);
  for (const auto& port : net.sources()) {
    const ModeId mode(port, sideband);
    if (!bound.at(mode).is_coherent()) {
      throw NoiseError("Monte-Carlo photocounting needs coherent or vacuum inputs; '" + to_string(mode) +
                       "' is not");
    }
  }

  const auto detectors = net.detectors();
  std::vector<double> rates;
  for (const auto& d : detectors) {
    Complex amplitude{};
    for (const auto& [mode, c] : resolve(net, net.detector_port(d), sideband)) {
      amplitude += c * bound.at(mode).mean;
    }
    rates.push_back(std::norm(amplitude));
  }

  // Per observable, the weight on each detector column.
  std::vector<std::vector<Complex>> weights;
  for (const auto& [name, obs] : observables) {
    std::vector<Complex> w(detectors.size());
    for (const auto& term : obs.terms()) {
      if (term.sideband != sideband) throw NoiseError("observable '" + name + "' is on another sideband");
      auto it = std::find(detectors.begin(), detectors.end(), term.detector);
      if (it == detectors.end()) throw NoiseError("observable '" + name + "' uses unknown detector");
      w[static_cast<std::size_t>(it - detectors.begin())] += term.coeff;
    }
    weights.push_back(std::move(w));
  }

  struct Moments {
    std::vector<double> sum, sum_sq;
    std::vector<double> obs_re, obs_re_sq, obs_im, obs_im_sq;
  };
  const std::size_t batches = static_cast<std::size_t>((shots + kShotsPerBatch - 1) / kShotsPerBatch);
  std::vector<Moments> partial(batches);

  parallel_for(batches, [&](std::size_t batch) {
    const std::uint64_t begin = batch * kShotsPerBatch;
    const std::uint64_t count = std::min<std::uint64_t>(kShotsPerBatch, shots - begin);
    CounterRng rng(seed, batch);
    std::vector<std::poisson_distribution<long long>> dists;
    for (double r : rates) dists.emplace_back(r > 0.0 ? r : 1.0);

    Moments m;
    m.sum.assign(rates.size(), 0.0);
    m.sum_sq.assign(rates.size(), 0.0);
    m.obs_re.assign(weights.size(), 0.0);
    m.obs_re_sq.assign(weights.size(), 0.0);
    m.obs_im.assign(weights.size(), 0.0);
    m.obs_im_sq.assign(weights.size(), 0.0);
    std::vector<double> counts(rates.size());
    for (std::uint64_t shot = 0; shot < count; ++shot) {
      for (std::size_t d = 0; d < rates.size(); ++d) {
        counts[d] = rates[d] > 0.0 ? static_cast<double>(dists[d](rng)) : 0.0;
        m.sum[d] += counts[d];
        m.sum_sq[d] += counts[d] * counts[d];
      }
      for (std::size_t k = 0; k < weights.size(); ++k) {
        Complex v{};
        for (std::size_t d = 0; d < counts.size(); ++d) v += weights[k][d] * counts[d];
        m.obs_re[k] += v.real();
        m.obs_re_sq[k] += v.real() * v.real();
        m.obs_im[k] += v.imag();
        m.obs_im_sq[k] += v.imag() * v.imag();
      }
    }
    partial[batch] = std::move(m);
  });

  const auto n = static_cast<double>(shots);
  auto sample_variance = [n](double sum, double sum_sq) {
    if (n <= 1.0) return 0.0;
    return std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
  };

  McResult out;
  out.shots = shots;
  for (std::size_t d = 0; d < detectors.size(); ++d) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& m : partial) {
      sum += m.sum[d];
      sum_sq += m.sum_sq[d];
    }
    out.detectors[detectors[d]] = {sum / n, sample_variance(sum, sum_sq), rates[d]};
  }
  for (std::size_t k = 0; k < observables.size(); ++k) {
    double re = 0.0, re_sq = 0.0, im = 0.0, im_sq = 0.0;
    for (const auto& m : partial) {
      re += m.obs_re[k];
      re_sq += m.obs_re_sq[k];
      im += m.obs_im[k];
      im_sq += m.obs_im_sq[k];
    }
    ObservableEstimate est;
    est.name = observables[k].first;
    est.estimate = {re / n, im / n};
    est.standard_error = {std::sqrt(sample_variance(re, re_sq) / n), std::sqrt(sample_variance(im, im_sq) / n)};
    est.expected = expectation(observables[k].second.op(), bound);
    out.observables.push_back(std::move(est));
  }
  return out;
}

}  // namespace homodyne
