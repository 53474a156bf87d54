#include "homodyne/schemes.hpp"

#include <cmath>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/state_engine.hpp"

namespace homodyne {

namespace {

constexpr double kHalfSqrt2 = std::numbers::sqrt2 / 2.0;
constexpr double kPhaseTol = 1e-9;

void require_topology(const Network& net, std::initializer_list<const char*> sources,
                      std::initializer_list<const char*> detectors, const char* what) {
  for (const char* s : sources) {
    if (!net.has_source(s)) {
      throw SchemeError(std::string(what) + " needs source '" + s + "'");
    }
  }
  for (const char* d : detectors) {
    if (!net.has_detector(d)) {
      throw SchemeError(std::string(what) + " needs detector '" + d + "'");
    }
  }
  if (net.sources().size() != sources.size() || net.detectors().size() != detectors.size()) {
    throw SchemeError(std::string(what) + " needs exactly " + std::to_string(sources.size()) + " sources and " +
                      std::to_string(detectors.size()) + " detectors");
  }
  if (const auto v = validate(net); !v.empty()) {
    throw SchemeError(std::string(what) + " needs a valid network: " + v.front().message);
  }
}

void require_eight_port(const Network& net, const char* what) {
  require_topology(net, {ports::kSignal, ports::kLocalOscillator, ports::kSignalVacuum, ports::kOscillatorVacuum},
                   {"D1", "D2", "D3", "D4"}, what);
}

double wrapped_difference(double a, double b) {
  return std::remainder(a - b, 2.0 * std::numbers::pi);
}

}  // namespace

PostProcessedObservable::PostProcessedObservable(const Network& net, std::vector<DetectorTerm> terms) {
  for (const auto& term : terms) {
    op_ += term.coeff * detector_operator(net, term.detector, term.sideband);
    merge(term);
  }
}

void PostProcessedObservable::merge(const DetectorTerm& term) {
  for (auto& existing : terms_) {
    if (existing.detector == term.detector && existing.sideband == term.sideband) {
      existing.coeff += term.coeff;
      return;
    }
  }
  terms_.push_back(term);
}

Complex PostProcessedObservable::combine(
    const std::function<double(const DetectorTerm&)>& measured_mean) const {
  Complex total{};
  for (const auto& term : terms_) total += term.coeff * measured_mean(term);
  return total;
}

PostProcessedObservable& PostProcessedObservable::operator+=(const PostProcessedObservable& rhs) {
  for (const auto& term : rhs.terms_) merge(term);
  op_ += rhs.op_;
  return *this;
}

PostProcessedObservable& PostProcessedObservable::operator-=(const PostProcessedObservable& rhs) {
  for (auto term : rhs.terms_) {
    term.coeff = -term.coeff;
    merge(term);
  }
  op_ -= rhs.op_;
  return *this;
}

PostProcessedObservable& PostProcessedObservable::operator*=(Complex c) {
  for (auto& term : terms_) term.coeff *= c;
  op_ *= c;
  return *this;
}

HomodyneConfig HomodyneConfig::aligned(double magnitude, double theta) {
  const Complex g = std::polar(magnitude, theta);
  return {g, g, theta};
}

Network build_balanced_homodyne() {
  Network net;
  net.add_source(ports::kSignal)
      .add_source(ports::kLocalOscillator)
      .add_beamsplitter("BS", kHalfSqrt2, kHalfSqrt2, ports::kSignal, ports::kLocalOscillator, "c_o", "d_o")
      .add_detector("D1", "c_o")
      .add_detector("D2", "d_o");
  return net;
}

Network build_eight_port() {
  Network net;
  net.add_source(ports::kSignal)
      .add_source(ports::kSignalVacuum)
      .add_source(ports::kLocalOscillator)
      .add_source(ports::kOscillatorVacuum)
      // b_(1) = (b - e_i)/sqrt2, b_(2) = (b + e_i)/sqrt2
      .add_beamsplitter("BS1", kHalfSqrt2, kHalfSqrt2, ports::kSignal, ports::kSignalVacuum, "b_(2)", "b_(1)")
      // l_(0)i = (l_i - f_i)/sqrt2, l_(1)i = (l_i + f_i)/sqrt2
      .add_beamsplitter("BS3", kHalfSqrt2, kHalfSqrt2, ports::kLocalOscillator, ports::kOscillatorVacuum,
                        "l_(1)i", "l_(0)i")
      .add_phase_rotator("PR", std::numbers::pi / 2.0, "l_(1)i", "l_(1/4)i")
      // c_(1)o = (b_(1) + l_(0)i)/sqrt2, d_(1)o = (l_(0)i - b_(1))/sqrt2
      .add_beamsplitter("BS2", kHalfSqrt2, kHalfSqrt2, "b_(1)", "l_(0)i", "c_(1)o", "d_(1)o",
                        MinusPort::First)
      // d_(2)o = (b_(2) + l_(1/4)i)/sqrt2, c_(2)o = (l_(1/4)i - b_(2))/sqrt2
      .add_beamsplitter("BS4", kHalfSqrt2, kHalfSqrt2, "b_(2)", "l_(1/4)i", "d_(2)o", "c_(2)o",
                        MinusPort::First)
      .add_detector("D1", "c_(1)o")
      .add_detector("D2", "d_(1)o")
      .add_detector("D3", "c_(2)o")
      .add_detector("D4", "d_(2)o");
  return net;
}

PostProcessedObservable observable_s(const Network& net, Sideband sideband) {
  require_topology(net, {ports::kSignal, ports::kLocalOscillator}, {"D1", "D2"}, "balanced homodyne observable");
  return PostProcessedObservable(net, {{1.0, "D1", sideband}, {-1.0, "D2", sideband}});
}

PostProcessedObservable observable_sD1D2(const Network& net, Sideband sideband) {
  require_eight_port(net, "s_D1D2");
  return PostProcessedObservable(net, {{2.0, "D1", sideband}, {-2.0, "D2", sideband}});
}

PostProcessedObservable observable_sD3D4(const Network& net, Sideband sideband) {
  require_eight_port(net, "s_D3D4");
  const Complex two_i(0.0, 2.0);
  return PostProcessedObservable(net, {{two_i, "D4", sideband}, {-two_i, "D3", sideband}});
}

Recovery recover_b(const Network& net, Complex gamma, Sideband sideband) {
  if (gamma == Complex{}) throw SchemeError("local-oscillator amplitude must be nonzero");
  const auto s12 = observable_sD1D2(net, sideband);
  const auto s34 = observable_sD3D4(net, sideband);
  return {(s12 + s34) / (2.0 * std::conj(gamma)), (s12 - s34) / (2.0 * gamma)};
}

SidebandQuadratures sideband_quadratures(double theta, const std::string& signal) {
  const auto b_plus = OperatorPoly::annihilator(ModeId(signal, Sideband::Plus));
  const auto b_minus_dag = OperatorPoly::creator(ModeId(signal, Sideband::Minus));
  SidebandQuadratures q;
  q.b1 = (b_plus + b_minus_dag) * kHalfSqrt2;
  q.b2 = (b_plus - b_minus_dag) / Complex(0.0, std::numbers::sqrt2);
  q.b_theta = std::cos(theta) * q.b1 + std::sin(theta) * q.b2;
  return q;
}

AccessibilityCertificate check_quadrature_accessibility(Complex gamma_plus, Complex gamma_minus) {
  if (gamma_plus == Complex{} || gamma_minus == Complex{}) {
    throw SchemeError("degenerate local oscillator: both sideband amplitudes must be nonzero");
  }
  // alpha s+ + beta s- isolates b1, b2 only if
  //   ( g+   g-^* ) (alpha)   (0)
  //   (-g+   g-^* ) (beta ) = (0)
  // has a solution with alpha beta != 0.
  const Complex m00 = gamma_plus;
  const Complex m01 = std::conj(gamma_minus);
  const Complex m10 = -gamma_plus;
  const Complex m11 = std::conj(gamma_minus);
  const Complex det = m00 * m11 - m01 * m10;
  return {det == Complex{}, det};
}

TwoPhotonObservables observable_t_theta(const Network& net, const HomodyneConfig& config) {
  const double mag_plus = std::abs(config.gamma_plus);
  const double mag_minus = std::abs(config.gamma_minus);
  if (mag_plus == 0.0 || mag_minus == 0.0) {
    throw SchemeError("degenerate local oscillator: both sideband amplitudes must be nonzero");
  }
  if (std::abs(wrapped_difference(std::arg(config.gamma_plus), config.theta)) > kPhaseTol ||
      std::abs(wrapped_difference(std::arg(config.gamma_minus), config.theta)) > kPhaseTol) {
    throw SchemeError("oscillator phases must both equal the homodyne angle");
  }
  const auto s12p = observable_sD1D2(net, Sideband::Plus);
  const auto s12m = observable_sD1D2(net, Sideband::Minus);
  const auto s34p = observable_sD3D4(net, Sideband::Plus);
  const auto s34m = observable_sD3D4(net, Sideband::Minus);

  TwoPhotonObservables out;
  out.t_D1D2_plus = kHalfSqrt2 * (s12p / mag_plus + s12m / mag_minus);
  out.t_D3D4_minus = kHalfSqrt2 * (s34p / mag_plus - s34m / mag_minus);
  out.t_theta = 0.5 * (out.t_D1D2_plus + out.t_D3D4_minus);
  return out;
}

Complex balanced_sideband_combination(const Network& net, Complex alpha, Complex beta,
                                      const StateAssignment& states) {
  const auto s_plus = observable_s(net, Sideband::Plus);
  const auto s_minus = observable_s(net, Sideband::Minus);
  return std::numbers::sqrt2 *
         (alpha * expectation(s_plus.op(), states) + beta * expectation(s_minus.op(), states));
}

Complex balanced_sideband_combination_quadratures(Complex alpha, Complex beta, Complex gamma_plus,
                                                  Complex gamma_minus, const StateAssignment& states) {
  const auto q = sideband_quadratures(0.0);
  const Complex i(0.0, 1.0);
  const Complex b1 = expectation(q.b1, states);
  const Complex b2 = expectation(q.b2, states);
  const Complex b1_dag = expectation(adjoint(q.b1), states);
  const Complex b2_dag = expectation(adjoint(q.b2), states);
  return (alpha * std::conj(gamma_plus) + beta * gamma_minus) * b1 +
         i * (alpha * std::conj(gamma_plus) - beta * gamma_minus) * b2 +
         (alpha * gamma_plus + beta * std::conj(gamma_minus)) * b1_dag +
         i * (-alpha * gamma_plus + beta * std::conj(gamma_minus)) * b2_dag;
}

}  // namespace homodyne
