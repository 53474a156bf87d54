#pragma once

// Balanced and eight-port homodyne readout networks, the post-processed
// observables built from their photodetector counts, and the two-photon
// (sideband) layer on top of them.

#include <functional>
#include <string>
#include <vector>

#include "homodyne/mode_algebra.hpp"
#include "homodyne/mode_state.hpp"
#include "homodyne/network.hpp"

namespace homodyne {

// Port and detector labels used by the builtin networks.
namespace ports {
inline constexpr const char* kSignal = "b";
inline constexpr const char* kLocalOscillator = "l_i";
inline constexpr const char* kSignalVacuum = "e_i";
inline constexpr const char* kOscillatorVacuum = "f_i";
}  // namespace ports

struct DetectorTerm {
  Complex coeff;
  std::string detector;
  Sideband sideband = Sideband::None;
  friend bool operator==(const DetectorTerm&, const DetectorTerm&) = default;
};

// Complex linear combination of measured photon numbers. Only the photon
// numbers are observables; the complex weights are classical post-processing
// and the combined operator is generally not self-adjoint.
class PostProcessedObservable {
 public:
  PostProcessedObservable() = default;
  PostProcessedObservable(const Network& net, std::vector<DetectorTerm> terms);

  const std::vector<DetectorTerm>& terms() const { return terms_; }
  // sum_k coeff_k n_{detector_k}, written over source modes.
  const OperatorPoly& op() const { return op_; }

  // Classical post-processing of measured mean photon numbers.
  Complex combine(const std::function<double(const DetectorTerm&)>& measured_mean) const;

  PostProcessedObservable& operator+=(const PostProcessedObservable& rhs);
  PostProcessedObservable& operator-=(const PostProcessedObservable& rhs);
  PostProcessedObservable& operator*=(Complex c);
  friend PostProcessedObservable operator+(PostProcessedObservable a, const PostProcessedObservable& b) {
    return a += b;
  }
  friend PostProcessedObservable operator-(PostProcessedObservable a, const PostProcessedObservable& b) {
    return a -= b;
  }
  friend PostProcessedObservable operator*(Complex c, PostProcessedObservable a) { return a *= c; }
  friend PostProcessedObservable operator/(PostProcessedObservable a, Complex c) { return a *= 1.0 / c; }

 private:
  void merge(const DetectorTerm& term);

  std::vector<DetectorTerm> terms_;
  OperatorPoly op_;
};

// Local-oscillator amplitudes at the two sidebands and the homodyne angle.
struct HomodyneConfig {
  Complex gamma_plus;
  Complex gamma_minus;
  double theta = 0.0;

  // gamma_plus = gamma_minus = magnitude * exp(i theta).
  static HomodyneConfig aligned(double magnitude, double theta);
};

Network build_balanced_homodyne();
Network build_eight_port();

// n_D1 - n_D2 on the balanced network.
PostProcessedObservable observable_s(const Network& net, Sideband sideband = Sideband::None);
// 2 (n_D1 - n_D2) on the eight-port network.
PostProcessedObservable observable_sD1D2(const Network& net, Sideband sideband = Sideband::None);
// 2i (n_D4 - n_D3) on the eight-port network.
PostProcessedObservable observable_sD3D4(const Network& net, Sideband sideband = Sideband::None);

struct Recovery {
  PostProcessedObservable t_plus;   // <t_plus> = <b>
  PostProcessedObservable t_minus;  // <t_minus> = <b^dag>
};

// gamma is the local-oscillator amplitude of the analyzed regime.
Recovery recover_b(const Network& net, Complex gamma, Sideband sideband = Sideband::None);

struct SidebandQuadratures {
  OperatorPoly b1;
  OperatorPoly b2;
  OperatorPoly b_theta;
};

// Amplitude and phase quadratures of the signal's two sidebands, and their
// combination at angle theta.
SidebandQuadratures sideband_quadratures(double theta, const std::string& signal = ports::kSignal);

struct AccessibilityCertificate {
  bool accessible = false;
  // Determinant of ((g+, g-^*), (-g+, g-^*)), equal to 2 g+ g-^*.
  Complex determinant;
};

// Whether a balanced homodyne combination alpha s+ + beta s- can isolate the
// b1/b2 quadratures. Throws SchemeError if either amplitude is zero.
AccessibilityCertificate check_quadrature_accessibility(Complex gamma_plus, Complex gamma_minus);

struct TwoPhotonObservables {
  PostProcessedObservable t_D1D2_plus;
  PostProcessedObservable t_D3D4_minus;
  PostProcessedObservable t_theta;  // (t_D1D2_plus + t_D3D4_minus) / 2
};

// Requires arg(gamma_plus) = arg(gamma_minus) = theta; refuses otherwise.
TwoPhotonObservables observable_t_theta(const Network& net, const HomodyneConfig& config);

// sqrt(2) (alpha <s+> + beta <s->) for the balanced network evaluated at the
// two sidebands of `states`.
Complex balanced_sideband_combination(const Network& net, Complex alpha, Complex beta,
                                      const StateAssignment& states);

// The same combination regrouped as coefficients times <b1>, <b2>, <b1^dag>,
// <b2^dag>, with the oscillator amplitudes given explicitly.
Complex balanced_sideband_combination_quadratures(Complex alpha, Complex beta, Complex gamma_plus,
                                                  Complex gamma_minus, const StateAssignment& states);

}  // namespace homodyne
