#pragma once

// Noise spectral densities in the discrete-mode convention.
//
// For a zero-mean operator Q the density per mode bin is
//   S_Q = <Q Q^dag + Q^dag Q>,
// i.e. the continuum definition with the 2 pi delta factor stripped.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "homodyne/mode_algebra.hpp"
#include "homodyne/mode_state.hpp"
#include "homodyne/network.hpp"
#include "homodyne/schemes.hpp"

namespace homodyne {

// base = mean + fluctuation with <fluctuation> = 0 under the bound state.
struct NoiseOperator {
  OperatorPoly base;
  Complex mean;
  OperatorPoly fluctuation;
};

NoiseOperator make_noise_operator(const OperatorPoly& base, const StateAssignment& states);

// Throws NoiseError if Q is not zero-mean or the result has an imaginary
// residue above tolerance.
double spectral_density(const OperatorPoly& q, const StateAssignment& states);
double spectral_density(const NoiseOperator& q, const StateAssignment& states);

struct NoiseBreakdown {
  double intrinsic = 0.0;       // density of the signal's own fluctuation
  double photon_penalty = 0.0;  // signal photon number over |gamma|^2
  double vacuum_floor = 0.0;    // shot noise of the vacuum ports
};

struct SpectralDensityResult {
  double total = 0.0;  // intrinsic + photon_penalty + vacuum_floor
  NoiseBreakdown breakdown;
  double frequency = 0.0;  // informational
  // Density evaluated directly from the full measurement operator.
  double direct = 0.0;
};

// Noise of t_plus (and t_minus) for the eight-port scheme. `states` must hold
// a coherent l_i with amplitude gamma and vacuum e_i, f_i. Throws NoiseError
// if the operator computation disagrees with the closed form.
SpectralDensityResult eight_port_noise(const Network& net, Complex gamma, const StateAssignment& states,
                                       double frequency = 0.0);

// Noise of t_theta in the two-photon regime. `states` must hold coherent
// l_i sidebands matching config and vacuum e_i, f_i sidebands.
SpectralDensityResult t_theta_noise(const Network& net, const HomodyneConfig& config,
                                    const StateAssignment& states, double frequency = 0.0);

struct ResponseModel {
  std::function<Complex(double)> response;              // R(Omega)
  std::function<double(double)> noise_density;          // S_hn(Omega)
  std::function<Complex(double)> signal;                // h(Omega), optional
};

struct SignalReferredNoise {
  double total = 0.0;              // S_t / |R|^2
  double intrinsic = 0.0;          // intrinsic / |R|^2
  double penalty = 0.0;            // (photon_penalty + vacuum_floor) / |R|^2
  double noise_density = 0.0;      // S_hn from the model
  double model_total = 0.0;        // S_hn + penalty
};

// Throws NoiseError when |R(Omega)| = 0.
SignalReferredNoise signal_referred(const SpectralDensityResult& noise, const ResponseModel& model,
                                    double omega);

// Piecewise-linear model through tabulated (Omega, R, S_hn) samples, sorted
// by Omega; held constant outside the table.
struct ResponseSample {
  double omega = 0.0;
  Complex response;
  double noise_density = 0.0;
};
ResponseModel tabulated_response(std::vector<ResponseSample> samples);

struct DetectorCounts {
  double mean = 0.0;
  double variance = 0.0;
  double expected = 0.0;  // |resolved amplitude|^2
};

struct ObservableEstimate {
  std::string name;
  Complex estimate;
  Complex standard_error;  // real and imaginary parts estimated separately
  Complex expected;
};

struct McResult {
  std::uint64_t shots = 0;
  std::map<std::string, DetectorCounts> detectors;
  std::vector<ObservableEstimate> observables;
};

// Monte-Carlo photocounting with coherent or vacuum inputs. The outputs are
// then coherent, so each detector is an independent Poisson variable. The
// result depends only on the seed, not on the thread count.
McResult mc_counts(const Network& net, const StateAssignment& states, std::uint64_t shots, std::uint64_t seed,
                   const std::vector<std::pair<std::string, PostProcessedObservable>>& observables = {},
                   Sideband sideband = Sideband::None);

}  // namespace homodyne
