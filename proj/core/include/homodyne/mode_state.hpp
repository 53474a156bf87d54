#pragma once

// Single-mode Gaussian states and per-mode state assignments. Plain data; the
// evaluation lives in state_engine.hpp.

#include <map>
#include <string>

#include "homodyne/mode_algebra.hpp"

namespace homodyne {

class Network;

// A single-mode Gaussian state described by its first and second moments:
//   mean      = <b>
//   excess    = <db^dag db>, db = b - mean
//   anomalous = <db db>
// Coherent(g) is Gaussian(g, 0, 0) and Vacuum is Coherent(0).
struct ModeState {
  enum class Kind { Vacuum, Coherent, Gaussian };

  Kind kind = Kind::Vacuum;
  Complex mean{};
  double excess = 0.0;
  Complex anomalous{};

  static ModeState vacuum() { return {}; }
  static ModeState coherent(Complex amplitude) { return {Kind::Coherent, amplitude, 0.0, {}}; }
  static ModeState gaussian(Complex mean, double excess, Complex anomalous) {
    return {Kind::Gaussian, mean, excess, anomalous};
  }
  static ModeState thermal(double mean_photons, Complex mean = {}) {
    return gaussian(mean, mean_photons, {});
  }
  // D(mean) S(xi)|0>, xi = r exp(i phi), S(xi) = exp((xi^* a^2 - xi a^dag^2) / 2).
  static ModeState squeezed(double r, double phi, Complex mean = {});

  // |anomalous|^2 <= excess (excess + 1) and excess >= 0.
  bool is_physical(double tol = 1e-12) const;
  // Saturates the Heisenberg bound.
  bool is_pure(double tol = 1e-10) const;
  // No fluctuations beyond the vacuum level.
  bool is_coherent() const { return excess == 0.0 && anomalous == Complex{}; }

  friend bool operator==(const ModeState&, const ModeState&) = default;
};

// Product state over independent modes.
class StateAssignment {
 public:
  StateAssignment() = default;
  StateAssignment(std::initializer_list<std::pair<const ModeId, ModeState>> init) : states_(init) {}

  StateAssignment& set(const ModeId& mode, const ModeState& state);
  const ModeState* find(const ModeId& mode) const;
  // Throws StateError for an unassigned mode.
  const ModeState& at(const ModeId& mode) const;
  bool contains(const ModeId& mode) const { return states_.contains(mode); }
  const std::map<ModeId, ModeState>& states() const { return states_; }

  // Copy in which every source of `net` tagged with `sideband` has a state,
  // unlisted ones as vacuum.
  StateAssignment bound_to(const Network& net, Sideband sideband = Sideband::None) const;

  friend bool operator==(const StateAssignment&, const StateAssignment&) = default;

 private:
  std::map<ModeId, ModeState> states_;
};

}  // namespace homodyne
