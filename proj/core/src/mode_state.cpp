#include "homodyne/mode_state.hpp"

#include <algorithm>
#include <cmath>

#include "homodyne/error.hpp"
#include "homodyne/network.hpp"

namespace homodyne {

ModeState ModeState::squeezed(double r, double phi, Complex mean) {
  return gaussian(mean, std::sinh(r) * std::sinh(r), -std::polar(std::sinh(r) * std::cosh(r), phi));
}

bool ModeState::is_physical(double tol) const {
  if (!std::isfinite(excess) || !std::isfinite(std::abs(mean)) || !std::isfinite(std::abs(anomalous))) {
    return false;
  }
  if (excess < -tol) return false;
  const double bound = excess * (excess + 1.0);
  return std::norm(anomalous) <= bound + tol * std::max(1.0, bound);
}

bool ModeState::is_pure(double tol) const {
  const double bound = excess * (excess + 1.0);
  return std::abs(std::norm(anomalous) - bound) <= tol * std::max(1.0, bound);
}

StateAssignment& StateAssignment::set(const ModeId& mode, const ModeState& state) {
  states_[mode] = state;
  return *this;
}

const ModeState* StateAssignment::find(const ModeId& mode) const {
  auto it = states_.find(mode);
  return it == states_.end() ? nullptr : &it->second;
}

const ModeState& StateAssignment::at(const ModeId& mode) const {
  if (const auto* s = find(mode)) return *s;
  throw StateError("no state assigned to mode '" + to_string(mode) + "'");
}

StateAssignment StateAssignment::bound_to(const Network& net, Sideband sideband) const {
  StateAssignment out = *this;
  for (const auto& port : net.sources()) {
    const ModeId mode(port, sideband);
    if (!out.contains(mode)) out.set(mode, ModeState::vacuum());
  }
  return out;
}

}  // namespace homodyne
