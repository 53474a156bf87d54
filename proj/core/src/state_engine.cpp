#include "homodyne/state_engine.hpp"

#include <cmath>
#include <map>
#include <vector>

#include "homodyne/error.hpp"

namespace homodyne {

namespace {

// Sum over perfect matchings of `ops` (true = creator). Pair values:
// (dag, dag) -> conj(anomalous), (ann, ann) -> anomalous, mixed -> excess.
// Creators precede annihilators, so every mixed pair is normal ordered.
Complex pairing_sum(std::vector<bool>& ops, const ModeState& s) {
  if (ops.empty()) return 1.0;
  if (ops.size() % 2 != 0) return 0.0;
  const bool head = ops.front();
  Complex total{};
  for (std::size_t k = 1; k < ops.size(); ++k) {
    const bool partner = ops[k];
    Complex value;
    if (head && partner) {
      value = std::conj(s.anomalous);
    } else if (!head && !partner) {
      value = s.anomalous;
    } else {
      value = s.excess;
    }
    if (value == Complex{}) continue;
    std::vector<bool> rest;
    rest.reserve(ops.size() - 2);
    for (std::size_t j = 1; j < ops.size(); ++j) {
      if (j != k) rest.push_back(ops[j]);
    }
    total += value * pairing_sum(rest, s);
  }
  return total;
}

Complex ipow(Complex base, int exponent) {
  Complex out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void require_physical(const ModeState& s, const ModeId& mode) {
  if (!s.is_physical()) {
    throw StateError("unphysical Gaussian moments on mode '" + to_string(mode) + "'");
  }
}

}  // namespace

Complex normal_moment(const ModeState& state, int creators, int annihilators) {
  if (creators < 0 || annihilators < 0) throw StateError("negative moment order");
  if (state.is_coherent()) {
    return ipow(std::conj(state.mean), creators) * ipow(state.mean, annihilators);
  }
  // Choose j of the creators and k of the annihilators to be fluctuations;
  // the rest contribute the mean field.
  Complex total{};
  for (int j = 0; j <= creators; ++j) {
    for (int k = 0; k <= annihilators; ++k) {
      if ((j + k) % 2 != 0) continue;
      std::vector<bool> ops(static_cast<std::size_t>(j), true);
      ops.insert(ops.end(), static_cast<std::size_t>(k), false);
      const Complex wick = pairing_sum(ops, state);
      if (wick == Complex{}) continue;
      total += binomial(creators, j) * binomial(annihilators, k) *
               ipow(std::conj(state.mean), creators - j) * ipow(state.mean, annihilators - k) *
               wick;
    }
  }
  return total;
}

Complex expectation(const OperatorPoly& p, const StateAssignment& states) {
  std::map<ModeId, const ModeState*> bound;
  for (const auto& mode : p.modes()) {
    const auto& s = states.at(mode);
    require_physical(s, mode);
    bound.emplace(mode, &s);
  }
  Complex total{};
  for (const auto& [sig, c] : p.terms()) {
    std::map<ModeId, std::pair<int, int>> orders;
    for (const auto& m : sig.creators) ++orders[m].first;
    for (const auto& m : sig.annihilators) ++orders[m].second;
    Complex value = c;
    for (const auto& [mode, mn] : orders) {
      value *= normal_moment(*bound.at(mode), mn.first, mn.second);
      if (value == Complex{}) break;
    }
    total += value;
  }
  return total;
}

Complex mean_amplitude(const StateAssignment& states, const ModeId& mode) {
  return states.at(mode).mean;
}

}  // namespace homodyne
