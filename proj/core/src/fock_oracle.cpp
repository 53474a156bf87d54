#include "homodyne/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "homodyne/error.hpp"

namespace homodyne {

namespace {

constexpr int kPreparationPadding = 120;

std::size_t checked_dimension(std::size_t modes, int cutoff, std::size_t ceiling) {
  if (cutoff < 2) throw OracleError("Fock cutoff must be at least 2");
  const auto d = static_cast<std::size_t>(cutoff) + 1;
  std::size_t dim = 1;
  for (std::size_t k = 0; k < modes; ++k) {
    if (dim > ceiling / d) {
      throw OracleError("Fock space of " + std::to_string(modes) + " modes at cutoff " + std::to_string(cutoff) +
                        " exceeds the dimension ceiling " + std::to_string(ceiling));
    }
    dim *= d;
  }
  return dim;
}

Eigen::VectorXcd coherent_series(Complex alpha, int cutoff, double& tail) {
  Eigen::VectorXcd head(cutoff + 1);
  Complex c = std::exp(-0.5 * std::norm(alpha));
  head(0) = c;
  for (int n = 1; n <= cutoff; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    head(n) = c;
  }
  // Mass above the cutoff, summed term by term until it stops changing.
  tail = 0.0;
  for (int n = cutoff + 1; n < cutoff + 10000; ++n) {
    c *= alpha / std::sqrt(static_cast<double>(n));
    const double term = std::norm(c);
    tail += term;
    if (n > std::norm(alpha) && term <= tail * 1e-17) break;
  }
  return head;
}

// D(alpha) S(xi)|0> in a padded space by exponentiating both generators.
Eigen::VectorXcd squeezed_displaced(Complex alpha, double r, double phi, int cutoff, double& tail) {
  const int dim = cutoff + 1 + kPreparationPadding + static_cast<int>(8.0 * std::norm(alpha));
  const Eigen::MatrixXcd a = lowering_matrix(dim - 1);
  const Eigen::MatrixXcd a_dag = a.adjoint();
  const Complex xi = std::polar(r, phi);
  const Eigen::MatrixXcd squeeze_gen = 0.5 * (std::conj(xi) * a * a - xi * a_dag * a_dag);
  const Eigen::MatrixXcd displace_gen = alpha * a_dag - std::conj(alpha) * a;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = 1.0;
  v = squeeze_gen.exp() * v;
  v = displace_gen.exp() * v;
  tail = v.tail(dim - cutoff - 1).squaredNorm();
  return v.head(cutoff + 1);
}

Eigen::VectorXcd apply_two_modes(const Eigen::MatrixXcd& u, std::size_t first, std::size_t second,
                                 const FockState& basis, const Eigen::VectorXcd& vec) {
  const auto d = static_cast<std::size_t>(basis.cutoff) + 1;
  const std::size_t n_modes = basis.modes.size();
  auto stride_of = [&](std::size_t k) {
    std::size_t s = 1;
    for (std::size_t j = k + 1; j < n_modes; ++j) s *= d;
    return s;
  };
  const std::size_t s1 = stride_of(first);
  const std::size_t s2 = stride_of(second);
  Eigen::VectorXcd out(vec.size());
  Eigen::VectorXcd block(static_cast<Eigen::Index>(d * d));
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(vec.size()); ++idx) {
    // Visit each block once, from its (0, 0) representative.
    if ((idx / s1) % d != 0 || (idx / s2) % d != 0) continue;
    for (std::size_t n1 = 0; n1 < d; ++n1) {
      for (std::size_t n2 = 0; n2 < d; ++n2) {
        block(static_cast<Eigen::Index>(n1 * d + n2)) = vec(static_cast<Eigen::Index>(idx + n1 * s1 + n2 * s2));
      }
    }
    const Eigen::VectorXcd mixed = u * block;
    for (std::size_t n1 = 0; n1 < d; ++n1) {
      for (std::size_t n2 = 0; n2 < d; ++n2) {
        out(static_cast<Eigen::Index>(idx + n1 * s1 + n2 * s2)) = mixed(static_cast<Eigen::Index>(n1 * d + n2));
      }
    }
  }
  return out;
}

Eigen::MatrixXcd number_matrix(int cutoff) {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int k = 0; k <= cutoff; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

}  // namespace

std::size_t FockState::mode_index(const ModeId& mode) const {
  auto it = std::find(modes.begin(), modes.end(), mode);
  if (it == modes.end()) throw OracleError("mode '" + to_string(mode) + "' is not part of the Fock state");
  return static_cast<std::size_t>(it - modes.begin());
}

Eigen::MatrixXcd lowering_matrix(int cutoff) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
  for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Eigen::MatrixXcd raising_matrix(int cutoff) { return lowering_matrix(cutoff).adjoint(); }

Eigen::VectorXcd prepare_mode(const ModeState& state, int cutoff, double max_tail) {
  if (cutoff < 2) throw OracleError("Fock cutoff must be at least 2");
  if (!state.is_physical()) throw OracleError("unphysical Gaussian moments");
  double tail = 0.0;
  Eigen::VectorXcd v;
  if (state.is_coherent()) {
    v = coherent_series(state.mean, cutoff, tail);
  } else {
    if (!state.is_pure()) {
      throw OracleError("the Fock oracle accepts pure states only (mixed Gaussian state given)");
    }
    const double r = std::asinh(std::sqrt(state.excess));
    // anomalous = -exp(i phi) sinh r cosh r
    const double phi = std::arg(-state.anomalous);
    v = squeezed_displaced(state.mean, r, phi, cutoff, tail);
  }
  if (tail > max_tail) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "truncation tail %.3g above cutoff %d exceeds the allowed %.3g", tail, cutoff,
                  max_tail);
    throw OracleError(buf);
  }
  return v / v.norm();
}

FockState product_state(const std::vector<ModeId>& modes, const std::vector<Eigen::VectorXcd>& factors,
                        const FockConfig& cfg) {
  if (modes.size() != factors.size()) throw OracleError("one Fock vector per mode is required");
  checked_dimension(modes.size(), cfg.cutoff, cfg.max_dimension);
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
  for (const auto& f : factors) {
    if (f.size() != cfg.cutoff + 1) throw OracleError("Fock vector length does not match the cutoff");
    Eigen::VectorXcd next = Eigen::kroneckerProduct(v, f);
    v = std::move(next);
  }
  return {modes, cfg.cutoff, std::move(v)};
}

FockState prepare_state(const StateAssignment& states, const FockConfig& cfg) {
  std::vector<ModeId> modes = cfg.modes;
  if (modes.empty()) {
    for (const auto& [mode, s] : states.states()) modes.push_back(mode);
  }
  checked_dimension(modes.size(), cfg.cutoff, cfg.max_dimension);
  std::vector<Eigen::VectorXcd> factors;
  for (const auto& mode : modes) factors.push_back(prepare_mode(states.at(mode), cfg.cutoff, cfg.max_tail));
  return product_state(modes, factors, cfg);
}

Eigen::VectorXcd apply_to_mode(const Eigen::MatrixXcd& op, std::size_t mode_index, const FockState& basis,
                               const Eigen::VectorXcd& vec) {
  const auto d = static_cast<std::size_t>(basis.cutoff) + 1;
  std::size_t stride = 1;
  for (std::size_t j = mode_index + 1; j < basis.modes.size(); ++j) stride *= d;
  const std::size_t outer = static_cast<std::size_t>(vec.size()) / (stride * d);
  Eigen::VectorXcd out(vec.size());
  Eigen::VectorXcd x(static_cast<Eigen::Index>(d));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      const std::size_t base = o * d * stride + s;
      for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(j)) = vec(static_cast<Eigen::Index>(base + j * stride));
      const Eigen::VectorXcd y = op * x;
      for (std::size_t j = 0; j < d; ++j) out(static_cast<Eigen::Index>(base + j * stride)) = y(static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

Complex oracle_expectation(const OperatorPoly& p, const FockState& state) {
  const Eigen::MatrixXcd a = lowering_matrix(state.cutoff);
  const Eigen::MatrixXcd a_dag = raising_matrix(state.cutoff);
  Complex total{};
  for (const auto& [sig, c] : p.terms()) {
    Eigen::VectorXcd phi = state.amplitudes;
    for (auto it = sig.annihilators.rbegin(); it != sig.annihilators.rend(); ++it) {
      phi = apply_to_mode(a, state.mode_index(*it), state, phi);
    }
    for (auto it = sig.creators.rbegin(); it != sig.creators.rend(); ++it) {
      phi = apply_to_mode(a_dag, state.mode_index(*it), state, phi);
    }
    total += c * state.amplitudes.dot(phi);
  }
  return total;
}

Complex oracle_expectation(const OperatorPoly& p, const StateAssignment& states, const FockConfig& cfg) {
  FockConfig local = cfg;
  if (local.modes.empty()) {
    const auto modes = p.modes();
    local.modes.assign(modes.begin(), modes.end());
  }
  return oracle_expectation(p, prepare_state(states, local));
}

Eigen::MatrixXcd two_mode_unitary(const Eigen::Matrix2cd& m, int cutoff) {
  if (!(m.adjoint() * m).isApprox(Eigen::Matrix2cd::Identity(), 1e-10)) {
    throw OracleError("two-mode transfer matrix is not unitary");
  }
  // m = Q T Q^dag with T diagonal; H = Q diag(-arg t) Q^dag gives exp(-iH) = m.
  Eigen::ComplexSchur<Eigen::Matrix2cd> schur(m);
  const Eigen::Matrix2cd& q = schur.matrixU();
  Eigen::Matrix2cd h_diag = Eigen::Matrix2cd::Zero();
  for (int k = 0; k < 2; ++k) h_diag(k, k) = -std::arg(schur.matrixT()(k, k));
  const Eigen::Matrix2cd h = q * h_diag * q.adjoint();

  const int d = cutoff + 1;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d * d, d * d);
  const Complex minus_i(0.0, -1.0);
  for (int total = 0; total <= 2 * cutoff; ++total) {
    // Full sector basis |n1, total - n1>, n1 = 0..total.
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(total + 1, total + 1);
    for (int n1 = 0; n1 <= total; ++n1) {
      const int n2 = total - n1;
      gen(n1, n1) = h(0, 0) * static_cast<double>(n1) + h(1, 1) * static_cast<double>(n2);
      if (n1 < total) gen(n1 + 1, n1) += h(0, 1) * std::sqrt(static_cast<double>((n1 + 1) * n2));
      if (n1 > 0) gen(n1 - 1, n1) += h(1, 0) * std::sqrt(static_cast<double>(n1 * (n2 + 1)));
    }
    const Eigen::MatrixXcd block = (minus_i * gen).exp();
    for (int out1 = std::max(0, total - cutoff); out1 <= std::min(total, cutoff); ++out1) {
      for (int in1 = std::max(0, total - cutoff); in1 <= std::min(total, cutoff); ++in1) {
        u(out1 * d + (total - out1), in1 * d + (total - in1)) = block(out1, in1);
      }
    }
  }
  return u;
}

std::map<std::string, double> oracle_network(const Network& net, const StateAssignment& states,
                                             const FockConfig& cfg, Sideband sideband) {
  if (const auto violations = validate(net); !violations.empty()) {
    throw OracleError("invalid network: " + violations.front().message);
  }
  FockConfig local = cfg;
  local.modes.clear();
  std::map<std::string, std::size_t> slot;
  for (const auto& port : net.sources()) {
    slot[port] = local.modes.size();
    local.modes.emplace_back(port, sideband);
  }
  FockState state = prepare_state(states.bound_to(net, sideband), local);

  for (const Element* el : topological_order(net)) {
    if (const auto* pr = std::get_if<PhaseRotator>(&el->kind)) {
      Eigen::MatrixXcd phase = Eigen::MatrixXcd::Zero(state.cutoff + 1, state.cutoff + 1);
      for (int n = 0; n <= state.cutoff; ++n) phase(n, n) = std::polar(1.0, pr->phi * n);
      const std::size_t s = slot.at(el->inputs[0]);
      state.amplitudes = apply_to_mode(phase, s, state, state.amplitudes);
      slot[el->outputs[0]] = s;
    } else if (std::holds_alternative<BeamSplitter>(el->kind)) {
      const auto rows = element_matrix(*el);
      Eigen::Matrix2cd m;
      m << rows[0][0], rows[0][1], rows[1][0], rows[1][1];
      const std::size_t s1 = slot.at(el->inputs[0]);
      const std::size_t s2 = slot.at(el->inputs[1]);
      state.amplitudes = apply_two_modes(two_mode_unitary(m, state.cutoff), s1, s2, state, state.amplitudes);
      slot[el->outputs[0]] = s1;
      slot[el->outputs[1]] = s2;
    }
  }

  const Eigen::MatrixXcd n = number_matrix(state.cutoff);
  std::map<std::string, double> out;
  for (const auto& d : net.detectors()) {
    const std::size_t s = slot.at(net.detector_port(d));
    out[d] = state.amplitudes.dot(apply_to_mode(n, s, state, state.amplitudes)).real();
  }
  return out;
}

}  // namespace homodyne
