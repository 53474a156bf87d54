#include <doctest.h>

#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/fock_oracle.hpp"
#include "homodyne/schemes.hpp"
#include "homodyne/state_engine.hpp"
#include "test_support.hpp"

using namespace homodyne;
using homodyne::testing::Random;

namespace {

const Complex I{0.0, 1.0};

OperatorPoly a(const ModeId& m) { return OperatorPoly::annihilator(m); }
OperatorPoly ad(const ModeId& m) { return OperatorPoly::creator(m); }

OperatorPoly expected_sD1D2() {
  return ad("l_i") * a("b") + ad("b") * a("l_i") - ad("f_i") * a("b") - ad("b") * a("f_i") +
         ad("f_i") * a("e_i") + ad("e_i") * a("f_i") - ad("l_i") * a("e_i") - ad("e_i") * a("l_i");
}

OperatorPoly expected_sD3D4() {
  return ad("l_i") * a("b") - ad("b") * a("l_i") - ad("b") * a("f_i") + ad("f_i") * a("b") +
         ad("l_i") * a("e_i") + ad("f_i") * a("e_i") - ad("e_i") * a("l_i") - ad("e_i") * a("f_i");
}

StateAssignment eight_port_states(const ModeState& signal, Complex gamma) {
  return {{"b", signal}, {"l_i", ModeState::coherent(gamma)}, {"e_i", ModeState::vacuum()},
          {"f_i", ModeState::vacuum()}};
}

}  // namespace

TEST_CASE("balanced observable is the interference term") {
  const auto s = observable_s(build_balanced_homodyne());
  CHECK(s.op().approx_equal(ad("l_i") * a("b") + ad("b") * a("l_i"), 1e-14));
  CHECK(s.op().size() == 2);

  const Complex beta{0.5, 0.2}, gamma{1.0, -0.3};
  const StateAssignment st{{"b", ModeState::coherent(beta)}, {"l_i", ModeState::coherent(gamma)}};
  CHECK(std::abs(expectation(s.op(), st) - (std::conj(gamma) * beta + gamma * std::conj(beta))) < 1e-14);

  const StateAssignment vac{{"b", ModeState::vacuum()}, {"l_i", ModeState::coherent(gamma)}};
  CHECK(std::abs(expectation(s.op(), vac)) < 1e-15);
}

TEST_CASE("balanced observable against the Fock oracle") {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent(0.5)}, {"l_i", ModeState::coherent(1.0)}};
  FockConfig cfg;
  cfg.cutoff = 16;
  const auto n = oracle_network(net, st, cfg);
  CHECK(std::abs(n.at("D1") - n.at("D2") - 1.0) < 1e-10);
}

TEST_CASE("wrong topology is refused") {
  CHECK_THROWS_AS(observable_s(build_eight_port()), SchemeError);
  CHECK_THROWS_AS(observable_sD1D2(build_balanced_homodyne()), SchemeError);
  CHECK_THROWS_AS(observable_sD3D4(build_balanced_homodyne()), SchemeError);
}

TEST_CASE("eight-port expansions match term for term") {
  const auto net = build_eight_port();
  const auto s12 = observable_sD1D2(net).op();
  const auto s34 = observable_sD3D4(net).op();
  CHECK(s12.size() == 8);
  CHECK(s34.size() == 8);
  CHECK(s12.approx_equal(expected_sD1D2(), 1e-14));
  CHECK(s34.approx_equal(expected_sD3D4(), 1e-14));
}

TEST_CASE("eight-port expectation values") {
  const auto net = build_eight_port();
  const Complex beta{0.4, -0.1}, gamma{1.3, 0.7};
  const auto st = eight_port_states(ModeState::coherent(beta), gamma);
  const Complex s12 = expectation(observable_sD1D2(net).op(), st);
  const Complex s34 = expectation(observable_sD3D4(net).op(), st);
  CHECK(std::abs(s12 - (std::conj(gamma) * beta + gamma * std::conj(beta))) < 1e-14);
  CHECK(std::abs(s34 - (std::conj(gamma) * beta - gamma * std::conj(beta))) < 1e-14);
}

TEST_CASE("recovery of the signal amplitude") {
  const auto net = build_eight_port();
  const Complex beta{0.7, -0.2};
  const auto rec = recover_b(net, 3.0);
  const auto st = eight_port_states(ModeState::coherent(beta), 3.0);
  CHECK(std::abs(expectation(rec.t_plus.op(), st) - beta) < 1e-14);
  CHECK(std::abs(expectation(rec.t_minus.op(), st) - std::conj(beta)) < 1e-14);

  // Oracle: post-process the brute-force detector means.
  FockConfig cfg;
  cfg.cutoff = 12;
  cfg.max_tail = 1e-8;
  const StateAssignment oracle_states = eight_port_states(ModeState::coherent(beta), 1.0);
  const auto rec1 = recover_b(net, 1.0);
  const auto means = oracle_network(net, oracle_states, cfg);
  const Complex via_oracle = rec1.t_plus.combine([&](const DetectorTerm& t) { return means.at(t.detector); });
  CHECK(std::abs(via_oracle - beta) < 1e-7);

  const auto vac = eight_port_states(ModeState::vacuum(), 3.0);
  CHECK(std::abs(expectation(rec.t_plus.op(), vac)) < 1e-15);
  CHECK_THROWS_AS(recover_b(net, 0.0), SchemeError);
}

TEST_CASE("t_minus is the adjoint of t_plus") {
  Random rng(31);
  const auto net = build_eight_port();
  for (int k = 0; k < 20; ++k) {
    const Complex gamma = rng.complex_with_modulus(0.5, 10.0);
    const auto rec = recover_b(net, gamma);
    CHECK(rec.t_minus.op().approx_equal(adjoint(rec.t_plus.op()), 1e-14));
    const auto st = eight_port_states(rng.gaussian(2.0, 1.0), gamma);
    CHECK(std::abs(expectation(rec.t_minus.op(), st) - std::conj(expectation(rec.t_plus.op(), st))) < 1e-12);
  }
}

TEST_CASE("recovery holds for random Gaussian signals") {
  Random rng(32);
  const auto net = build_eight_port();
  for (int k = 0; k < 100; ++k) {
    const Complex gamma = rng.complex_with_modulus(0.5, 10.0);
    const auto signal = rng.gaussian(3.0, 2.0);
    const auto st = eight_port_states(signal, gamma);
    CHECK(std::abs(expectation(recover_b(net, gamma).t_plus.op(), st) - mean_amplitude(st, "b")) <= 1e-10);
  }
}

TEST_CASE("sideband quadratures") {
  const ModeId bp{"b", Sideband::Plus}, bm{"b", Sideband::Minus};
  const double h = 1.0 / std::sqrt(2.0);
  const auto q0 = sideband_quadratures(0.0);
  CHECK(q0.b1.approx_equal(h * (a(bp) + ad(bm)), 1e-15));
  CHECK(q0.b2.approx_equal((h / I) * (a(bp) - ad(bm)), 1e-15));
  CHECK(q0.b_theta.approx_equal(q0.b1, 1e-15));
  CHECK(sideband_quadratures(std::numbers::pi / 2).b_theta.approx_equal(q0.b2, 1e-15));
}

TEST_CASE("no-go for conventional balanced homodyne") {
  const auto c = check_quadrature_accessibility(1.0, 1.0);
  CHECK_FALSE(c.accessible);
  CHECK(std::abs(c.determinant - 2.0) < 1e-15);

  const auto c2 = check_quadrature_accessibility(I, std::polar(2.0, std::numbers::pi / 3));
  CHECK_FALSE(c2.accessible);
  CHECK(std::abs(c2.determinant - 2.0 * I * std::polar(2.0, -std::numbers::pi / 3)) < 1e-14);

  CHECK_THROWS_AS(check_quadrature_accessibility(0.0, 1.0), SchemeError);
  CHECK_THROWS_AS(check_quadrature_accessibility(1.0, 0.0), SchemeError);

  Random rng(33);
  for (int k = 0; k < 1000; ++k) {
    const auto r = check_quadrature_accessibility(rng.complex_with_modulus(1e-3, 10), rng.complex_with_modulus(1e-3, 10));
    CHECK_FALSE(r.accessible);
  }
}

TEST_CASE("balanced sideband combination regrouping") {
  Random rng(34);
  const auto net = build_balanced_homodyne();
  for (int k = 0; k < 20; ++k) {
    const Complex gp = rng.complex_with_modulus(0.5, 3), gm = rng.complex_with_modulus(0.5, 3);
    const Complex alpha = rng.complex_in_disk(2), beta = rng.complex_in_disk(2);
    StateAssignment st;
    st.set({"b", Sideband::Plus}, rng.gaussian(1.0, 0.5));
    st.set({"b", Sideband::Minus}, rng.gaussian(1.0, 0.5));
    st.set({"l_i", Sideband::Plus}, ModeState::coherent(gp));
    st.set({"l_i", Sideband::Minus}, ModeState::coherent(gm));
    const Complex direct = balanced_sideband_combination(net, alpha, beta, st);
    const Complex regrouped = balanced_sideband_combination_quadratures(alpha, beta, gp, gm, st);
    CHECK(std::abs(direct - regrouped) < 1e-12);
  }
}

TEST_CASE("t_theta recovers the rotated quadrature") {
  Random rng(35);
  const auto net = build_eight_port();
  for (int k = 0; k < 64; ++k) {
    const double theta = rng.uniform(0.0, 2 * std::numbers::pi);
    const auto cfg = HomodyneConfig::aligned(rng.uniform(0.5, 10.0), theta);
    StateAssignment st;
    st.set({"b", Sideband::Plus}, rng.gaussian(1.5, 1.0));
    st.set({"b", Sideband::Minus}, rng.gaussian(1.5, 1.0));
    st.set({"l_i", Sideband::Plus}, ModeState::coherent(cfg.gamma_plus));
    st.set({"l_i", Sideband::Minus}, ModeState::coherent(cfg.gamma_minus));
    const auto bound = st.bound_to(net, Sideband::Plus).bound_to(net, Sideband::Minus);
    const auto obs = observable_t_theta(net, cfg);
    const Complex want = expectation(sideband_quadratures(theta).b_theta, bound);
    CHECK(std::abs(expectation(obs.t_theta.op(), bound) - want) <= 1e-10);
  }
}

TEST_CASE("t_theta at theta 0 with coherent sidebands") {
  const auto net = build_eight_port();
  const Complex bp{0.3, 0.2}, bm{-0.1, 0.5};
  const auto cfg = HomodyneConfig::aligned(2.0, 0.0);
  StateAssignment st;
  st.set({"b", Sideband::Plus}, ModeState::coherent(bp));
  st.set({"b", Sideband::Minus}, ModeState::coherent(bm));
  st.set({"l_i", Sideband::Plus}, ModeState::coherent(2.0));
  st.set({"l_i", Sideband::Minus}, ModeState::coherent(2.0));
  const auto bound = st.bound_to(net, Sideband::Plus).bound_to(net, Sideband::Minus);
  const Complex want = (bp + std::conj(bm)) / std::sqrt(2.0);
  CHECK(std::abs(expectation(observable_t_theta(net, cfg).t_theta.op(), bound) - want) < 1e-14);

  StateAssignment vac;
  vac.set({"l_i", Sideband::Plus}, ModeState::coherent(2.0));
  vac.set({"l_i", Sideband::Minus}, ModeState::coherent(2.0));
  const auto vb = vac.bound_to(net, Sideband::Plus).bound_to(net, Sideband::Minus);
  CHECK(std::abs(expectation(observable_t_theta(net, cfg).t_theta.op(), vb)) < 1e-15);
}

TEST_CASE("t_theta refuses mismatched phases") {
  const auto net = build_eight_port();
  HomodyneConfig cfg{std::polar(1.0, 0.1), std::polar(1.0, 0.4), 0.1};
  CHECK_THROWS_AS(observable_t_theta(net, cfg), SchemeError);
}

TEST_CASE("signal commutes with the other inputs") {
  for (const char* x : {"e_i", "f_i", "l_i"}) {
    CHECK(commutator(a("b"), a(x)).is_zero());
    CHECK(commutator(a("b"), ad(x)).is_zero());
  }
}
