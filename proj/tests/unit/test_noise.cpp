#include <doctest.h>

#include <cmath>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/fock_oracle.hpp"
#include "homodyne/noise.hpp"
#include "homodyne/state_engine.hpp"
#include "test_support.hpp"

using namespace homodyne;
using homodyne::testing::Random;

namespace {

OperatorPoly a(const ModeId& m) { return OperatorPoly::annihilator(m); }

StateAssignment eight_port_states(const ModeState& signal, Complex gamma) {
  return {{"b", signal}, {"l_i", ModeState::coherent(gamma)}, {"e_i", ModeState::vacuum()},
          {"f_i", ModeState::vacuum()}};
}

StateAssignment two_photon_states(const ModeState& plus, const ModeState& minus, const HomodyneConfig& cfg) {
  StateAssignment st;
  st.set({"b", Sideband::Plus}, plus);
  st.set({"b", Sideband::Minus}, minus);
  st.set({"l_i", Sideband::Plus}, ModeState::coherent(cfg.gamma_plus));
  st.set({"l_i", Sideband::Minus}, ModeState::coherent(cfg.gamma_minus));
  return st;
}

}  // namespace

TEST_CASE("density of a single mode") {
  CHECK(spectral_density(a("b"), {{"b", ModeState::vacuum()}}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spectral_density(a("b"), {{"b", ModeState::thermal(0.3)}}) == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(spectral_density(OperatorPoly{}, StateAssignment{}) == 0.0);

  // Oracle: pure squeezed vacuum with the same excess photon number.
  const auto sq = ModeState::squeezed(std::asinh(std::sqrt(0.3)), 0.7);
  const StateAssignment st{{"b", sq}};
  const auto b = a("b");
  const auto sym = b * adjoint(b) + adjoint(b) * b;
  FockConfig cfg;
  cfg.cutoff = 40;
  CHECK(std::abs(oracle_expectation(sym, st, cfg) - 1.6) < 1e-10);
  CHECK(std::abs(spectral_density(b, st) - 1.6) < 1e-14);
}

TEST_CASE("density rejects a nonzero mean") {
  CHECK_THROWS_AS(spectral_density(a("b"), {{"b", ModeState::coherent(0.5)}}), NoiseError);
  const auto q = make_noise_operator(a("b"), {{"b", ModeState::coherent(0.5)}});
  CHECK(q.mean == Complex{0.5});
  CHECK(spectral_density(q, {{"b", ModeState::coherent(0.5)}}) == doctest::Approx(1.0));
}

TEST_CASE("eight-port noise for a vacuum signal") {
  const auto net = build_eight_port();
  for (double g : {0.5, 1.0, 7.0}) {
    const auto r = eight_port_noise(net, g, eight_port_states(ModeState::vacuum(), g));
    CHECK(std::abs(r.total - 2.0) < 1e-12);
    CHECK(r.breakdown.intrinsic == doctest::Approx(1.0));
    CHECK(r.breakdown.photon_penalty == 0.0);
    CHECK(r.breakdown.vacuum_floor == 1.0);
  }
}

TEST_CASE("eight-port noise for a coherent signal") {
  const auto net = build_eight_port();
  const Complex beta{0.8, -0.4}, gamma{2.0, 1.0};
  const auto r = eight_port_noise(net, gamma, eight_port_states(ModeState::coherent(beta), gamma));
  CHECK(std::abs(r.total - (2.0 + 2.0 * std::norm(beta) / std::norm(gamma))) < 1e-12);
  CHECK(std::abs(r.direct - r.total) < 1e-12);
}

TEST_CASE("eight-port penalty vanishes for a strong oscillator") {
  const auto net = build_eight_port();
  double previous = 1e300;
  for (double g : {1.0, 10.0, 100.0, 1000.0}) {
    const auto r = eight_port_noise(net, g, eight_port_states(ModeState::coherent(1.0), g));
    CHECK(r.breakdown.photon_penalty < previous);
    previous = r.breakdown.photon_penalty;
  }
  CHECK(previous < 1e-5);
}

TEST_CASE("eight-port noise closed form over random Gaussian signals") {
  Random rng(41);
  const auto net = build_eight_port();
  for (int k = 0; k < 200; ++k) {
    const Complex gamma = rng.complex_with_modulus(0.5, 10.0);
    const auto st = eight_port_states(rng.gaussian(2.0, 2.0), gamma);
    const auto r = eight_port_noise(net, gamma, st);
    CHECK(std::abs(r.direct - r.total) <= 1e-10 * std::max(1.0, r.total));
    CHECK(r.breakdown.photon_penalty >= 0.0);
    CHECK(std::abs(r.total - (r.breakdown.intrinsic + r.breakdown.photon_penalty + r.breakdown.vacuum_floor)) <
          1e-12);
    const auto rec = recover_b(net, gamma);
    const auto bound = st.bound_to(net);
    const double s_minus = spectral_density(make_noise_operator(rec.t_minus.op(), bound), bound);
    CHECK(std::abs(s_minus - r.direct) < 1e-10 * std::max(1.0, r.total));
  }
}

TEST_CASE("eight-port noise precondition checks") {
  const auto net = build_eight_port();
  auto st = eight_port_states(ModeState::vacuum(), 1.0);
  CHECK_THROWS_AS(eight_port_noise(net, 2.0, st), NoiseError);
  st.set("e_i", ModeState::coherent(0.1));
  CHECK_THROWS_AS(eight_port_noise(net, 1.0, st), NoiseError);
  CHECK_THROWS_AS(eight_port_noise(net, 0.0, st), NoiseError);
}

TEST_CASE("t_theta noise") {
  const auto net = build_eight_port();
  for (double theta : {0.0, 0.7, 2.0, 4.5}) {
    const auto cfg = HomodyneConfig::aligned(1.5, theta);
    const auto vac = t_theta_noise(net, cfg, two_photon_states(ModeState::vacuum(), ModeState::vacuum(), cfg));
    CHECK(std::abs(vac.total - 2.0) < 1e-12);

    const Complex bp{0.3, -0.6}, bm{1.1, 0.2};
    const auto coh = t_theta_noise(net, cfg, two_photon_states(ModeState::coherent(bp), ModeState::coherent(bm), cfg));
    CHECK(std::abs(coh.total - (2.0 + (std::norm(bp) + std::norm(bm)) / 2.25)) < 1e-12);
  }
}

TEST_CASE("t_theta noise closed form over random states") {
  Random rng(42);
  const auto net = build_eight_port();
  for (int k = 0; k < 100; ++k) {
    const auto cfg = HomodyneConfig::aligned(rng.uniform(0.5, 10.0), rng.uniform(0.0, 2 * std::numbers::pi));
    const auto r = t_theta_noise(net, cfg, two_photon_states(rng.gaussian(1.5, 1.0), rng.gaussian(1.5, 1.0), cfg));
    CHECK(std::abs(r.direct - r.total) <= 1e-10 * std::max(1.0, r.total));
  }
}

TEST_CASE("t_theta noise refuses unequal magnitudes") {
  const auto net = build_eight_port();
  HomodyneConfig cfg{1.0, 2.0, 0.0};
  CHECK_THROWS_AS(t_theta_noise(net, cfg, two_photon_states(ModeState::vacuum(), ModeState::vacuum(), cfg)),
                  NoiseError);
}

TEST_CASE("signal-referred noise") {
  SpectralDensityResult noise;
  noise.breakdown = {1.0, 1.0, 1.0};
  noise.total = 3.0;
  ResponseModel model;
  model.response = [](double) { return Complex{6.0, 8.0}; };
  model.noise_density = [](double) { return 0.5; };
  const auto r = signal_referred(noise, model, 1.0);
  CHECK(r.penalty == doctest::Approx(0.02));
  CHECK(r.model_total == doctest::Approx(0.52));
  CHECK(r.total == doctest::Approx(0.03));

  const auto net = build_eight_port();
  const auto cfg = HomodyneConfig::aligned(1.0, 0.0);
  const auto vac = t_theta_noise(net, cfg, two_photon_states(ModeState::vacuum(), ModeState::vacuum(), cfg));
  ResponseModel unit;
  unit.response = [](double) { return Complex{1.0}; };
  unit.noise_density = [](double) { return 0.0; };
  CHECK(std::abs(signal_referred(vac, unit, 0.0).total - 2.0) < 1e-12);
  // The additive model has no intrinsic term: S_hn 0 plus penalty 1.
  CHECK(std::abs(signal_referred(vac, unit, 0.0).model_total - 1.0) < 1e-12);

  ResponseModel null;
  null.response = [](double) { return Complex{}; };
  CHECK_THROWS_AS(signal_referred(vac, null, 0.0), NoiseError);
}

TEST_CASE("referred penalty falls off as 1/|R|^2") {
  SpectralDensityResult noise;
  noise.breakdown = {1.0, 0.5, 1.0};
  noise.total = 2.5;
  double previous = 1e300;
  for (double r : {1.0, 10.0, 100.0, 1e4}) {
    ResponseModel m;
    m.response = [r](double) { return Complex{r}; };
    m.noise_density = [](double) { return 1e-3; };
    const auto out = signal_referred(noise, m, 0.0);
    CHECK(out.penalty < previous);
    previous = out.penalty;
    CHECK(out.model_total - out.noise_density == doctest::Approx(1.5 / (r * r)));
  }
}

TEST_CASE("tabulated response interpolates") {
  const auto m = tabulated_response({{2.0, {3.0, 0.0}, 1.0}, {0.0, {1.0, 0.0}, 3.0}});
  CHECK(std::abs(m.response(1.0) - Complex{2.0}) < 1e-15);
  CHECK(m.noise_density(1.0) == doctest::Approx(2.0));
  CHECK(std::abs(m.response(-5.0) - Complex{1.0}) < 1e-15);
  CHECK(std::abs(m.response(9.0) - Complex{3.0}) < 1e-15);
  CHECK_THROWS_AS(tabulated_response({}), NoiseError);
}

TEST_CASE("Monte-Carlo photocounting") {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent(1.0)}, {"l_i", ModeState::coherent(3.0)}};
  const auto s = observable_s(net);
  const auto r = mc_counts(net, st, 1'000'000, 7, {{"s", s}});
  REQUIRE(r.observables.size() == 1);
  const auto& est = r.observables[0];
  CHECK(std::abs(est.expected - 6.0) < 1e-12);
  CHECK(std::abs(est.estimate.real() - 6.0) < 5.0 * est.standard_error.real());

  const auto again = mc_counts(net, st, 1'000'000, 7, {{"s", s}});
  CHECK(again.observables[0].estimate == est.estimate);
  CHECK(again.detectors.at("D1").mean == r.detectors.at("D1").mean);

  const StateAssignment vac{{"b", ModeState::vacuum()}, {"l_i", ModeState::vacuum()}};
  const auto zero = mc_counts(net, vac, 1000, 1);
  for (const auto& [d, c] : zero.detectors) {
    CHECK(c.mean == 0.0);
    CHECK(c.variance == 0.0);
  }

  CHECK_THROWS_AS(mc_counts(net, st, 0, 1), NoiseError);
  const StateAssignment squeezed{{"b", ModeState::squeezed(0.2, 0.0)}, {"l_i", ModeState::coherent(1.0)}};
  CHECK_THROWS_AS(mc_counts(net, squeezed, 10, 1), NoiseError);
}

TEST_CASE("Monte-Carlo error shrinks as shots^-1/2") {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent({0.5, 0.3})}, {"l_i", ModeState::coherent(2.0)}};
  const auto small = mc_counts(net, st, 10'000, 3, {{"s", observable_s(net)}});
  const auto large = mc_counts(net, st, 1'000'000, 3, {{"s", observable_s(net)}});
  const double ratio = small.observables[0].standard_error.real() / large.observables[0].standard_error.real();
  CHECK(ratio == doctest::Approx(10.0).epsilon(0.05));
  for (const auto* r : {&small, &large}) {
    const auto& e = r->observables[0];
    CHECK(std::abs(e.estimate.real() - e.expected.real()) < 5.0 * e.standard_error.real());
  }
}
