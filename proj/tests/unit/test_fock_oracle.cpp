#include <doctest.h>

#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/fock_oracle.hpp"
#include "homodyne/schemes.hpp"
#include "test_support.hpp"

using namespace homodyne;
using homodyne::testing::Random;

namespace {

const double h = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("photon number of a coherent state") {
  const StateAssignment s{{"a", ModeState::coherent(1.0)}};
  CHECK(std::abs(oracle_expectation(OperatorPoly::number("a"), s, FockConfig{20}) - 1.0) < 1e-10);
}

TEST_CASE("interference term") {
  const StateAssignment s{{"b", ModeState::coherent({1, 1})}, {"l_i", ModeState::coherent(2.0)}};
  const auto p = OperatorPoly::creator("l_i") * OperatorPoly::annihilator("b") +
                 OperatorPoly::creator("b") * OperatorPoly::annihilator("l_i");
  FockConfig cfg;
  cfg.cutoff = 30;
  CHECK(std::abs(oracle_expectation(p, s, cfg) - 4.0) < 1e-10);
}

TEST_CASE("empty monomial is the norm") {
  const StateAssignment s{{"a", ModeState::coherent({0.3, 0.4})}};
  FockConfig cfg;
  cfg.modes = {"a"};
  CHECK(std::abs(oracle_expectation(OperatorPoly::identity(), s, cfg) - 1.0) < 1e-12);
  CHECK(std::abs(oracle_expectation(OperatorPoly::identity(), StateAssignment{}, FockConfig{}) - 1.0) < 1e-15);
}

TEST_CASE("prepared states are normalized and match their moments") {
  const auto v = prepare_mode(ModeState::squeezed(0.3, 1.1, {0.4, -0.2}), 30, 1e-12);
  CHECK(std::abs(v.norm() - 1.0) < 1e-10);
  const auto a = lowering_matrix(30);
  const auto s = ModeState::squeezed(0.3, 1.1, {0.4, -0.2});
  const Complex mean = v.dot(a * v);
  const Complex aa = v.dot(a * a * v);
  const Complex nn = v.dot(a.adjoint() * a * v);
  CHECK(std::abs(mean - s.mean) < 1e-10);
  CHECK(std::abs(aa - mean * mean - s.anomalous) < 1e-10);
  CHECK(std::abs(nn - std::norm(s.mean) - s.excess) < 1e-10);
}

TEST_CASE("refusals") {
  CHECK_THROWS_AS(prepare_mode(ModeState::coherent(3.0), 10, 1e-12), OracleError);
  CHECK_THROWS_AS(prepare_mode(ModeState::thermal(0.2), 10, 1e-12), OracleError);
  CHECK_THROWS_AS(prepare_mode(ModeState::vacuum(), 1, 1e-12), OracleError);

  StateAssignment many;
  FockConfig cfg;
  cfg.cutoff = 10;
  for (int k = 0; k < 7; ++k) many.set(ModeId("m" + std::to_string(k)), ModeState::vacuum());
  CHECK_THROWS_AS(prepare_state(many, cfg), OracleError);
  cfg.max_dimension = 1'000'000'000;
  CHECK_NOTHROW(prepare_state(StateAssignment{{"a", ModeState::vacuum()}}, cfg));
}

TEST_CASE("beamsplitter unitary") {
  const int cutoff = 6;
  Eigen::Matrix2cd m;
  m << h, h, h, -h;
  const auto u = two_mode_unitary(m, cutoff);
  const auto d = cutoff + 1;
  // Sectors with at most `cutoff` photons are kept whole, so U is unitary there.
  const auto whole = testing::low_photon_indices(2, cutoff, cutoff);
  const Eigen::MatrixXcd gram = u.adjoint() * u - Eigen::MatrixXcd::Identity(d * d, d * d);
  CHECK(testing::max_abs_on(gram, whole) < 1e-9);
  // Columns outside those sectors lose the amplitude that leaves the box.
  CHECK(gram.cwiseAbs().maxCoeff() > 1e-3);

  // Heisenberg action on the low-photon subspace: U^dag a_1 U = h a_1 + h a_2.
  const std::vector<ModeId> modes{"x", "y"};
  const auto a1 = testing::dense_matrix(OperatorPoly::annihilator("x"), modes, cutoff);
  const auto a2 = testing::dense_matrix(OperatorPoly::annihilator("y"), modes, cutoff);
  const auto idx = testing::low_photon_indices(2, cutoff, cutoff - 1);
  CHECK(testing::max_abs_on(u.adjoint() * a1 * u - h * (a1 + a2), idx) < 1e-10);
  CHECK(testing::max_abs_on(u.adjoint() * a2 * u - h * (a1 - a2), idx) < 1e-10);

  Eigen::Matrix2cd bad;
  bad << 0.8, 0.8, 0.8, -0.8;
  CHECK_THROWS_AS(two_mode_unitary(bad, 4), OracleError);
}

TEST_CASE("single photon splits evenly") {
  Network net;
  net.add_source("a").add_source("v").add_beamsplitter("BS", h, h, "a", "v", "c", "d");
  net.add_detector("D1", "c").add_detector("D2", "d");
  FockConfig cfg;
  cfg.cutoff = 3;
  cfg.modes = {"a", "v"};
  Eigen::VectorXcd one = Eigen::VectorXcd::Zero(4);
  one(1) = 1.0;
  Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(4);
  zero(0) = 1.0;
  auto state = product_state(cfg.modes, {one, zero}, cfg);
  Eigen::Matrix2cd m;
  m << h, h, h, -h;
  // Run the split by hand with the exported pieces.
  const auto u = two_mode_unitary(m, 3);
  const Eigen::VectorXcd out = u * state.amplitudes;
  FockState evolved{cfg.modes, 3, out};
  const Eigen::MatrixXcd n = lowering_matrix(3).adjoint() * lowering_matrix(3);
  CHECK(std::abs(out.dot(apply_to_mode(n, 0, evolved, out)) - 0.5) < 1e-12);
  CHECK(std::abs(out.dot(apply_to_mode(n, 1, evolved, out)) - 0.5) < 1e-12);
}

TEST_CASE("balanced network photon difference") {
  const auto net = build_balanced_homodyne();
  const StateAssignment st{{"b", ModeState::coherent(0.5)}, {"l_i", ModeState::coherent(1.0)}};
  FockConfig cfg;
  cfg.cutoff = 16;
  const auto n = oracle_network(net, st, cfg);
  CHECK(std::abs(n.at("D1") - n.at("D2") - 1.0) < 1e-10);
}

TEST_CASE("identity network leaves photon numbers alone") {
  Network net;
  net.add_source("a").add_source("b").add_detector("Da", "a").add_detector("Db", "b");
  const StateAssignment st{{"a", ModeState::coherent({0.6, 0.1})}, {"b", ModeState::squeezed(0.2, 0.5, 0.3)}};
  FockConfig cfg;
  cfg.cutoff = 24;
  const auto n = oracle_network(net, st, cfg);
  CHECK(std::abs(n.at("Da") - std::norm(Complex{0.6, 0.1})) < 1e-10);
  CHECK(std::abs(n.at("Db") - (0.09 + std::sinh(0.2) * std::sinh(0.2))) < 1e-10);
}

TEST_CASE("phase rotator leaves the photon number of one mode alone") {
  Network net;
  net.add_source("a").add_phase_rotator("PR", 0.9, "a", "o").add_detector("D", "o");
  FockConfig cfg;
  cfg.cutoff = 20;
  CHECK(std::abs(oracle_network(net, {{"a", ModeState::coherent(1.0)}}, cfg).at("D") - 1.0) < 1e-10);
}

TEST_CASE("cutoff convergence") {
  Random rng(51);
  const auto net = build_balanced_homodyne();
  for (int k = 0; k < 5; ++k) {
    const StateAssignment st{{"b", ModeState::coherent(rng.complex_in_disk(1.0))},
                             {"l_i", ModeState::coherent(rng.complex_in_disk(1.0))}};
    FockConfig lo, hi;
    // Outputs carry up to |a + b|^2 / 2 = 2 photons on average, so the
    // smaller cutoff must hold a Poisson(2) tail below 1e-12.
    lo.cutoff = 18;
    hi.cutoff = 36;
    const auto a = oracle_network(net, st, lo);
    const auto b = oracle_network(net, st, hi);
    for (const auto& [d, v] : a) CHECK(std::abs(v - b.at(d)) < 1e-10);
  }
}
