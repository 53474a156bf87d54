#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "homodyne/error.hpp"
#include "homodyne/network.hpp"
#include "homodyne/schemes.hpp"
#include "test_support.hpp"

using namespace homodyne;

namespace {

const double h = 1.0 / std::sqrt(2.0);
const Complex I{0.0, 1.0};

bool same_combination(const LinearCombination& got, const LinearCombination& want, double tol = 1e-14) {
  std::set<ModeId> keys;
  for (const auto& [m, c] : got) keys.insert(m);
  for (const auto& [m, c] : want) keys.insert(m);
  for (const auto& m : keys) {
    const Complex g = got.contains(m) ? got.at(m) : Complex{};
    const Complex w = want.contains(m) ? want.at(m) : Complex{};
    if (std::abs(g - w) > tol) return false;
  }
  return true;
}

bool has_violation(const Network& net, ViolationKind kind) {
  const auto v = validate(net);
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

Network straight_through() {
  Network net;
  net.add_source("a").add_detector("D", "a");
  return net;
}

}  // namespace

TEST_CASE("balanced network resolves its outputs") {
  const auto net = build_balanced_homodyne();
  CHECK(validate(net).empty());
  CHECK(same_combination(resolve(net, "c_o"), {{"b", h}, {"l_i", h}}));
  CHECK(same_combination(resolve(net, "d_o"), {{"b", h}, {"l_i", -h}}));
}

TEST_CASE("eight-port network resolves its internal ports") {
  const auto net = build_eight_port();
  CHECK(validate(net).empty());
  CHECK(same_combination(resolve(net, "b_(1)"), {{"b", h}, {"e_i", -h}}));
  CHECK(same_combination(resolve(net, "b_(2)"), {{"b", h}, {"e_i", h}}));
  CHECK(same_combination(resolve(net, "l_(1/4)i"), {{"l_i", I * h}, {"f_i", I * h}}));
  // c_(1)o = (b_(1) + l_(0)i)/sqrt2 with l_(0)i = (l_i - f_i)/sqrt2.
  CHECK(same_combination(resolve(net, "c_(1)o"), {{"b", 0.5}, {"e_i", -0.5}, {"l_i", 0.5}, {"f_i", -0.5}}));
}

TEST_CASE("resolve tags source modes with the sideband") {
  const auto net = build_balanced_homodyne();
  const auto c = resolve(net, "c_o", Sideband::Plus);
  CHECK(c.contains(ModeId("b", Sideband::Plus)));
  CHECK_FALSE(c.contains(ModeId("b")));
}

TEST_CASE("detector operators") {
  const auto net = build_balanced_homodyne();
  const auto n1 = detector_operator(net, "D1");
  const auto b = OperatorPoly::annihilator("b");
  const auto l = OperatorPoly::annihilator("l_i");
  const auto expected = 0.5 * (OperatorPoly::number("b") + adjoint(b) * l + adjoint(l) * b + OperatorPoly::number("l_i"));
  CHECK(n1.approx_equal(expected, 1e-14));
  const auto diff = n1 - detector_operator(net, "D2");
  CHECK(diff.approx_equal(adjoint(l) * b + adjoint(b) * l, 1e-14));

  CHECK(detector_operator(straight_through(), "D") == OperatorPoly::number("a"));
}

TEST_CASE("validation reports malformed networks") {
  Network bad_bs;
  bad_bs.add_source("a").add_source("b").add_beamsplitter("BS", 0.8, 0.8, "a", "b", "c", "d");
  bad_bs.add_detector("D1", "c").add_detector("D2", "d");
  CHECK(has_violation(bad_bs, ViolationKind::NonUnitary));
  CHECK(to_string(ViolationKind::NonUnitary) == "non-unitary element");

  Network fan_in;
  fan_in.add_source("a").add_source("b").add_source("x").add_source("y");
  fan_in.add_beamsplitter("BS", h, h, "a", "b", "c", "d");
  fan_in.add_beamsplitter("BS2", h, h, "x", "y", "c", "f");
  fan_in.add_detector("D1", "c").add_detector("D2", "d").add_detector("D3", "f");
  CHECK(has_violation(fan_in, ViolationKind::FanIn));
  CHECK(to_string(ViolationKind::FanIn) == "port fan-in");

  Network fan_out;
  fan_out.add_source("a").add_source("b").add_beamsplitter("BS", h, h, "a", "b", "c", "d");
  fan_out.add_beamsplitter("BS2", h, h, "c", "c", "e", "f");
  fan_out.add_detector("D1", "e").add_detector("D2", "f").add_detector("D3", "d");
  CHECK(has_violation(fan_out, ViolationKind::FanOut));

  Network no_det;
  no_det.add_source("a");
  CHECK(has_violation(no_det, ViolationKind::NoDetectors));

  Network dangling;
  dangling.add_source("a").add_detector("D", "zz");
  CHECK(has_violation(dangling, ViolationKind::DanglingInput));

  Network cyc;
  cyc.add_source("a").add_beamsplitter("X", h, h, "a", "y2", "x1", "x2");
  cyc.add_beamsplitter("Y", h, h, "x2", "q", "y1", "y2");
  cyc.add_source("q").add_detector("D1", "x1").add_detector("D2", "y1");
  CHECK(has_violation(cyc, ViolationKind::Cycle));
  CHECK_THROWS_AS(resolve(cyc, "y1"), NetworkError);

  Network arity;
  arity.add_source("a").add_element(Element{"BS", BeamSplitter{h, h}, {"a"}, {"c", "d"}});
  arity.add_detector("D1", "c").add_detector("D2", "d");
  CHECK(has_violation(arity, ViolationKind::Arity));
}

TEST_CASE("resolve errors on unknown ports") {
  CHECK_THROWS_AS(resolve(build_balanced_homodyne(), "nowhere"), NetworkError);
  CHECK_THROWS_AS(detector_operator(build_balanced_homodyne(), "D9"), NetworkError);
}

TEST_CASE("transfer matrices of valid networks are isometries") {
  for (const auto& net : {build_balanced_homodyne(), build_eight_port(), straight_through()}) {
    const auto m = transfer_matrix(net);
    const std::size_t cols = net.sources().size();
    for (std::size_t i = 0; i < cols; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        Complex dot{};
        for (const auto& row : m) dot += std::conj(row[i]) * row[j];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("resolution does not depend on declaration order") {
  const auto net = build_eight_port();
  auto elements = net.elements();
  std::reverse(elements.begin(), elements.end());
  Network reversed;
  for (const auto& el : elements) reversed.add_element(el);
  CHECK(validate(reversed).empty());
  for (const auto& d : net.detectors()) {
    CHECK(detector_operator(net, d) == detector_operator(reversed, d));
  }
  const auto order = topological_order(reversed);
  std::map<std::string, std::size_t> pos;
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]->name] = k;
  CHECK(pos["BS1"] < pos["BS2"]);
  CHECK(pos["PR"] < pos["BS4"]);
}

TEST_CASE("phase rotator multiplies by exp(i phi)") {
  Network net;
  net.add_source("a").add_phase_rotator("PR", 0.3, "a", "o").add_detector("D", "o");
  const auto o = resolve(net, "o");
  CHECK(std::abs(o.at("a") - std::polar(1.0, 0.3)) < 1e-15);
}
