#include "homodyne/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

#include "homodyne/error.hpp"

namespace homodyne {

namespace {

constexpr double kUnitarityTol = 1e-12;

struct Arity {
  std::size_t inputs;
  std::size_t outputs;
};

Arity expected_arity(const ElementKind& kind) {
  return std::visit(
      [](const auto& k) -> Arity {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BeamSplitter>) return {2, 2};
        if constexpr (std::is_same_v<K, PhaseRotator>) return {1, 1};
        if constexpr (std::is_same_v<K, Source>) return {0, 1};
        return {1, 0};
      },
      kind);
}

struct PortTable {
  std::map<std::string, std::vector<std::size_t>> producers;
  std::map<std::string, std::vector<std::size_t>> consumers;
};

PortTable port_table(const Network& net) {
  PortTable table;
  const auto& els = net.elements();
  for (std::size_t i = 0; i < els.size(); ++i) {
    for (const auto& p : els[i].outputs) table.producers[p].push_back(i);
    for (const auto& p : els[i].inputs) table.consumers[p].push_back(i);
  }
  return table;
}

// Kahn's algorithm over elements; ready elements are taken in declaration
// order so the result does not depend on map iteration.
std::optional<std::vector<std::size_t>> kahn_order(const Network& net, const PortTable& table) {
  const auto& els = net.elements();
  std::vector<std::size_t> indegree(els.size(), 0);
  std::vector<std::set<std::size_t>> successors(els.size());
  for (std::size_t i = 0; i < els.size(); ++i) {
    std::set<std::size_t> preds;
    for (const auto& p : els[i].inputs) {
      auto it = table.producers.find(p);
      if (it == table.producers.end()) continue;
      preds.insert(it->second.begin(), it->second.end());
    }
    for (auto pred : preds) successors[pred].insert(i);
    indegree[i] = preds.size();
  }
  std::set<std::size_t> ready;
  for (std::size_t i = 0; i < els.size(); ++i) {
    if (indegree[i] == 0) ready.insert(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto i = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (auto s : successors[i]) {
      if (--indegree[s] == 0) ready.insert(s);
    }
  }
  if (order.size() != els.size()) return std::nullopt;
  return order;
}

class Resolver {
 public:
  Resolver(const Network& net, Sideband sideband)
      : net_(net), table_(port_table(net)), sideband_(sideband) {}

  const LinearCombination& resolve(const std::string& port) {
    if (auto it = memo_.find(port); it != memo_.end()) return it->second;
    if (!active_.insert(port).second) {
      throw NetworkError("cyclic wiring through port '" + port + "'");
    }
    auto pit = table_.producers.find(port);
    if (pit == table_.producers.end()) {
      throw NetworkError("port '" + port + "' is not reachable from any source");
    }
    if (pit->second.size() != 1) {
      throw NetworkError("port '" + port + "' has more than one producer");
    }
    const Element& el = net_.elements()[pit->second.front()];
    LinearCombination out;
    if (std::holds_alternative<Source>(el.kind)) {
      out[ModeId(port, sideband_)] = 1.0;
    } else if (std::holds_alternative<Detector>(el.kind)) {
      throw NetworkError("detector '" + el.name + "' cannot produce port '" + port + "'");
    } else {
      const auto arity = expected_arity(el.kind);
      if (el.inputs.size() != arity.inputs || el.outputs.size() != arity.outputs) {
        throw NetworkError("element '" + el.name + "' has wrong port arity");
      }
      const auto row_index = static_cast<std::size_t>(
          std::find(el.outputs.begin(), el.outputs.end(), port) - el.outputs.begin());
      const auto m = element_matrix(el);
      for (std::size_t j = 0; j < el.inputs.size(); ++j) {
        const Complex weight = m[row_index][j];
        if (weight == Complex{}) continue;
        for (const auto& [mode, c] : resolve(el.inputs[j])) out[mode] += weight * c;
      }
      std::erase_if(out, [](const auto& kv) { return std::abs(kv.second) < kCanonicalZero; });
    }
    active_.erase(port);
    return memo_.emplace(port, std::move(out)).first->second;
  }

 private:
  const Network& net_;
  PortTable table_;
  Sideband sideband_;
  std::map<std::string, LinearCombination> memo_;
  std::set<std::string> active_;
};

}  // namespace

std::string_view kind_name(const ElementKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string_view {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BeamSplitter>) return "beamsplitter";
        if constexpr (std::is_same_v<K, PhaseRotator>) return "phase_rotator";
        if constexpr (std::is_same_v<K, Source>) return "source";
        return "detector";
      },
      kind);
}

std::vector<std::vector<Complex>> element_matrix(const Element& element) {
  if (const auto* bs = std::get_if<BeamSplitter>(&element.kind)) {
    if (bs->minus == MinusPort::Second) return {{bs->t, bs->r}, {bs->r, -bs->t}};
    return {{bs->t, bs->r}, {-bs->r, bs->t}};
  }
  if (const auto* pr = std::get_if<PhaseRotator>(&element.kind)) {
    return {{std::polar(1.0, pr->phi)}};
  }
  return {};
}

Network& Network::add_source(const std::string& port) {
  return add_element(Element{port, Source{}, {}, {port}});
}

Network& Network::add_beamsplitter(const std::string& name, double r, double t, const std::string& in1,
                                   const std::string& in2, const std::string& out1,
                                   const std::string& out2, MinusPort minus) {
  return add_element(Element{name, BeamSplitter{r, t, minus}, {in1, in2}, {out1, out2}});
}

Network& Network::add_phase_rotator(const std::string& name, double phi, const std::string& in,
                                    const std::string& out) {
  return add_element(Element{name, PhaseRotator{phi}, {in}, {out}});
}

Network& Network::add_detector(const std::string& name, const std::string& port) {
  return add_element(Element{name, Detector{}, {port}, {}});
}

Network& Network::add_element(Element element) {
  elements_.push_back(std::move(element));
  return *this;
}

const Element* Network::find(const std::string& name) const {
  for (const auto& el : elements_) {
    if (el.name == name) return &el;
  }
  return nullptr;
}

std::vector<std::string> Network::sources() const {
  std::vector<std::string> out;
  for (const auto& el : elements_) {
    if (std::holds_alternative<Source>(el.kind) && !el.outputs.empty()) out.push_back(el.outputs.front());
  }
  return out;
}

std::vector<std::string> Network::detectors() const {
  std::vector<std::string> out;
  for (const auto& el : elements_) {
    if (std::holds_alternative<Detector>(el.kind)) out.push_back(el.name);
  }
  return out;
}

bool Network::has_source(const std::string& port) const {
  auto s = sources();
  return std::find(s.begin(), s.end(), port) != s.end();
}

bool Network::has_detector(const std::string& name) const {
  const auto* el = find(name);
  return el != nullptr && std::holds_alternative<Detector>(el->kind);
}

const std::string& Network::detector_port(const std::string& detector) const {
  const auto* el = find(detector);
  if (el == nullptr || !std::holds_alternative<Detector>(el->kind) || el->inputs.size() != 1) {
    throw NetworkError("unknown detector '" + detector + "'");
  }
  return el->inputs.front();
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::NonUnitary:
      return "non-unitary element";
    case ViolationKind::Arity:
      return "port arity";
    case ViolationKind::FanIn:
      return "port fan-in";
    case ViolationKind::FanOut:
      return "port fan-out";
    case ViolationKind::DanglingInput:
      return "dangling input";
    case ViolationKind::Cycle:
      return "cyclic wiring";
    case ViolationKind::UnterminatedOutput:
      return "unterminated output";
    case ViolationKind::DuplicateName:
      return "duplicate name";
    case ViolationKind::NoSources:
      return "no sources declared";
    case ViolationKind::NoDetectors:
      return "no detectors declared";
    case ViolationKind::NotIsometry:
      return "not an isometry";
  }
  return "unknown";
}

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto report = [&out](ViolationKind kind, const std::string& element, std::string message) {
    out.push_back({kind, element, std::move(message)});
  };

  const auto& els = net.elements();
  std::set<std::string> names;
  for (const auto& el : els) {
    if (!names.insert(el.name).second) {
      report(ViolationKind::DuplicateName, el.name, "element name '" + el.name + "' used twice");
    }
    const auto arity = expected_arity(el.kind);
    if (el.inputs.size() != arity.inputs || el.outputs.size() != arity.outputs) {
      report(ViolationKind::Arity, el.name,
             std::string(kind_name(el.kind)) + " '" + el.name + "' needs " +
                 std::to_string(arity.inputs) + " input(s) and " + std::to_string(arity.outputs) +
                 " output(s)");
    }
    if (const auto* bs = std::get_if<BeamSplitter>(&el.kind)) {
      const double norm = bs->r * bs->r + bs->t * bs->t;
      if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitarityTol) {
        report(ViolationKind::NonUnitary, el.name,
               "beamsplitter '" + el.name + "' has r^2 + t^2 = " + std::to_string(norm));
      }
    }
    if (const auto* pr = std::get_if<PhaseRotator>(&el.kind); pr && !std::isfinite(pr->phi)) {
      report(ViolationKind::NonUnitary, el.name, "phase rotator '" + el.name + "' has non-finite phase");
    }
  }

  const auto table = port_table(net);
  for (const auto& [port, producers] : table.producers) {
    if (producers.size() > 1) {
      report(ViolationKind::FanIn, els[producers[1]].name, "port '" + port + "' is driven by " +
                                                               std::to_string(producers.size()) +
                                                               " outputs");
    }
    if (!table.consumers.contains(port)) {
      report(ViolationKind::UnterminatedOutput, els[producers.front()].name,
             "output port '" + port + "' is not consumed by any element or detector");
    }
  }
  for (const auto& [port, consumers] : table.consumers) {
    if (consumers.size() > 1) {
      report(ViolationKind::FanOut, els[consumers[1]].name,
             "port '" + port + "' feeds " + std::to_string(consumers.size()) + " inputs");
    }
    if (!table.producers.contains(port)) {
      report(ViolationKind::DanglingInput, els[consumers.front()].name,
             "input port '" + port + "' is not reachable from any source");
    }
  }
  if (!kahn_order(net, table)) report(ViolationKind::Cycle, "", "wiring contains a cycle");
  if (net.sources().empty()) report(ViolationKind::NoSources, "", "no sources declared");
  if (net.detectors().empty()) report(ViolationKind::NoDetectors, "", "no detectors declared");

  if (out.empty()) {
    const auto m = transfer_matrix(net);
    const auto n_src = net.sources().size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n_src; ++i) {
      for (std::size_t j = 0; j < n_src; ++j) {
        Complex g{};
        for (const auto& row : m) g += std::conj(row[i]) * row[j];
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    }
    if (worst > kUnitarityTol) {
      report(ViolationKind::NotIsometry, "",
             "source-to-detector map deviates from an isometry by " + std::to_string(worst));
    }
  }
  return out;
}

LinearCombination resolve(const Network& net, const std::string& port, Sideband sideband) {
  Resolver resolver(net, sideband);
  return resolver.resolve(port);
}

OperatorPoly detector_operator(const Network& net, const std::string& detector, Sideband sideband) {
  const auto& port = net.detector_port(detector);
  const ModeId port_mode(port, sideband);
  LinearModeMap map;
  map.set(port_mode, resolve(net, port, sideband));
  return substitute(OperatorPoly::number(port_mode), map);
}

std::vector<std::vector<Complex>> transfer_matrix(const Network& net) {
  const auto sources = net.sources();
  Resolver resolver(net, Sideband::None);
  std::vector<std::vector<Complex>> m;
  for (const auto& d : net.detectors()) {
    const auto& comb = resolver.resolve(net.detector_port(d));
    std::vector<Complex> row(sources.size());
    for (std::size_t j = 0; j < sources.size(); ++j) {
      auto it = comb.find(ModeId(sources[j]));
      if (it != comb.end()) row[j] = it->second;
    }
    m.push_back(std::move(row));
  }
  return m;
}

std::vector<const Element*> topological_order(const Network& net) {
  auto order = kahn_order(net, port_table(net));
  if (!order) throw NetworkError("wiring contains a cycle");
  std::vector<const Element*> out;
  out.reserve(order->size());
  for (auto i : *order) out.push_back(&net.elements()[i]);
  return out;
}

}  // namespace homodyne
