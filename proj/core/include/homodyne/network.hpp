#pragma once

// Feed-forward linear-optics networks. Ports are named; an element input is
// wired to whichever element produced an output of the same name.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "homodyne/mode_algebra.hpp"

namespace homodyne {

// Which input picks up the minus sign in the second output:
//   MinusOnSecond: out1 = t in1 + r in2, out2 = r in1 - t in2
//   MinusOnFirst:  out1 = t in1 + r in2, out2 = t in2 - r in1
enum class MinusPort { Second, First };

struct BeamSplitter {
  double r = 0.0;
  double t = 0.0;
  MinusPort minus = MinusPort::Second;
  friend bool operator==(const BeamSplitter&, const BeamSplitter&) = default;
};

// Multiplies the annihilation operator by exp(i phi), on every sideband.
struct PhaseRotator {
  double phi = 0.0;
  friend bool operator==(const PhaseRotator&, const PhaseRotator&) = default;
};

// The source's mode label is its single output port name.
struct Source {
  friend bool operator==(const Source&, const Source&) = default;
};

struct Detector {
  friend bool operator==(const Detector&, const Detector&) = default;
};

using ElementKind = std::variant<BeamSplitter, PhaseRotator, Source, Detector>;

struct Element {
  std::string name;
  ElementKind kind;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  friend bool operator==(const Element&, const Element&) = default;
};

std::string_view kind_name(const ElementKind& kind);

// Row-major transfer matrix of an element: a_out[i] = sum_j m[i][j] a_in[j].
std::vector<std::vector<Complex>> element_matrix(const Element& element);

class Network {
 public:
  Network& add_source(const std::string& port);
  Network& add_beamsplitter(const std::string& name, double r, double t, const std::string& in1,
                            const std::string& in2, const std::string& out1, const std::string& out2,
                            MinusPort minus = MinusPort::Second);
  Network& add_phase_rotator(const std::string& name, double phi, const std::string& in,
                             const std::string& out);
  Network& add_detector(const std::string& name, const std::string& port);
  // No arity checking here; validate() reports malformed elements.
  Network& add_element(Element element);

  const std::vector<Element>& elements() const { return elements_; }
  const Element* find(const std::string& name) const;

  // Declaration order.
  std::vector<std::string> sources() const;
  std::vector<std::string> detectors() const;
  bool has_source(const std::string& port) const;
  bool has_detector(const std::string& name) const;
  // Port watched by a detector; throws NetworkError for unknown detectors.
  const std::string& detector_port(const std::string& detector) const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<Element> elements_;
};

enum class ViolationKind {
  NonUnitary,
  Arity,
  FanIn,
  FanOut,
  DanglingInput,
  Cycle,
  UnterminatedOutput,
  DuplicateName,
  NoSources,
  NoDetectors,
  NotIsometry,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string element;
  std::string message;
};

// Never throws; an empty list means the network is valid.
std::vector<Violation> validate(const Network& net);

// Expresses the annihilation operator at `port` over the source modes, with
// every source mode tagged by `sideband`. Throws NetworkError on an unknown or
// unreachable port or on cyclic wiring.
LinearCombination resolve(const Network& net, const std::string& port,
                          Sideband sideband = Sideband::None);

// Photon number at the detector's port, written over source modes.
OperatorPoly detector_operator(const Network& net, const std::string& detector,
                               Sideband sideband = Sideband::None);

// Rows follow detectors(), columns follow sources().
std::vector<std::vector<Complex>> transfer_matrix(const Network& net);

// Elements in an order where every producer precedes its consumers.
std::vector<const Element*> topological_order(const Network& net);

}  // namespace homodyne
