#pragma once

// Bosonic operator algebra over labeled discrete modes.
//
// Every OperatorPoly is kept in normal order: all creation operators to the
// left of all annihilation operators, each group sorted by ModeId. The modes
// obey [a_i, a_j^dag] = delta_ij.

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace homodyne {

using Complex = std::complex<double>;

// Coefficients with magnitude below this are dropped from canonical forms.
inline constexpr double kCanonicalZero = 1e-13;

enum class Sideband { None, Plus, Minus };

std::string_view to_string(Sideband sb);

struct ModeId {
  std::string port;
  Sideband sideband = Sideband::None;

  ModeId() = default;
  ModeId(std::string port_label, Sideband sb = Sideband::None)  // NOLINT(google-explicit-constructor)
      : port(std::move(port_label)), sideband(sb) {}
  ModeId(const char* port_label, Sideband sb = Sideband::None)  // NOLINT(google-explicit-constructor)
      : port(port_label), sideband(sb) {}

  friend auto operator<=>(const ModeId&, const ModeId&) = default;
  friend bool operator==(const ModeId&, const ModeId&) = default;
};

// "b", "b@+" or "b@-".
std::string to_string(const ModeId& mode);
std::ostream& operator<<(std::ostream& os, const ModeId& mode);

// A single ladder operator inside an operator word.
struct Ladder {
  ModeId mode;
  bool creator = false;
};

// Monomial content of a normal-ordered term, both lists sorted.
struct Signature {
  std::vector<ModeId> creators;
  std::vector<ModeId> annihilators;

  std::size_t degree() const { return creators.size() + annihilators.size(); }
  bool is_identity() const { return creators.empty() && annihilators.empty(); }

  friend auto operator<=>(const Signature&, const Signature&) = default;
  friend bool operator==(const Signature&, const Signature&) = default;
};

class OperatorPoly {
 public:
  using Terms = std::map<Signature, Complex>;

  OperatorPoly() = default;

  static OperatorPoly scalar(Complex c);
  static OperatorPoly identity() { return scalar(1.0); }
  static OperatorPoly annihilator(const ModeId& mode);
  static OperatorPoly creator(const ModeId& mode);
  // a^dag a for one mode.
  static OperatorPoly number(const ModeId& mode);
  static OperatorPoly term(Complex c, Signature sig);
  // Normal-orders an arbitrary product of ladder operators.
  static OperatorPoly from_word(Complex c, std::span<const Ladder> word);

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t degree() const;
  std::set<ModeId> modes() const;

  Complex coefficient(const Signature& sig) const;
  Complex constant_term() const { return coefficient(Signature{}); }

  OperatorPoly& operator+=(const OperatorPoly& rhs);
  OperatorPoly& operator-=(const OperatorPoly& rhs);
  OperatorPoly& operator*=(Complex c);
  OperatorPoly& operator/=(Complex c);

  friend OperatorPoly operator+(OperatorPoly lhs, const OperatorPoly& rhs) { return lhs += rhs; }
  friend OperatorPoly operator-(OperatorPoly lhs, const OperatorPoly& rhs) { return lhs -= rhs; }
  friend OperatorPoly operator-(OperatorPoly p) { return p *= -1.0; }
  friend OperatorPoly operator*(OperatorPoly p, Complex c) { return p *= c; }
  friend OperatorPoly operator*(Complex c, OperatorPoly p) { return p *= c; }
  friend OperatorPoly operator/(OperatorPoly p, Complex c) { return p /= c; }
  friend OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs);

  // Exact term-set and coefficient equality.
  friend bool operator==(const OperatorPoly&, const OperatorPoly&) = default;
  // Same signatures on both sides (after dropping terms below tol) and
  // coefficients within tol.
  bool approx_equal(const OperatorPoly& other, double tol) const;

 private:
  void accumulate(const Signature& sig, Complex c);
  void prune();

  Terms terms_;
};

// Normal-ordered product a*b, built by rewriting a a^dag -> a^dag a + 1.
OperatorPoly multiply(const OperatorPoly& a, const OperatorPoly& b);
OperatorPoly adjoint(const OperatorPoly& p);
OperatorPoly commutator(const OperatorPoly& a, const OperatorPoly& b);

// Complex-linear image of an annihilation operator: a -> sum_k c_k a_k.
using LinearCombination = std::map<ModeId, Complex>;

class LinearModeMap {
 public:
  LinearModeMap() = default;
  LinearModeMap(std::initializer_list<std::pair<const ModeId, LinearCombination>> init)
      : images_(init) {}

  LinearModeMap& set(const ModeId& mode, LinearCombination image);
  const LinearCombination* find(const ModeId& mode) const;
  const std::map<ModeId, LinearCombination>& images() const { return images_; }

  // Images of the mapped modes are orthonormal, so commutators survive.
  bool is_isometry(double tol = 1e-12) const;

 private:
  std::map<ModeId, LinearCombination> images_;
};

// Replaces every mapped mode, creators by the conjugate image. Throws
// AlgebraError when the map is not an isometry.
OperatorPoly substitute(const OperatorPoly& p, const LinearModeMap& map);

OperatorPoly from_linear(const LinearCombination& combination);

std::string to_string(const OperatorPoly& p);
std::ostream& operator<<(std::ostream& os, const OperatorPoly& p);

}  // namespace homodyne
