#include "homodyne/mode_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "homodyne/error.hpp"

namespace homodyne {

std::string_view to_string(Sideband sb) {
  switch (sb) {
    case Sideband::None:
      return "none";
    case Sideband::Plus:
      return "+";
    case Sideband::Minus:
      return "-";
  }
  return "?";
}

std::string to_string(const ModeId& mode) {
  if (mode.sideband == Sideband::None) return mode.port;
  return mode.port + "@" + std::string(to_string(mode.sideband));
}

std::ostream& operator<<(std::ostream& os, const ModeId& mode) { return os << to_string(mode); }

namespace {

using Terms = OperatorPoly::Terms;

Signature signature_of(const std::vector<Ladder>& word) {
  Signature sig;
  for (const auto& op : word) {
    (op.creator ? sig.creators : sig.annihilators).push_back(op.mode);
  }
  std::sort(sig.creators.begin(), sig.creators.end());
  std::sort(sig.annihilators.begin(), sig.annihilators.end());
  return sig;
}

// Rewrites the word until no annihilator stands directly left of a creator.
// a_m a_k^dag -> a_k^dag a_m for m != k, a_m a_m^dag -> a_m^dag a_m + 1.
void normal_order_into(Complex c, std::vector<Ladder> word, Terms& out) {
  for (;;) {
    std::size_t i = 0;
    while (i + 1 < word.size() && !(!word[i].creator && word[i + 1].creator)) ++i;
    if (i + 1 >= word.size()) {
      out[signature_of(word)] += c;
      return;
    }
    if (word[i].mode == word[i + 1].mode) {
      std::vector<Ladder> contracted;
      contracted.reserve(word.size() - 2);
      contracted.insert(contracted.end(), word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i));
      contracted.insert(contracted.end(), word.begin() + static_cast<std::ptrdiff_t>(i + 2), word.end());
      normal_order_into(c, std::move(contracted), out);
    }
    std::swap(word[i], word[i + 1]);
  }
}

std::vector<Ladder> word_of(const Signature& sig) {
  std::vector<Ladder> word;
  word.reserve(sig.degree());
  for (const auto& m : sig.creators) word.push_back({m, true});
  for (const auto& m : sig.annihilators) word.push_back({m, false});
  return word;
}

}  // namespace

OperatorPoly OperatorPoly::scalar(Complex c) { return term(c, Signature{}); }

OperatorPoly OperatorPoly::annihilator(const ModeId& mode) {
  return term(1.0, Signature{{}, {mode}});
}

OperatorPoly OperatorPoly::creator(const ModeId& mode) { return term(1.0, Signature{{mode}, {}}); }

OperatorPoly OperatorPoly::number(const ModeId& mode) {
  return term(1.0, Signature{{mode}, {mode}});
}

OperatorPoly OperatorPoly::term(Complex c, Signature sig) {
  std::sort(sig.creators.begin(), sig.creators.end());
  std::sort(sig.annihilators.begin(), sig.annihilators.end());
  OperatorPoly p;
  p.accumulate(sig, c);
  p.prune();
  return p;
}

OperatorPoly OperatorPoly::from_word(Complex c, std::span<const Ladder> word) {
  OperatorPoly p;
  normal_order_into(c, std::vector<Ladder>(word.begin(), word.end()), p.terms_);
  p.prune();
  return p;
}

std::size_t OperatorPoly::degree() const {
  std::size_t d = 0;
  for (const auto& [sig, c] : terms_) d = std::max(d, sig.degree());
  return d;
}

std::set<ModeId> OperatorPoly::modes() const {
  std::set<ModeId> out;
  for (const auto& [sig, c] : terms_) {
    out.insert(sig.creators.begin(), sig.creators.end());
    out.insert(sig.annihilators.begin(), sig.annihilators.end());
  }
  return out;
}

Complex OperatorPoly::coefficient(const Signature& sig) const {
  auto it = terms_.find(sig);
  return it == terms_.end() ? Complex{} : it->second;
}

void OperatorPoly::accumulate(const Signature& sig, Complex c) { terms_[sig] += c; }

void OperatorPoly::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kCanonicalZero; });
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& rhs) {
  for (const auto& [sig, c] : rhs.terms_) accumulate(sig, c);
  prune();
  return *this;
}

OperatorPoly& OperatorPoly::operator-=(const OperatorPoly& rhs) {
  for (const auto& [sig, c] : rhs.terms_) accumulate(sig, -c);
  prune();
  return *this;
}

OperatorPoly& OperatorPoly::operator*=(Complex c) {
  for (auto& [sig, coeff] : terms_) coeff *= c;
  prune();
  return *this;
}

OperatorPoly& OperatorPoly::operator/=(Complex c) {
  if (c == Complex{}) throw AlgebraError("division of operator polynomial by zero");
  for (auto& [sig, coeff] : terms_) coeff /= c;
  prune();
  return *this;
}

OperatorPoly operator*(const OperatorPoly& lhs, const OperatorPoly& rhs) { return multiply(lhs, rhs); }

bool OperatorPoly::approx_equal(const OperatorPoly& other, double tol) const {
  auto significant = [tol](const Terms& t) {
    std::vector<std::pair<Signature, Complex>> out;
    for (const auto& kv : t) {
      if (std::abs(kv.second) > tol) out.push_back(kv);
    }
    return out;
  };
  auto a = significant(terms_);
  auto b = significant(other.terms_);
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].first != b[i].first || std::abs(a[i].second - b[i].second) > tol) return false;
  }
  return true;
}

OperatorPoly multiply(const OperatorPoly& a, const OperatorPoly& b) {
  OperatorPoly out;
  for (const auto& [sa, ca] : a.terms()) {
    auto left = word_of(sa);
    for (const auto& [sb, cb] : b.terms()) {
      auto word = left;
      auto right = word_of(sb);
      word.insert(word.end(), right.begin(), right.end());
      out += OperatorPoly::from_word(ca * cb, word);
    }
  }
  return out;
}

OperatorPoly adjoint(const OperatorPoly& p) {
  OperatorPoly out;
  for (const auto& [sig, c] : p.terms()) {
    out += OperatorPoly::term(std::conj(c), Signature{sig.annihilators, sig.creators});
  }
  return out;
}

OperatorPoly commutator(const OperatorPoly& a, const OperatorPoly& b) {
  return multiply(a, b) - multiply(b, a);
}

LinearModeMap& LinearModeMap::set(const ModeId& mode, LinearCombination image) {
  images_[mode] = std::move(image);
  return *this;
}

const LinearCombination* LinearModeMap::find(const ModeId& mode) const {
  auto it = images_.find(mode);
  return it == images_.end() ? nullptr : &it->second;
}

bool LinearModeMap::is_isometry(double tol) const {
  for (auto i = images_.begin(); i != images_.end(); ++i) {
    for (auto j = i; j != images_.end(); ++j) {
      Complex inner{};
      for (const auto& [mode, c] : i->second) {
        auto it = j->second.find(mode);
        if (it != j->second.end()) inner += std::conj(c) * it->second;
      }
      const Complex expected = (i == j) ? Complex{1.0} : Complex{};
      if (std::abs(inner - expected) > tol) return false;
    }
  }
  return true;
}

OperatorPoly from_linear(const LinearCombination& combination) {
  OperatorPoly out;
  for (const auto& [mode, c] : combination) out += c * OperatorPoly::annihilator(mode);
  return out;
}

OperatorPoly substitute(const OperatorPoly& p, const LinearModeMap& map) {
  if (!map.is_isometry()) {
    throw AlgebraError("substitution map is not an isometry on the mapped modes");
  }
  auto image = [&map](const ModeId& mode) -> OperatorPoly {
    if (const auto* comb = map.find(mode)) return from_linear(*comb);
    return OperatorPoly::annihilator(mode);
  };
  OperatorPoly out;
  for (const auto& [sig, c] : p.terms()) {
    OperatorPoly acc = OperatorPoly::scalar(c);
    for (const auto& m : sig.creators) acc = multiply(acc, adjoint(image(m)));
    for (const auto& m : sig.annihilators) acc = multiply(acc, image(m));
    out += acc;
  }
  return out;
}

std::string to_string(const OperatorPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os << std::setprecision(6);
  bool first = true;
  for (const auto& [sig, c] : p.terms()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    for (const auto& m : sig.creators) os << " " << to_string(m) << "^dag";
    for (const auto& m : sig.annihilators) os << " " << to_string(m);
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const OperatorPoly& p) { return os << to_string(p); }

}  // namespace homodyne
