#include "qham/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qham/errors.hpp"

namespace qham {

Monomial make_monomial(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end());
  return factors;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  m.insert(m.end(), b.begin(), b.end());
  return make_monomial(std::move(m));
}

std::string encode(const Monomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < m.size();) {
    size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    if (!s.empty()) s += "*";
    s += "w" + std::to_string(m[i].p);
    if (m[i].d > 0) s += "_" + std::string(m[i].d, 'x');
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s;
}

int max_derivative(const Monomial& m) {
  int d = 0;
  for (const auto& f : m) d = std::max(d, f.d);
  return d;
}

Coefficient Coefficient::constant(double c) {
  Coefficient out;
  if (c != 0.0) out.terms_[Powers{}] = c;
  return out;
}

Coefficient Coefficient::symbol(int s, int power) {
  require(s >= 0 && s < kSymbols, "UnrewritableMonomial",
          "derivative of u0 beyond order " + std::to_string(kMaxU), ErrorKind::Other);
  Coefficient out;
  Powers p{};
  p[s] = power;
  out.terms_[p] = 1.0;
  return out;
}

void Coefficient::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Coefficient Coefficient::operator+(const Coefficient& o) const {
  Coefficient out = *this;
  for (const auto& [k, v] : o.terms_) out.terms_[k] += v;
  out.prune();
  return out;
}

Coefficient Coefficient::operator*(const Coefficient& o) const {
  Coefficient out;
  for (const auto& [ka, va] : terms_)
    for (const auto& [kb, vb] : o.terms_) {
      Powers k;
      for (int i = 0; i < kSymbols; ++i) k[i] = ka[i] + kb[i];
      out.terms_[k] += va * vb;
    }
  out.prune();
  return out;
}

Coefficient Coefficient::operator*(double s) const {
  Coefficient out = *this;
  for (auto& [k, v] : out.terms_) v *= s;
  out.prune();
  return out;
}

Coefficient Coefficient::dx() const {
  Coefficient out;
  for (const auto& [k, v] : terms_)
    for (int j = 0; j <= kMaxU; ++j) {
      int e = k[U0 + j];
      if (e == 0) continue;
      require(j < kMaxU, "UnrewritableMonomial",
              "derivative of u0 beyond order " + std::to_string(kMaxU), ErrorKind::Other);
      Powers kk = k;
      kk[U0 + j] -= 1;
      kk[U0 + j + 1] += 1;
      out.terms_[kk] += v * e;
    }
  out.prune();
  return out;
}

Vec Coefficient::eval(double h, double nu, const std::vector<Vec>& u_fields, int n) const {
  Vec out = Vec::Zero(n);
  for (const auto& [k, v] : terms_) {
    double scalar = v * std::pow(h, k[H]) * std::pow(1.0 + h, k[G]) * std::pow(nu, k[Nu]);
    Vec term = Vec::Constant(n, scalar);
    for (int j = 0; j <= kMaxU; ++j) {
      if (k[U0 + j] == 0) continue;
      require(j < static_cast<int>(u_fields.size()), "MissingTerm",
              "u0 derivative " + std::to_string(j) + " not supplied", ErrorKind::Other);
      term = term.cwiseProduct(u_fields[j].array().pow(k[U0 + j]).matrix());
    }
    out += term;
  }
  return out;
}

std::string Coefficient::str() const {
  if (terms_.empty()) return "0";
  static const char* names[] = {"h", "(1+h)", "nu"};
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : terms_) {
    double c = v;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    c = std::abs(c);
    first = false;
    std::vector<std::string> parts;
    for (int s = 0; s < kSymbols; ++s) {
      if (k[s] == 0) continue;
      std::string name = s < U0 ? names[s] : "U" + std::to_string(s - U0);
      if (k[s] > 1) name += "^" + std::to_string(k[s]);
      parts.push_back(name);
    }
    if (c != 1.0 || parts.empty()) parts.insert(parts.begin(), [&] {
      std::ostringstream n;
      n.precision(17);
      n << c;
      return n.str();
    }());
    for (size_t i = 0; i < parts.size(); ++i) os << (i ? "*" : "") << parts[i];
  }
  return os.str();
}

void add_to(Poly& poly, const Monomial& m, const Coefficient& c) {
  if (c.is_zero()) return;
  auto it = poly.find(m);
  if (it == poly.end()) {
    poly.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) poly.erase(it);
}

Poly derivative(const Poly& poly) {
  Poly out;
  for (const auto& [m, c] : poly) {
    add_to(out, m, c.dx());
    for (size_t i = 0; i < m.size(); ++i) {
      if (i > 0 && m[i] == m[i - 1]) continue;
      int mult = 1;
      while (i + mult < m.size() && m[i + mult] == m[i]) ++mult;
      Monomial raised = m;
      raised[i].d += 1;
      add_to(out, make_monomial(raised), c * double(mult));
    }
  }
  return out;
}

Poly derivative(const Poly& poly, int order) {
  Poly out = poly;
  for (int k = 0; k < order; ++k) out = derivative(out);
  return out;
}

Poly multiply(const Poly& poly, const Monomial& m) {
  Poly out;
  for (const auto& [mm, c] : poly) add_to(out, multiply(mm, m), c);
  return out;
}

}  // namespace qham
