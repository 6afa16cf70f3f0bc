#ifndef QHAM_SYMBOLIC_HPP_
#define QHAM_SYMBOLIC_HPP_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qham/grid_fd.hpp"

namespace qham {

// One factor d^d/dx^d w_p of a field monomial (p >= 1, the guess u0 never
// appears as a factor).
struct Factor {
  int p = 1;
  int d = 0;
  auto operator<=>(const Factor&) const = default;
};

// Sorted multiset of factors; the empty monomial is the constant 1.
using Monomial = std::vector<Factor>;

Monomial make_monomial(std::vector<Factor> factors);
Monomial multiply(const Monomial& a, const Monomial& b);
std::string encode(const Monomial& m);
int max_derivative(const Monomial& m);

// Polynomial in h, g = 1 + h, nu and U_k = d^k u0 / dx^k (k <= kMaxU).
class Coefficient {
 public:
  static constexpr int kMaxU = 8;
  static constexpr int kSymbols = 3 + kMaxU + 1;
  enum Symbol { H = 0, G = 1, Nu = 2, U0 = 3 };
  using Powers = std::array<int, kSymbols>;

  Coefficient() = default;
  static Coefficient constant(double c);
  static Coefficient symbol(int s, int power = 1);
  static Coefficient u(int k, int power = 1) { return symbol(U0 + k, power); }

  Coefficient operator+(const Coefficient& o) const;
  Coefficient operator-(const Coefficient& o) const { return *this + o * -1.0; }
  Coefficient operator*(const Coefficient& o) const;
  Coefficient operator*(double s) const;
  Coefficient& operator+=(const Coefficient& o) { return *this = *this + o; }

  // d/dx; only the U_k depend on x.
  Coefficient dx() const;
  bool is_zero() const { return terms_.empty(); }
  // Product of the x-independent part, evaluated per node.
  Vec eval(double h, double nu, const std::vector<Vec>& u_fields, int n) const;
  std::string str() const;
  const std::map<Powers, double>& terms() const { return terms_; }

 private:
  void prune();
  std::map<Powers, double> terms_;
};

// Field polynomial: sum of Coefficient * Monomial.
using Poly = std::map<Monomial, Coefficient>;

void add_to(Poly& poly, const Monomial& m, const Coefficient& c);
Poly derivative(const Poly& poly);                // d/dx by the product rule
Poly derivative(const Poly& poly, int order);
Poly multiply(const Poly& poly, const Monomial& m);

}  // namespace qham

#endif  // QHAM_SYMBOLIC_HPP_
