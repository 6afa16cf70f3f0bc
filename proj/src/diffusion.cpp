#include "qham/diffusion.hpp"

#include <cmath>

#include "qham/errors.hpp"

namespace qham {

const char* to_string(CoefficientSource s) {
  return s == CoefficientSource::Quadrature ? "quadrature" : "closed-form";
}

const char* to_string(AlphaMode m) { return m == AlphaMode::Frozen ? "frozen" : "time-dependent"; }

std::vector<double> coefficients_quadrature(int n_max, int quadrature_points, double length,
                                            const BoundaryCondition& bc) {
  require(n_max >= 1, "InvalidDiffusion", "n_max must be >= 1");
  require(quadrature_points >= 16 * n_max, "InvalidDiffusion",
          "quadrature needs at least 16 points per mode");
  int q = quadrature_points + (quadrature_points % 2);
  const double h = length / q;
  std::vector<double> f(q + 1), w(q + 1);
  for (int j = 0; j <= q; ++j) {
    double x = j * h;
    f[j] = bc.u_in(x) - (bc.u_l + (bc.u_r - bc.u_l) * x / length);
    w[j] = (j == 0 || j == q) ? 1.0 : (j % 2 ? 4.0 : 2.0);
  }
  std::vector<double> b(n_max);
  for (int n = 1; n <= n_max; ++n) {
    double k = 2.0 * n * M_PI / length, s = 0.0;
    for (int j = 0; j <= q; ++j) s += w[j] * f[j] * std::sin(k * j * h);
    b[n - 1] = 2.0 / length * s * h / 3.0;
  }
  return b;
}

std::vector<double> coefficients_closed_form(int n_max) {
  std::vector<double> b(n_max);
  for (int n = 1; n <= n_max; ++n) b[n - 1] = 2.0 / (M_PI * n * (4.0 * n * n - 1.0));
  return b;
}

DiffusionSolution DiffusionSolution::build(double nu, const BoundaryCondition& bc, double length,
                                           int n_max, CoefficientSource source,
                                           int quadrature_points) {
  require(nu > 0.0, "InvalidDiffusion", "viscosity must be positive");
  bc.check(length);
  DiffusionSolution s;
  s.nu = nu;
  s.length = length;
  s.u_l = bc.u_l;
  s.u_r = bc.u_r;
  s.n_max = n_max;
  s.source = source;
  if (source == CoefficientSource::Quadrature)
    s.b = coefficients_quadrature(n_max, quadrature_points > 0 ? quadrature_points : 32 * n_max,
                                  length, bc);
  else
    s.b = coefficients_closed_form(n_max);
  return s;
}

double DiffusionSolution::derivative(int k, double x, double t) const {
  double v = 0.0;
  if (k == 0) v = steady(x);
  if (k == 1) v = (u_r - u_l) / length;
  // d^k/dx^k sin(a x) = a^k sin(a x + k pi/2)
  const double phase = k * M_PI / 2.0;
  for (int n = 1; n <= n_max; ++n) {
    double a = 2.0 * n * M_PI / length;
    double decay = std::exp(-a * a * nu * t);
    if (decay == 0.0) break;
    v += b[n - 1] * decay * std::pow(a, k) * std::sin(a * x + phase);
  }
  return v;
}

double DiffusionSolution::time_derivative(double x, double t) const {
  double v = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    double a = 2.0 * n * M_PI / length;
    v -= nu * a * a * b[n - 1] * std::exp(-a * a * nu * t) * std::sin(a * x);
  }
  return v;
}

double DiffusionSolution::tail_bound() const {
  double s = 0.0;
  const int stop = 64 * n_max;
  for (int n = n_max + 1; n <= stop; ++n) s += 2.0 / (M_PI * n * (4.0 * n * n - 1.0));
  return s + 1.0 / (4.0 * M_PI * double(stop) * stop);
}

Vec eval_u0(const DiffusionSolution& sol, const Grid1D& grid, double t) {
  return eval_u0_derivative(0, sol, grid, t);
}

Vec eval_u0_derivative(int k, const DiffusionSolution& sol, const Grid1D& grid, double t) {
  Vec v(grid.n_points);
  for (int i = 0; i < grid.n_points; ++i) v[i] = sol.derivative(k, grid.x(i), t);
  return v;
}

Vec eval_alpha(int k, const DiffusionSolution& sol, const Grid1D& grid, double t) {
  require(k >= 0 && k <= 4, "InvalidAlpha", "alpha index must be in 0..4");
  if (k <= 2) return eval_u0_derivative(k, sol, grid, t);
  Vec a0 = eval_u0_derivative(0, sol, grid, t);
  Vec a1 = eval_u0_derivative(1, sol, grid, t);
  if (k == 3) return 2.0 * a0.cwiseProduct(a1);
  Vec a2 = eval_u0_derivative(2, sol, grid, t);
  return 2.0 * (a1.cwiseProduct(a1) + a0.cwiseProduct(a2));
}

}  // namespace qham
