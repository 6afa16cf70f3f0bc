#ifndef QHAM_DIFFUSION_HPP_
#define QHAM_DIFFUSION_HPP_

#include <functional>
#include <vector>

#include "qham/grid_fd.hpp"

namespace qham {

enum class CoefficientSource { Quadrature, ClosedForm };
enum class AlphaMode { TimeDependent, Frozen };

const char* to_string(CoefficientSource s);
const char* to_string(AlphaMode m);

// b_n = (2/L) int_0^L sin(2 n pi x / L) (u_in(x) - u_s(x)) dx by composite
// Simpson, u_s the linear steady profile. The sine basis only spans profiles
// whose transient part is odd about L/2, which holds for cos(pi x / L).
std::vector<double> coefficients_quadrature(int n_max, int quadrature_points, double length,
                                            const BoundaryCondition& bc);
// 2 / (pi n (4n^2 - 1)), valid for the cosine profile only.
std::vector<double> coefficients_closed_form(int n_max);

struct DiffusionSolution {
  double nu = 1e-3;
  double length = 1.0;
  double u_l = 1.0;
  double u_r = -1.0;
  int n_max = 128;
  std::vector<double> b;
  CoefficientSource source = CoefficientSource::Quadrature;

  static DiffusionSolution build(double nu, const BoundaryCondition& bc, double length = 1.0,
                                 int n_max = 128,
                                 CoefficientSource source = CoefficientSource::Quadrature,
                                 int quadrature_points = 0);

  double u0(double x, double t) const { return derivative(0, x, t); }
  // k-th spatial derivative, differentiated term by term.
  double derivative(int k, double x, double t) const;
  double time_derivative(double x, double t) const;
  double steady(double x) const { return u_l + (u_r - u_l) * x / length; }
  // Estimate of sum_{n > n_max} |b_n| from the closed-form decay.
  double tail_bound() const;
};

Vec eval_u0(const DiffusionSolution& sol, const Grid1D& grid, double t);
Vec eval_u0_derivative(int k, const DiffusionSolution& sol, const Grid1D& grid, double t);
// alpha_0..alpha_2 are u0 and its first two derivatives; alpha_3 = (u0^2)_x and
// alpha_4 = (u0^2)_xx via the product rule.
Vec eval_alpha(int k, const DiffusionSolution& sol, const Grid1D& grid, double t);

}  // namespace qham

#endif  // QHAM_DIFFUSION_HPP_
