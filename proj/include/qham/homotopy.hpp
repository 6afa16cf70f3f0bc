#ifndef QHAM_HOMOTOPY_HPP_
#define QHAM_HOMOTOPY_HPP_

#include <limits>
#include <string>
#include <vector>

#include "qham/diffusion.hpp"
#include "qham/grid_fd.hpp"

namespace qham {

enum class Normalization { Normalized, Raw };
enum class TimeScheme { Explicit, Implicit };
enum class NormKind { Max, L2 };
// Raw compares u_p; Series compares the summed terms w_p = u_p / p!.
enum class RatioConvention { Raw, Series };

const char* to_string(Normalization n);
const char* to_string(TimeScheme s);

struct HomotopyConfig {
  double h_hat = -0.5;
  int order = 4;
  double nu = 1e-3;
  Normalization normalization = Normalization::Normalized;
  AlphaMode alpha_mode = AlphaMode::TimeDependent;

  void check() const;
};

// Grid, boundary data, guess solution and the two difference operators, bundled
// so every solver sees the same discretization.
struct Problem {
  Grid1D grid;
  BoundaryCondition bc;
  DiffusionSolution u0;
  FdOperator first;   // D2 in the usual notation
  FdOperator second;  // D1

  static Problem make(int n_grid, double nu, double length = 1.0, int n_max = 128,
                      CoefficientSource source = CoefficientSource::Quadrature);
  double alpha_time(double t, AlphaMode mode) const { return mode == AlphaMode::Frozen ? 0.0 : t; }
};

struct DeformationTerm {
  int order = 0;
  Normalization normalization = Normalization::Normalized;
  std::vector<Vec> trajectory;  // one field per time level 0..tau
};

// d/dt of term p given orders 0..p-1 at the current level and the stored RHS
// of order p-1. alpha0/alpha1 are u0 and its slope at the same level.
Vec deformation_rhs(int p, const std::vector<Vec>& known, const Vec* previous_rhs,
                    const Vec& alpha0, const Vec& alpha1, const Problem& problem,
                    const HomotopyConfig& config);

struct SequentialResult {
  std::vector<DeformationTerm> terms;  // orders 0..M
  std::vector<double> times;
  double dt = 0.0;
  double dt_bound = 0.0;
  bool diverged = false;
  int diverged_step = -1;
};

double sequential_dt_bound(const Problem& problem, const HomotopyConfig& config);

SequentialResult solve_sequential(const HomotopyConfig& config, const Problem& problem, double dt,
                                  int tau, TimeScheme scheme = TimeScheme::Explicit);

// Sum over orders at every time level (raw terms divided by p!).
std::vector<Vec> sum_series(const std::vector<DeformationTerm>& terms);
Vec partial_sum(const std::vector<DeformationTerm>& terms, int upto, int step = -1);

double field_norm(const Vec& f, NormKind kind, double dx);

// r_p = |T_{p+1}| / |T_p| at the given step (default: last), p = 0..M-1.
std::vector<double> gamma_ratios(const std::vector<DeformationTerm>& terms, NormKind norm,
                                 double dx, RatioConvention convention = RatioConvention::Raw,
                                 int step = -1);

double truncation_bound(double gamma, int order, double u0_norm);
int min_order(double eps, double gamma, double u0_norm);

struct GammaBounds {
  double analytical = 0.0;  // pi |h| t / 2
  double numerical = 0.0;   // |h| |D2| |u0| t / 2
  bool analytical_converges = true;
  bool numerical_converges = true;
};
GammaBounds gamma_bounds(double h_hat, double first_norm, double u0_norm, double t);

struct ReH {
  double value = 0.0;
  double exponent = 2.5;
  bool caveat = false;  // 2D/3D forms are extrapolated from the 1D recipe
};
ReH re_h(double re, double u_bar, double u0_l2, int dimension = 1);
double t_nonlinear(double re_h_value, double h_hat);
double legacy_r(double u0_norm, double first_norm, double second_norm);
double fd_error_estimate(int order, int tau, double dx, double dt);

struct DiagnosticsReport {
  double h_hat = 0.0, nu = 0.0, t = 0.0, dt = 0.0, dx = 0.0;
  int order = 0, tau = 0;
  std::string norm = "max";
  std::string ratio_convention = "raw";
  double u0_norm = 0.0, u0_l2 = 0.0, first_norm = 0.0, second_norm = 0.0;
  std::vector<double> gamma;
  std::vector<double> gamma_series;
  double gamma_max = 0.0;
  GammaBounds bounds;
  double eps_gamma = std::numeric_limits<double>::quiet_NaN();      // measured gamma
  double eps_gamma_bar = std::numeric_limits<double>::quiet_NaN();  // analytical bound
  int m_min = -1;
  double target_eps = 1e-3;
  double reynolds = 0.0, u_bar = 1.0, d_bar = 1.0;
  ReH re_h;
  double t_ns = 0.0;
  double legacy_r = 0.0;
  double dt_bound = 0.0;
  double a_norm = std::numeric_limits<double>::quiet_NaN();
  double eps_fd = 0.0;
  bool diverged = false;
};

DiagnosticsReport build_diagnostics(const SequentialResult& result, const Problem& problem,
                                    const HomotopyConfig& config, NormKind norm = NormKind::Max,
                                    double u_bar = 1.0, double d_bar = -1.0,
                                    double target_eps = 1e-3);

}  // namespace qham

#endif  // QHAM_HOMOTOPY_HPP_
