#ifndef QHAM_TIME_MARCHING_HPP_
#define QHAM_TIME_MARCHING_HPP_

#include <limits>
#include <string>
#include <vector>

#include "qham/embedding.hpp"
#include "qham/grid_fd.hpp"

namespace qham {

enum class SchemeKind { ExplicitIterative, ImplicitIterative, ExplicitOneShot, ImplicitOneShot };
enum class ImplicitMethod { Direct, Neumann };

const char* to_string(SchemeKind k);

struct SchemeConfig {
  SchemeKind kind = SchemeKind::ExplicitIterative;
  double dt = 5e-3;
  int tau = 100;
  double zeta = 0.5;  // fraction of the stability bound allowed for explicit steps
  int neumann_p = 20;
  int padding_c = -1;  // -1: same as tau

  void check() const;
  int padding() const { return padding_c < 0 ? tau : padding_c; }
  bool is_explicit() const {
    return kind == SchemeKind::ExplicitIterative || kind == SchemeKind::ExplicitOneShot;
  }
};

// v' = (I + dt A) v + dt b
Vec explicit_step(const SpMat& a, const Vec& b, const Vec& v, double dt);
Vec explicit_step(const Mat& a, const Vec& b, const Vec& v, double dt);

// Solves (I - dt A) v' = v + dt b.
Vec implicit_step(const SpMat& a, const Vec& b, const Vec& v, double dt,
                  ImplicitMethod method = ImplicitMethod::Direct, int neumann_p = 20);
Vec implicit_step(const Mat& a, const Vec& b, const Vec& v, double dt,
                  ImplicitMethod method = ImplicitMethod::Direct, int neumann_p = 20);

// sum_{p<P} J^p
Mat neumann_inverse(const Mat& j, int p);
// Applies sum_{p<P} J^p to x without forming the matrix.
Vec neumann_apply(const SpMat& j, const Vec& x, int p);

int p_min(double kappa, double gamma, double eps_n);
double varah_gamma(const Mat& m);

struct ConditionReport {
  double kappa = 0.0;          // |I-J| |(I-J)^-1| in the infinity norm
  double inverse_norm = 0.0;   // |(I-J)^-1|
  double gamma = std::numeric_limits<double>::quiet_NaN();  // Varah margin of I - J
  bool diagonally_dominant = false;
  bool kappa_within_two_over_gamma = false;
  bool varah_holds = false;
};
ConditionReport condition_diagnostics(const Mat& j);

// Block system over tau + c + 1 time slots.
struct OneShotSystem {
  SpMat matrix;
  Vec rhs;
  int tau = 0;
  int padding = 0;
  int block = 0;
  bool implicit = false;
  int n_slots() const { return tau + padding + 1; }
};

// a[j], b[j] are the operator and source used by step j -> j+1. Source rows
// carry dt * b so that the solution equals the iterated single steps.
OneShotSystem build_oneshot(const std::vector<SpMat>& a, const std::vector<Vec>& b, double dt,
                            int tau, int padding, const Vec& u_in, bool implicit);
OneShotSystem build_oneshot(const SpMat& a, const Vec& b, double dt, int tau, int padding,
                            const Vec& u_in, bool implicit);
Vec solve_oneshot(const OneShotSystem& sys);
Vec history_block(const Vec& history, int slot, int block);

struct StabilityBound {
  double eigen = std::numeric_limits<double>::infinity();
  double surrogate = std::numeric_limits<double>::infinity();  // 1 / |A|_inf
  double closed_form = std::numeric_limits<double>::quiet_NaN();
  int excluded_modes = 0;  // eigenvalues with Re >= 0
  double max_growth_rate = 0.0;
};
StabilityBound dt_stability_bound(const Mat& a);
// 1 / (|D1| |u0|^M (|h| + nu))
double closed_form_dt_bound(double second_norm, double u0_norm, int order, double h_hat, double nu);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  bool diverged = false;
  int diverged_step = -1;
};

// Integrates the assembled embedding; A and b are reassembled every step in
// time-dependent mode (explicit: at t_j, implicit: at t_{j+1}).
Trajectory integrate_embedded(const EmbeddedSystem& system, const Problem& problem, double dt,
                              int tau, TimeScheme scheme = TimeScheme::Explicit,
                              ImplicitMethod method = ImplicitMethod::Direct, int neumann_p = 20);
// Same for a fixed A, b.
Trajectory integrate_linear(const SpMat& a, const Vec& b, const Vec& v0, double dt, int tau,
                            TimeScheme scheme = TimeScheme::Explicit);

// step,t,node,x,variable,value
void write_trajectory_csv(const std::string& path, const Trajectory& traj, const Grid1D& grid,
                          const std::vector<std::string>& variable_names,
                          const std::string& comment = "");

}  // namespace qham

#endif  // QHAM_TIME_MARCHING_HPP_
