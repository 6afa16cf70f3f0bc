#include "qham/homotopy.hpp"

#include <algorithm>
#include <cmath>

#include "qham/errors.hpp"

namespace qham {

const char* to_string(Normalization n) { return n == Normalization::Raw ? "raw" : "normalized"; }
const char* to_string(TimeScheme s) { return s == TimeScheme::Implicit ? "implicit" : "explicit"; }

void HomotopyConfig::check() const {
  require(h_hat != 0.0 && std::isfinite(h_hat), "InvalidHomotopy", "h_hat must be nonzero");
  require(order >= 0, "InvalidHomotopy", "order must be >= 0");
  require(nu > 0.0, "InvalidHomotopy", "viscosity must be positive");
}

Problem Problem::make(int n_grid, double nu, double length, int n_max, CoefficientSource source) {
  Problem p;
  p.grid = Grid1D::make(n_grid, length);
  p.bc = BoundaryCondition::burgers(length);
  p.u0 = DiffusionSolution::build(nu, p.bc, length, n_max, source);
  p.first = build_first_derivative(p.grid);
  p.second = build_second_derivative(p.grid);
  return p;
}

namespace {

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

Vec deformation_rhs(int p, const std::vector<Vec>& known, const Vec* previous_rhs,
                    const Vec& alpha0, const Vec& alpha1, const Problem& problem,
                    const HomotopyConfig& config) {
  require(p >= 1, "MissingTerm", "order must be >= 1", ErrorKind::Other);
  require(static_cast<int>(known.size()) >= p, "MissingTerm",
          "orders below " + std::to_string(p) + " are required", ErrorKind::Other);
  require(p == 1 || previous_rhs != nullptr, "MissingTerm",
          "previous right-hand side is required", ErrorKind::Other);
  const double h = config.h_hat;
  Vec r;
  if (p == 1) {
    r = h * alpha0.cwiseProduct(alpha1);
  } else {
    // d/dx (T_a T_b); a factor of order 0 is u0 itself, handled through alpha.
    auto product_dx = [&](int a, int b) -> Vec {
      if (a == 0) std::swap(a, b);
      if (b == 0)
        return alpha0.cwiseProduct(problem.first.apply(known[a])) + alpha1.cwiseProduct(known[a]);
      return problem.first.apply(known[a].cwiseProduct(known[b]));
    };
    Vec s = Vec::Zero(alpha0.size());
    for (int k = 0; 2 * k <= p - 1; ++k) {
      int l = p - 1 - k;
      double w = (k == l) ? 0.5 : 1.0;
      if (config.normalization == Normalization::Raw) w *= binomial(p - 1, k);
      s += w * product_dx(k, l);
    }
    s -= config.nu * problem.second.apply(known[p - 1]);
    r = (1.0 + h) * (*previous_rhs) + h * s;
    if (config.normalization == Normalization::Raw) r *= p;
  }
  r[0] = 0.0;
  return r;
}

double sequential_dt_bound(const Problem& problem, const HomotopyConfig& config) {
  const double ta = 0.0;
  Vec a0 = eval_alpha(0, problem.u0, problem.grid, ta);
  Vec a1 = eval_alpha(1, problem.u0, problem.grid, ta);
  SpMat l = a0.asDiagonal() * problem.first.matrix;
  l += SpMat(Mat(a1.asDiagonal()).sparseView());
  l -= config.nu * problem.second.matrix;
  double norm = std::abs(config.h_hat) * inf_norm(l);
  return norm > 0.0 ? 1.0 / norm : std::numeric_limits<double>::infinity();
}

SequentialResult solve_sequential(const HomotopyConfig& config, const Problem& problem, double dt,
                                  int tau, TimeScheme scheme) {
  config.check();
  require(dt > 0.0, "InvalidScheme", "dt must be positive");
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  const int m = config.order;
  const int n = problem.grid.n_points;
  SequentialResult out;
  out.dt = dt;
  out.dt_bound = sequential_dt_bound(problem, config);
  out.terms.resize(m + 1);
  std::vector<Vec> w(m + 1, Vec::Zero(n));
  w[0] = eval_u0(problem.u0, problem.grid, 0.0);
  for (int p = 0; p <= m; ++p) {
    out.terms[p].order = p;
    out.terms[p].normalization = config.normalization;
    out.terms[p].trajectory.reserve(tau + 1);
    out.terms[p].trajectory.push_back(w[p]);
  }
  out.times.push_back(0.0);
  std::vector<Vec> rho(m + 1);
  for (int j = 0; j < tau; ++j) {
    const double t_next = (j + 1) * dt;
    const double t_eval = scheme == TimeScheme::Explicit ? j * dt : t_next;
    const double ta = problem.alpha_time(t_eval, config.alpha_mode);
    Vec a0 = eval_alpha(0, problem.u0, problem.grid, ta);
    Vec a1 = eval_alpha(1, problem.u0, problem.grid, ta);
    if (scheme == TimeScheme::Explicit) {
      for (int p = 1; p <= m; ++p)
        rho[p] = deformation_rhs(p, w, p > 1 ? &rho[p - 1] : nullptr, a0, a1, problem, config);
      for (int p = 1; p <= m; ++p) w[p] += dt * rho[p];
      w[0] = eval_u0(problem.u0, problem.grid, t_next);
    } else {
      // The hierarchy is lower triangular in p, so backward Euler is a forward
      // substitution over the orders.
      w[0] = eval_u0(problem.u0, problem.grid, t_next);
      for (int p = 1; p <= m; ++p) {
        rho[p] = deformation_rhs(p, w, p > 1 ? &rho[p - 1] : nullptr, a0, a1, problem, config);
        w[p] += dt * rho[p];
      }
    }
    double worst = 0.0;
    bool finite = true;
    for (int p = 1; p <= m; ++p) {
      finite = finite && w[p].allFinite();
      worst = std::max(worst, w[p].cwiseAbs().maxCoeff());
    }
    if ((!finite || worst > 1e6) && !out.diverged) {
      out.diverged = true;
      out.diverged_step = j + 1;
      if (scheme == TimeScheme::Explicit && dt > out.dt_bound)
        fail(ErrorKind::Stability, "StabilityViolation",
             "explicit dt " + std::to_string(dt) + " above bound " + std::to_string(out.dt_bound) +
                 " and term norm exceeded 1e6 at step " + std::to_string(j + 1));
    }
    for (int p = 0; p <= m; ++p) out.terms[p].trajectory.push_back(w[p]);
    out.times.push_back(t_next);
  }
  return out;
}

Vec partial_sum(const std::vector<DeformationTerm>& terms, int upto, int step) {
  require(!terms.empty(), "MissingTerm", "no terms", ErrorKind::Other);
  const auto& first = terms[0].trajectory;
  const int s = step < 0 ? static_cast<int>(first.size()) - 1 : step;
  Vec u = Vec::Zero(first[s].size());
  const int top = std::min<int>(upto, static_cast<int>(terms.size()) - 1);
  for (int p = 0; p <= top; ++p) {
    const auto& term = terms[p];
    double scale = term.normalization == Normalization::Raw ? std::exp(-std::lgamma(p + 1.0)) : 1.0;
    u += scale * term.trajectory[s];
  }
  return u;
}

std::vector<Vec> sum_series(const std::vector<DeformationTerm>& terms) {
  std::vector<Vec> out;
  if (terms.empty()) return out;
  const int steps = static_cast<int>(terms[0].trajectory.size());
  for (int s = 0; s < steps; ++s) out.push_back(partial_sum(terms, static_cast<int>(terms.size()) - 1, s));
  return out;
}

double field_norm(const Vec& f, NormKind kind, double dx) {
  if (kind == NormKind::Max) return f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
  return std::sqrt(dx * f.squaredNorm());
}

std::vector<double> gamma_ratios(const std::vector<DeformationTerm>& terms, NormKind norm,
                                 double dx, RatioConvention convention, int step) {
  require(terms.size() >= 2, "DegenerateTerm", "need at least two terms", ErrorKind::Numerical);
  std::vector<double> log_norm(terms.size());
  for (size_t p = 0; p < terms.size(); ++p) {
    const auto& tr = terms[p].trajectory;
    const Vec& f = tr[step < 0 ? tr.size() - 1 : step];
    double v = field_norm(f, norm, dx);
    // stored values are w_p (normalized) or u_p (raw)
    double lf = std::lgamma(p + 1.0);
    double log_w = std::log(v) - (terms[p].normalization == Normalization::Raw ? lf : 0.0);
    log_norm[p] = convention == RatioConvention::Raw ? log_w + lf : log_w;
    if (p + 1 < terms.size())
      require(v >= 1e-300, "DegenerateTerm",
              "norm of order " + std::to_string(p) + " vanishes", ErrorKind::Numerical);
  }
  std::vector<double> r;
  for (size_t p = 0; p + 1 < terms.size(); ++p) r.push_back(std::exp(log_norm[p + 1] - log_norm[p]));
  return r;
}

double truncation_bound(double gamma, int order, double u0_norm) {
  require(gamma < 1.0, "DivergentSeries", "ratio " + std::to_string(gamma) + " >= 1",
          ErrorKind::Divergence);
  return std::pow(gamma, order + 1) / (1.0 - gamma) * u0_norm;
}

int min_order(double eps, double gamma, double u0_norm) {
  require(gamma < 1.0, "DivergentSeries", "ratio " + std::to_string(gamma) + " >= 1",
          ErrorKind::Divergence);
  require(eps > 0.0 && gamma > 0.0, "OutOfDomain", "eps and gamma must be positive");
  double m = std::ceil(std::log(eps * (1.0 - gamma) / u0_norm) / std::log(gamma));
  return std::max(0, static_cast<int>(m));
}

GammaBounds gamma_bounds(double h_hat, double first_norm, double u0_norm, double t) {
  GammaBounds g;
  g.analytical = M_PI * std::abs(h_hat) * t / 2.0;
  g.numerical = std::abs(h_hat) * first_norm * u0_norm * t / 2.0;
  g.analytical_converges = g.analytical < 1.0;
  g.numerical_converges = g.numerical < 1.0;
  return g;
}

ReH re_h(double re, double u_bar, double u0_l2, int dimension) {
  require(re >= 0.0 && u_bar > 0.0, "OutOfDomain", "Re >= 0 and U > 0 required");
  require(dimension >= 1 && dimension <= 3, "OutOfDomain", "dimension must be 1, 2 or 3");
  // N ~ Re^s resolution rule with s = 1, 1/2, 3/4; Re_H ~ Re N^{3/2}.
  const double s = dimension == 1 ? 1.0 : (dimension == 2 ? 0.5 : 0.75);
  ReH out;
  out.exponent = 1.0 + 1.5 * s;
  out.value = std::pow(re, out.exponent) / (2.0 * u_bar * M_PI * M_PI) * u0_l2;
  out.caveat = dimension != 1;
  return out;
}

double t_nonlinear(double re_h_value, double h_hat) {
  require(re_h_value > 0.0, "OutOfDomain", "Re_H must be positive");
  if (h_hat == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / (re_h_value * std::abs(h_hat));
}

double legacy_r(double u0_norm, double first_norm, double second_norm) {
  return u0_norm * first_norm / second_norm;
}

double fd_error_estimate(int order, int tau, double dx, double dt) {
  return std::max(double(order) * tau * dx * dx, double(order) * tau * dt * dt);
}

DiagnosticsReport build_diagnostics(const SequentialResult& result, const Problem& problem,
                                    const HomotopyConfig& config, NormKind norm, double u_bar,
                                    double d_bar, double target_eps) {
  DiagnosticsReport d;
  d.h_hat = config.h_hat;
  d.nu = config.nu;
  d.order = config.order;
  d.dt = result.dt;
  d.dx = problem.grid.dx;
  d.tau = static_cast<int>(result.times.size()) - 1;
  d.t = result.times.back();
  d.norm = norm == NormKind::Max ? "max" : "l2";
  Vec u00 = eval_u0(problem.u0, problem.grid, 0.0);
  d.u0_norm = u00.cwiseAbs().maxCoeff();
  d.u0_l2 = std::sqrt(problem.grid.dx * u00.squaredNorm());
  d.first_norm = inf_norm(problem.first);
  d.second_norm = inf_norm(problem.second);
  d.diverged = result.diverged;
  if (result.terms.size() >= 2) {
    try {
      d.gamma = gamma_ratios(result.terms, norm, d.dx, RatioConvention::Raw);
      d.gamma_series = gamma_ratios(result.terms, norm, d.dx, RatioConvention::Series);
    } catch (const Error&) {
      d.gamma.clear();
      d.gamma_series.clear();
    }
  }
  d.gamma_max = d.gamma.empty() ? 0.0 : *std::max_element(d.gamma.begin(), d.gamma.end());
  d.bounds = gamma_bounds(config.h_hat, d.first_norm, d.u0_norm, d.t);
  d.target_eps = target_eps;
  if (!d.gamma.empty() && d.gamma_max < 1.0) {
    d.eps_gamma = truncation_bound(d.gamma_max, config.order, d.u0_norm);
    d.m_min = min_order(target_eps, d.gamma_max, d.u0_norm);
  }
  if (d.bounds.analytical > 0.0 && d.bounds.analytical < 1.0)
    d.eps_gamma_bar = truncation_bound(d.bounds.analytical, config.order, d.u0_norm);
  d.u_bar = u_bar;
  d.d_bar = d_bar > 0.0 ? d_bar : problem.grid.length;
  d.reynolds = d.u_bar * d.d_bar / config.nu;
  d.re_h = re_h(d.reynolds, d.u_bar, d.u0_l2, 1);
  d.t_ns = t_nonlinear(d.re_h.value, config.h_hat);
  d.legacy_r = legacy_r(d.u0_norm, d.first_norm, d.second_norm);
  d.dt_bound = result.dt_bound;
  d.eps_fd = fd_error_estimate(config.order, d.tau, d.dx, d.dt);
  return d;
}

}  // namespace qham
