#include "qham/time_marching.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "qham/errors.hpp"
#include "qham/io.hpp"

namespace qham {

const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::ImplicitIterative: return "implicit-iterative";
    case SchemeKind::ExplicitOneShot: return "explicit-oneshot";
    case SchemeKind::ImplicitOneShot: return "implicit-oneshot";
    default: return "explicit-iterative";
  }
}

void SchemeConfig::check() const {
  require(dt > 0.0 && std::isfinite(dt), "InvalidScheme", "dt must be positive");
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  require(neumann_p >= 1, "InvalidScheme", "Neumann order must be >= 1");
  require(zeta > 0.0, "InvalidScheme", "zeta must be positive");
  require(padding_c >= -1, "InvalidScheme", "padding must be >= 0");
}

Vec explicit_step(const SpMat& a, const Vec& b, const Vec& v, double dt) {
  return v + dt * (a * v + b);
}

Vec explicit_step(const Mat& a, const Vec& b, const Vec& v, double dt) {
  return v + dt * (a * v + b);
}

namespace {

SpMat identity(Eigen::Index n) {
  SpMat i(n, n);
  i.setIdentity();
  return i;
}

}  // namespace

Vec neumann_apply(const SpMat& j, const Vec& x, int p) {
  require(p >= 1, "InvalidScheme", "Neumann order must be >= 1");
  Vec term = x;
  Vec acc = x;
  for (int k = 1; k < p; ++k) {
    term = j * term;
    acc += term;
  }
  return acc;
}

Vec implicit_step(const SpMat& a, const Vec& b, const Vec& v, double dt, ImplicitMethod method,
                  int neumann_p) {
  Vec rhs = v + dt * b;
  if (method == ImplicitMethod::Neumann) {
    SpMat j = dt * a;
    double norm = inf_norm(j);
    require(norm < 1.0, "NeumannDivergence",
            "|dt A|_inf = " + std::to_string(norm) + " >= 1", ErrorKind::Numerical);
    return neumann_apply(j, rhs, neumann_p);
  }
  SpMat m = identity(a.rows()) - dt * a;
  m.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(m);
  require(lu.info() == Eigen::Success, "SingularSystem", "I - dt A is singular",
          ErrorKind::Numerical);
  return lu.solve(rhs);
}

Vec implicit_step(const Mat& a, const Vec& b, const Vec& v, double dt, ImplicitMethod method,
                  int neumann_p) {
  if (method == ImplicitMethod::Neumann)
    return implicit_step(SpMat(a.sparseView()), b, v, dt, method, neumann_p);
  Eigen::FullPivLU<Mat> lu(Mat::Identity(a.rows(), a.cols()) - dt * a);
  require(lu.isInvertible(), "SingularSystem", "I - dt A is singular", ErrorKind::Numerical);
  return lu.solve(v + dt * b);
}

Mat neumann_inverse(const Mat& j, int p) {
  require(p >= 1, "InvalidScheme", "Neumann order must be >= 1");
  double norm = inf_norm(j);
  require(norm < 1.0, "NeumannDivergence", "|J|_inf = " + std::to_string(norm) + " >= 1",
          ErrorKind::Numerical);
  Mat acc = Mat::Identity(j.rows(), j.cols());
  Mat term = acc;
  for (int k = 1; k < p; ++k) {
    term = j * term;
    acc += term;
  }
  return acc;
}

int p_min(double kappa, double gamma, double eps_n) {
  require(kappa > 1.0 && kappa < 2.0, "OutOfDomain",
          "kappa = " + std::to_string(kappa) + " outside (1, 2), bound is vacuous");
  require(gamma > 0.0 && eps_n > 0.0, "OutOfDomain", "gamma and eps must be positive");
  double p = std::ceil(std::log(1.0 / (gamma * eps_n)) / std::log(1.0 / (kappa - 1.0)));
  return std::max(0, static_cast<int>(p));
}

double varah_gamma(const Mat& m) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double off = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
    g = std::min(g, std::abs(m(i, i)) - off);
  }
  require(g > 0.0, "NotDiagonallyDominant",
          "row dominance margin " + std::to_string(g) + " <= 0", ErrorKind::Numerical);
  return g;
}

ConditionReport condition_diagnostics(const Mat& j) {
  Mat m = Mat::Identity(j.rows(), j.cols()) - j;
  Eigen::FullPivLU<Mat> lu(m);
  require(lu.isInvertible(), "SingularSystem", "I - J is singular", ErrorKind::Numerical);
  Mat inv = lu.inverse();
  ConditionReport r;
  r.inverse_norm = inf_norm(inv);
  r.kappa = inf_norm(m) * r.inverse_norm;
  try {
    r.gamma = varah_gamma(m);
    r.diagonally_dominant = true;
    r.kappa_within_two_over_gamma = r.kappa <= 2.0 / r.gamma;
    r.varah_holds = r.inverse_norm <= 1.0 / r.gamma * (1.0 + 1e-12);
  } catch (const Error&) {
    r.diagonally_dominant = false;
  }
  return r;
}

OneShotSystem build_oneshot(const std::vector<SpMat>& a, const std::vector<Vec>& b, double dt,
                            int tau, int padding, const Vec& u_in, bool implicit) {
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  require(padding >= 0, "InvalidScheme", "padding must be >= 0");
  require(static_cast<int>(a.size()) >= tau && static_cast<int>(b.size()) >= tau,
          "DimensionMismatch", "need one operator and source per step", ErrorKind::Other);
  const Eigen::Index n = u_in.size();
  OneShotSystem sys;
  sys.tau = tau;
  sys.padding = padding;
  sys.block = static_cast<int>(n);
  sys.implicit = implicit;
  const int slots = sys.n_slots();
  sys.rhs = Vec::Zero(slots * n);
  sys.rhs.head(n) = u_in;
  std::vector<Eigen::Triplet<double>> trip;
  auto put = [&](int br, int bc, const SpMat& m, double scale) {
    for (int k = 0; k < m.outerSize(); ++k)
      for (SpMat::InnerIterator it(m, k); it; ++it)
        trip.emplace_back(br * n + it.row(), bc * n + it.col(), scale * it.value());
  };
  const SpMat eye = identity(n);
  put(0, 0, eye, 1.0);
  for (int j = 1; j < slots; ++j) {
    if (j <= tau) {
      if (implicit) {
        put(j, j, SpMat(eye - dt * a[j - 1]), 1.0);
        put(j, j - 1, eye, -1.0);
      } else {
        put(j, j, eye, 1.0);
        put(j, j - 1, SpMat(eye + dt * a[j - 1]), -1.0);
      }
      sys.rhs.segment(j * n, n) = dt * b[j - 1];
    } else {
      put(j, j, eye, 1.0);
      put(j, j - 1, eye, -1.0);
    }
  }
  sys.matrix.resize(slots * n, slots * n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

OneShotSystem build_oneshot(const SpMat& a, const Vec& b, double dt, int tau, int padding,
                            const Vec& u_in, bool implicit) {
  return build_oneshot(std::vector<SpMat>(tau, a), std::vector<Vec>(tau, b), dt, tau, padding,
                       u_in, implicit);
}

Vec solve_oneshot(const OneShotSystem& sys) {
  SpMat m = sys.matrix;
  m.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(m);
  require(lu.info() == Eigen::Success, "SingularSystem", "one-shot matrix is singular",
          ErrorKind::Numerical);
  return lu.solve(sys.rhs);
}

Vec history_block(const Vec& history, int slot, int block) {
  return history.segment(static_cast<Eigen::Index>(slot) * block, block);
}

StabilityBound dt_stability_bound(const Mat& a) {
  StabilityBound s;
  double norm = inf_norm(a);
  s.surrogate = norm > 0.0 ? 1.0 / norm : std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Mat> es(a, false);
  require(es.info() == Eigen::Success, "EigenFailure", "eigensolve did not converge",
          ErrorKind::Numerical);
  bool any = false;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    std::complex<double> l = es.eigenvalues()[k];
    if (l.real() < 0.0) {
      any = true;
      s.eigen = std::min(s.eigen, -l.real() / std::norm(l));
    } else {
      ++s.excluded_modes;
      s.max_growth_rate = std::max(s.max_growth_rate, l.real());
    }
  }
  require(any, "NoDecayingModes", "no eigenvalue has a negative real part", ErrorKind::Stability);
  return s;
}

double closed_form_dt_bound(double second_norm, double u0_norm, int order, double h_hat,
                            double nu) {
  return 1.0 / (second_norm * std::pow(u0_norm, order) * (std::abs(h_hat) + nu));
}

namespace {

bool blown_up(const Vec& v) { return !v.allFinite() || v.cwiseAbs().maxCoeff() > 1e6; }

}  // namespace

Trajectory integrate_embedded(const EmbeddedSystem& system, const Problem& problem, double dt,
                              int tau, TimeScheme scheme, ImplicitMethod method, int neumann_p) {
  require(dt > 0.0, "InvalidScheme", "dt must be positive");
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  Trajectory tr;
  Vec v = initial_state(system, problem);
  tr.times.push_back(0.0);
  tr.states.push_back(v);
  const bool frozen = system.alpha_mode == AlphaMode::Frozen;
  AssembledSystem fixed;
  if (frozen) fixed = assemble(system, problem, 0.0);
  for (int j = 0; j < tau; ++j) {
    const double t_eval = scheme == TimeScheme::Explicit ? j * dt : (j + 1) * dt;
    AssembledSystem as = frozen ? fixed : assemble(system, problem, t_eval);
    v = scheme == TimeScheme::Explicit ? explicit_step(as.a, as.b, v, dt)
                                       : implicit_step(as.a, as.b, v, dt, method, neumann_p);
    tr.times.push_back((j + 1) * dt);
    tr.states.push_back(v);
    if (blown_up(v)) {
      tr.diverged = true;
      tr.diverged_step = j + 1;
      break;
    }
  }
  return tr;
}

Trajectory integrate_linear(const SpMat& a, const Vec& b, const Vec& v0, double dt, int tau,
                            TimeScheme scheme) {
  require(dt > 0.0, "InvalidScheme", "dt must be positive");
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  Trajectory tr;
  Vec v = v0;
  tr.times.push_back(0.0);
  tr.states.push_back(v);
  Eigen::SparseLU<SpMat> lu;
  if (scheme == TimeScheme::Implicit) {
    SpMat m = identity(a.rows()) - dt * a;
    m.makeCompressed();
    lu.compute(m);
    require(lu.info() == Eigen::Success, "SingularSystem", "I - dt A is singular",
            ErrorKind::Numerical);
  }
  for (int j = 0; j < tau; ++j) {
    v = scheme == TimeScheme::Explicit ? explicit_step(a, b, v, dt) : Vec(lu.solve(v + dt * b));
    tr.times.push_back((j + 1) * dt);
    tr.states.push_back(v);
    if (blown_up(v)) {
      tr.diverged = true;
      tr.diverged_step = j + 1;
      break;
    }
  }
  return tr;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, const Grid1D& grid,
                          const std::vector<std::string>& variable_names,
                          const std::string& comment) {
  CsvWriter csv(path, {"step", "t", "node", "x", "variable", "value"}, comment);
  const int n = grid.n_points;
  for (size_t s = 0; s < traj.states.size(); ++s) {
    const Vec& v = traj.states[s];
    const int nv = static_cast<int>(v.size() / n);
    for (int var = 0; var < nv; ++var)
      for (int i = 0; i < n; ++i) {
        std::string name = var < static_cast<int>(variable_names.size())
                               ? variable_names[var]
                               : "v" + std::to_string(var);
        csv.field(static_cast<int>(s)).field(traj.times[s]).field(i).field(grid.x(i)).field(name);
        csv.field(v[var * n + i]).end_row();
      }
  }
}

}  // namespace qham
