// Acceptance runner: `acceptance N` checks criterion N, `acceptance` checks all.
// Prints one [PASS]/[FAIL] line per criterion; exit status is nonzero on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qham/dns.hpp"
#include "qham/errors.hpp"
#include "qham/homotopy.hpp"
#include "qham/lcu.hpp"
#include "qham/time_marching.hpp"

using namespace qham;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr double kNu = 1e-3;
constexpr double kDt = 5e-3;
constexpr int kTau = 100;  // T = 0.5
constexpr int kGrid = 32;

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

HomotopyConfig config(int order, double h = -0.5) {
  HomotopyConfig c;
  c.order = order;
  c.h_hat = h;
  c.nu = kNu;
  return c;
}

const Problem& problem() {
  static const Problem pr = Problem::make(kGrid, kNu);
  return pr;
}

const Vec& dns_reference() {
  static const Vec ref = [] {
    DnsConfig c;
    c.t_final = kDt * kTau;
    return restrict_to(run_dns(c, kNu, problem().bc).fields.back(), problem().grid);
  }();
  return ref;
}

struct Fit {
  double slope = 0.0;
  double r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i)
    sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i], syy += y[i] * y[i];
  Fit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  f.r2 = r * r;
  return f;
}

double max_abs(const Vec& v) { return v.cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------

Outcome c01() {
  auto start = std::chrono::steady_clock::now();
  const std::vector<int> orders = {10, 20, 40, 60, 80};
  SequentialResult r = solve_sequential(config(80), problem(), kDt, kTau);
  std::vector<double> m, logs, mses;
  for (int o : orders) {
    double e = mse(partial_sum(r.terms, o), dns_reference());
    mses.push_back(e);
    m.push_back(o);
    logs.push_back(std::log(e));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool decreasing = true;
  for (size_t i = 1; i < mses.size(); ++i) decreasing = decreasing && mses[i] < mses[i - 1];
  Fit f = linear_fit(m, logs);
  std::ostringstream os;
  os << "MSE(M=10,20,40,60,80) =";
  for (double e : mses) os << " " << fmt(e);
  os << "; log-slope " << fmt(f.slope) << ", R^2 " << fmt(f.r2) << ", " << fmt(secs) << " s";
  return {decreasing && f.slope < 0 && f.r2 >= 0.9 && secs <= 300, os.str()};
}

Outcome c02() {
  const std::vector<int> orders = {10, 20, 40, 60, 80};
  std::vector<double> hs;
  for (int k = 10; k >= 1; --k) hs.push_back(-0.1 * k);
  std::vector<std::vector<double>> grid;  // [h][order]
  for (double h : hs) {
    SequentialResult r = solve_sequential(config(80, h), problem(), kDt, kTau);
    std::vector<double> col;
    for (int o : orders) col.push_back(mse(partial_sum(r.terms, o), dns_reference()));
    grid.push_back(col);
  }
  size_t best = 0;
  for (size_t k = 0; k < hs.size(); ++k)
    if (grid[k].back() < grid[best].back()) best = k;
  std::vector<std::pair<double, double>> avg;  // (mean MSE, h)
  for (size_t k = 0; k < hs.size(); ++k) {
    double s = 0;
    for (double e : grid[k]) s += e;
    avg.push_back({s / orders.size(), hs[k]});
  }
  std::sort(avg.begin(), avg.end());
  int rank = 0;
  for (size_t k = 0; k < avg.size(); ++k)
    if (std::abs(avg[k].second + 0.5) < 1e-9) rank = static_cast<int>(k) + 1;
  bool in_window = hs[best] >= -0.7 - 1e-9 && hs[best] <= -0.3 + 1e-9;
  std::ostringstream os;
  os << "argmin h at M=80: " << fmt(hs[best]) << " (MSE " << fmt(grid[best].back())
     << "); column-mean rank of h=-0.5: " << rank << " of " << hs.size() << "; best column h="
     << fmt(avg.front().second);
  return {in_window && rank <= 2, os.str()};
}

Outcome c03() {
  const Problem& pr = problem();
  SequentialResult r = solve_sequential(config(80), pr, kDt, kTau);
  std::vector<double> ratios = gamma_ratios(r.terms, NormKind::Max, pr.grid.dx, RatioConvention::Raw);
  double gmax = *std::max_element(ratios.begin(), ratios.end());
  double u0 = max_abs(eval_u0(pr.u0, pr.grid, 0.0));
  GammaBounds b = gamma_bounds(-0.5, inf_norm(pr.first), u0, kDt * kTau);
  int above_one = 0;
  for (double x : ratios) above_one += x >= 1.0;
  std::ostringstream os;
  os << "max raw ratio " << fmt(gmax) << " vs 5 x numerical bound " << fmt(5 * b.numerical) << "; "
     << above_one << " of " << ratios.size() << " ratios >= 1";
  return {gmax <= 5 * b.numerical && above_one == 0, os.str()};
}

Outcome c04() {
  const Problem& pr = problem();
  SequentialResult r = solve_sequential(config(80), pr, kDt, kTau);
  std::vector<double> ratios = gamma_ratios(r.terms, NormKind::Max, pr.grid.dx, RatioConvention::Series);
  double u0 = max_abs(eval_u0(pr.u0, pr.grid, 0.0));
  bool pass = true;
  std::ostringstream os;
  for (int m : {10, 20, 40}) {
    double gamma = *std::max_element(ratios.begin(), ratios.begin() + m + 40);
    double lhs = max_abs(partial_sum(r.terms, m + 40) - partial_sum(r.terms, m));
    double rhs = gamma < 1.0 ? truncation_bound(gamma, m, u0) : std::numeric_limits<double>::infinity();
    bool ok = gamma < 1.0 && lhs <= rhs;
    pass = pass && ok;
    os << "M=" << m << ": |S_{M+40}-S_M| " << fmt(lhs) << ", gamma " << fmt(gamma)
       << (gamma < 1.0 ? ", bound " + fmt(rhs) : ", bound undefined (gamma >= 1)") << "; ";
  }
  return {pass, os.str()};
}

Outcome c05() {
  const Problem& pr = problem();
  const int n = kGrid;
  HomotopyConfig c = config(4);
  EmbeddedSystem sys = derive_embedding(4, c);
  std::vector<double> dts = {1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const char* aux_names[3] = {"w1^2", "w1*w2", "w1_x^2"};
  std::vector<double> main_diff;
  std::vector<std::array<double, 3>> aux_diff;
  for (double dt : dts) {
    int tau = static_cast<int>(std::lround(0.5 / dt));
    SequentialResult seq = solve_sequential(c, pr, dt, tau);
    std::vector<Vec> sums = sum_series(seq.terms);
    Trajectory tr = integrate_embedded(sys, pr, dt, tau);
    double dm = 0;
    std::array<double, 3> da{0, 0, 0};
    for (int s = 0; s <= tau; ++s) {
      const Vec& v = tr.states[s];
      dm = std::max(dm, max_abs(extract_solution(v, sys, n) - sums[s]));
      Vec w1 = slice(v, 1, n), w2 = slice(v, 2, n), d1 = pr.first.apply(w1);
      da[0] = std::max(da[0], max_abs(slice(v, 5, n) - w1.cwiseProduct(w1)));
      da[1] = std::max(da[1], max_abs(slice(v, 6, n) - w1.cwiseProduct(w2)));
      da[2] = std::max(da[2], max_abs(slice(v, 7, n) - d1.cwiseProduct(d1)));
    }
    main_diff.push_back(dm);
    aux_diff.push_back(da);
  }
  double cfit = 0;
  for (size_t k = 0; k < dts.size(); ++k) cfit = std::max(cfit, main_diff[k] / dts[k]);
  bool halves = true, aux_ok = true;
  std::ostringstream os;
  os << "max|u_emb - u_seq| =";
  for (double d : main_diff) os << " " << fmt(d);
  os << "; halving ratios";
  for (size_t k = 1; k < dts.size(); ++k) {
    double q = main_diff[k - 1] / main_diff[k];
    halves = halves && q >= 1.5 && q <= 2.5;
    os << " " << fmt(q);
  }
  os << "; C = " << fmt(cfit) << "; product errors vs C dt:";
  for (int a = 0; a < 3; ++a) {
    os << " " << aux_names[a];
    for (size_t k = 0; k < dts.size(); ++k) {
      aux_ok = aux_ok && aux_diff[k][a] <= cfit * dts[k];
      os << (k ? "/" : " ") << fmt(aux_diff[k][a], 3);
    }
  }
  return {halves && aux_ok, os.str()};
}

Outcome c06() {
  const Problem& pr = problem();
  HomotopyConfig c = config(4);
  c.alpha_mode = AlphaMode::Frozen;
  EmbeddedSystem sys = derive_embedding(4, c);
  AssembledSystem as = assemble(sys, pr, 0.0);
  StabilityBound sb = dt_stability_bound(Mat(as.a));
  Vec v0 = initial_state(sys, pr);
  auto peak = [&](double dt) {
    Trajectory tr = integrate_linear(as.a, as.b, v0, dt, 200);
    double m = 0;
    for (const Vec& s : tr.states) m = std::max(m, s.allFinite() ? max_abs(s) : INFINITY);
    return m;
  };
  double lo = peak(0.5 * sb.eigen), hi = peak(2.0 * sb.eigen);
  double lo_s = peak(0.5 * sb.surrogate), hi_s = peak(2.0 * sb.surrogate);
  std::ostringstream os;
  os << "eigen bound " << fmt(sb.eigen) << ": peak |v| " << fmt(lo) << " at 0.5x, " << fmt(hi)
     << " at 2x; surrogate " << fmt(sb.surrogate) << ": " << fmt(lo_s) << " / " << fmt(hi_s)
     << "; " << sb.excluded_modes << " modes with Re >= 0 (max rate " << fmt(sb.max_growth_rate) << ")";
  return {std::isfinite(lo) && lo < 1e6 && hi > 1e6, os.str()};
}

Outcome c07() {
  const Problem& pr = problem();
  EmbeddedSystem sys = derive_embedding(4, config(4));
  Mat a(assemble(sys, pr, 0.0).a);
  const double dt = 0.5 * dt_stability_bound(a).surrogate;
  Mat j = dt * a;
  ConditionReport cr = condition_diagnostics(j);
  Mat inv = (Mat::Identity(j.rows(), j.cols()) - j).inverse();
  bool pass = cr.diagonally_dominant && cr.varah_holds;
  std::ostringstream os;
  os << "dt " << fmt(dt) << ", kappa " << fmt(cr.kappa) << ", Gamma " << fmt(cr.gamma) << ", |inv| "
     << fmt(cr.inverse_norm) << " vs 1/Gamma " << fmt(1 / cr.gamma) << ";";
  for (int p : {5, 10, 20}) {
    double err = inf_norm(Mat(inv - neumann_inverse(j, p)));
    double bound = std::pow(cr.kappa - 1.0, p) / cr.gamma;
    pass = pass && err <= bound;
    os << " P=" << p << ": " << fmt(err) << " <= " << fmt(bound) << (err <= bound ? "" : " (violated)");
  }
  return {pass, os.str()};
}

Outcome c08() {
  std::mt19937_64 rng(20240601);
  std::normal_distribution<double> nd;
  const std::vector<double> eps = {0.5, 0.25, 0.1};
  bool bound_ok = true, slope_ok = true;
  double worst_ratio = 0, smin = 1e9, smax = -1e9;
  for (int t = 0; t < 20; ++t) {
    Mat j(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) j(r, c) = nd(rng);
    const double delta = 1.0 / Eigen::JacobiSVD<Mat>(j).singularValues()[0];
    std::vector<double> le, lerr;
    for (double e : eps) {
      LcuDecomposition d = build_unitaries(j, e, delta, 2);
      double norm = Eigen::JacobiSVD<Mat>(d.dilated).singularValues()[0];
      CMat diff = d.reconstruction() - d.dilated.cast<std::complex<double>>();
      double err = Eigen::JacobiSVD<CMat>(diff).singularValues()[0];
      double bound = e * e * norm * norm * norm / 6.0;
      bound_ok = bound_ok && err <= bound * (1 + 1e-12);
      worst_ratio = std::max(worst_ratio, err / bound);
      le.push_back(std::log(e));
      lerr.push_back(std::log(err));
    }
    double s = linear_fit(le, lerr).slope;
    smin = std::min(smin, s), smax = std::max(smax, s);
    slope_ok = slope_ok && std::abs(s - 2.0) <= 0.2;
  }
  std::ostringstream os;
  os << "20 matrices: max err/bound " << fmt(worst_ratio) << "; slopes in [" << fmt(smin) << ", "
     << fmt(smax) << "]";
  return {bound_ok && slope_ok, os.str()};
}

Outcome c09() {
  Problem pr = Problem::make(8, kNu);
  HomotopyConfig c = config(2);
  EmbeddedSystem sys = derive_embedding(2, c);
  const int tau = 10;
  Trajectory cl = integrate_embedded(sys, pr, kDt, tau);
  auto err = [&](const std::vector<Vec>& states) {
    double e = 0;
    for (int k = 0; k <= tau; ++k) e = std::max(e, max_abs(states[k] - cl.states[k]));
    return e;
  };
  EmulationOptions o;
  o.epsilon = 1e-3;
  EmulationResult r = run_tmcqc2(sys, pr, kDt, tau, o);
  double exact_err = err(r.trajectory.states);
  auto rich = [&](double e1, double e2) {
    EmulationOptions a = o, b = o;
    a.epsilon = e1, b.epsilon = e2;
    EmulationResult r1 = run_tmcqc2(sys, pr, kDt, tau, a), r2 = run_tmcqc2(sys, pr, kDt, tau, b);
    std::vector<Vec> x;
    for (int k = 0; k <= tau; ++k) x.push_back(richardson(r1.trajectory.states[k], r2.trajectory.states[k], e1, e2));
    return err(x);
  };
  double big = rich(0.9, 0.6), small = rich(0.45, 0.3);
  double ratio = big / small;
  std::ostringstream os;
  os << r.layout.describe() << "; eps=1e-3 max error " << fmt(exact_err) << " (target 1e-8); Richardson "
     << fmt(big) << " -> " << fmt(small) << ", ratio " << fmt(ratio) << " (target 16, slack 2)";
  return {exact_err <= 1e-8 && ratio >= 8.0 && ratio <= 32.0, os.str()};
}

Outcome c10() {
  Mat a(2, 2);
  a << -2.0, 1.0, 1.0, -2.0;
  Vec b = Vec::Zero(2), u(2);
  u << 1.0, 0.5;
  const double dt = 0.1;
  const int tau = 2, pad = 1;
  OneShotSystem os_sys = build_oneshot(SpMat(a.sparseView()), b, dt, tau, pad, u, false);
  Vec dense = solve_oneshot(os_sys);
  Vec v = u;
  double classical = max_abs(history_block(dense, 0, 2) - u);
  for (int j = 1; j <= tau + pad; ++j) {
    if (j <= tau) v = explicit_step(a, b, v, dt);
    classical = std::max(classical, max_abs(history_block(dense, j, 2) - v));
  }
  const double eps_n = 1e-6;
  Mat jm = Mat::Identity(os_sys.matrix.rows(), os_sys.matrix.cols()) - Mat(os_sys.matrix);
  ConditionReport cr = condition_diagnostics(jm);
  int p = 0;
  std::string how;
  try {
    p = p_min(cr.kappa, cr.gamma, eps_n);
    how = "p_min";
  } catch (const Error&) {
    // I - A_OS is strictly block lower triangular, so the series ends after n_slots terms
    p = os_sys.n_slots();
    how = "nilpotent length (kappa " + fmt(cr.kappa) + " outside (1,2))";
  }
  OneShotEmulation em = run_oneshot_emulated(os_sys, p, 1e-4);
  double emu = max_abs(em.history - dense);
  std::ostringstream os;
  os << "P=" << p << " from " << how << "; emulated vs dense " << fmt(emu) << " (eps_N " << fmt(eps_n)
     << "); blocks vs iterated steps " << fmt(classical);
  return {emu <= eps_n && classical <= 1e-12, os.str()};
}

Outcome c11() {
  Problem pr = Problem::make(8, kNu);
  EmbeddedSystem sys = derive_embedding(2, config(2));
  EmulationOptions o;
  o.epsilon = 0.9;
  o.readout = Readout::Shots;
  o.shots = 100000;
  o.seed = 7;
  EmulationResult r = run_tmcqc2(sys, pr, kDt, 4, o);
  EmulationResult again = run_tmcqc2(sys, pr, kDt, 4, o);
  const double p = r.complexity.p_succ_cumulative;
  const double sigma = std::sqrt(p * (1 - p) / o.shots);
  const double est = r.shots->p_succ;
  bool same = again.shots->counts == r.shots->counts;
  std::ostringstream os;
  os << "exact p_succ " << fmt(p) << ", shots " << fmt(est) << " (" << fmt(std::abs(est - p) / sigma)
     << " sigma); rerun identical: " << (same ? "yes" : "no");
  return {std::abs(est - p) <= 3 * sigma && same, os.str()};
}

Outcome c12() {
  double r = re_h(100, 1, 1 / std::sqrt(2.0)).value;
  double t = t_nonlinear(100, 0.5);
  int p = p_min(1.5, 1, 1e-6);
  bool ok_r = std::abs(r - 3581.9) <= 0.1;
  std::ostringstream os;
  os << "re_h " << fmt(r, 8) << " (pin 3581.9 +- 0.1; 1e5/sqrt(2)/(2 pi^2) = "
     << fmt(1e5 / std::sqrt(2.0) / (2 * std::numbers::pi * std::numbers::pi), 8) << "), t_nonlinear " << fmt(t)
     << ", p_min " << p;
  return {ok_r && std::abs(t - 0.04) < 1e-12 && p == 20, os.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"MSE decays exponentially in M", c01},
    {"h_hat structure of the sweep", c02},
    {"ratio bound on deformation terms", c03},
    {"truncation bound on partial sums", c04},
    {"embedding matches the sequential solver", c05},
    {"explicit stability bifurcation", c06},
    {"Neumann truncation and Varah bounds", c07},
    {"two-unitary reconstruction error", c08},
    {"iterative circuit exactness and Richardson", c09},
    {"one-shot history state", c10},
    {"shot statistics", c11},
    {"diagnostics arithmetic", c12},
};

bool run(int k) {
  const auto& [title, fn] = kCriteria[k - 1];
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("raised ") + e.what()};
  }
  std::printf("[%s] C%02d %s: %s\n", o.pass ? "PASS" : "FAIL", k, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  bool all = true;
  if (argc > 1) {
    int k = std::atoi(argv[1]);
    if (k < 1 || k > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", kCriteria.size());
      return 2;
    }
    return run(k) ? 0 : 1;
  }
  for (size_t k = 1; k <= kCriteria.size(); ++k) all = run(static_cast<int>(k)) && all;
  return all ? 0 : 1;
}
