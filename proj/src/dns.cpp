#include "qham/dns.hpp"

#include <cmath>

#include "qham/errors.hpp"
#include "qham/io.hpp"

namespace qham {

void DnsConfig::check() const {
  require(n_dns >= 8, "InvalidDns", "n_dns must be >= 8");
  require(t_final >= 0.0, "InvalidDns", "final time must be >= 0");
  require(length > 0.0, "InvalidDns", "length must be positive");
}

const Vec& DnsResult::at(double t) const {
  require(!fields.empty(), "MissingTerm", "empty DNS result", ErrorKind::Other);
  size_t best = 0;
  for (size_t k = 1; k < times.size(); ++k)
    if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
  return fields[best];
}

namespace {

Vec rhs(const Vec& u, double nu, double dx) {
  const Eigen::Index n = u.size();
  Vec r = Vec::Zero(n);
  const double a = nu / (dx * dx), b = 1.0 / (2.0 * dx);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    r[i] = a * (u[i + 1] - 2.0 * u[i] + u[i - 1]) - u[i] * b * (u[i + 1] - u[i - 1]);
  return r;
}

}  // namespace

DnsResult run_dns(const DnsConfig& config, double nu, const BoundaryCondition& bc) {
  config.check();
  require(nu > 0.0, "InvalidDns", "viscosity must be positive");
  bc.check(config.length);
  const int n = config.n_dns + 1;
  const double dx = config.dx();
  Vec u(n);
  for (int i = 0; i < n; ++i) u[i] = bc.u_in(i * dx);
  u[0] = bc.u_l;
  u[n - 1] = bc.u_r;

  DnsResult res;
  res.dx = dx;
  double umax = std::max(u.cwiseAbs().maxCoeff(), 1e-12);
  res.dt = config.dt > 0.0 ? config.dt : std::min(0.25 * dx * dx / nu, 0.25 * dx / umax);
  res.times.push_back(0.0);
  res.fields.push_back(u);

  std::vector<double> outputs;
  if (config.output_dt > 0.0)
    for (int k = 1; k * config.output_dt < config.t_final - 1e-12; ++k) outputs.push_back(k * config.output_dt);
  if (config.t_final > 0.0) outputs.push_back(config.t_final);

  double t = 0.0;
  for (double target : outputs) {
    while (t < target - 1e-14) {
      const double h = std::min(res.dt, target - t);
      Vec k1 = rhs(u, nu, dx);
      Vec k2 = rhs(u + 0.5 * h * k1, nu, dx);
      Vec k3 = rhs(u + 0.5 * h * k2, nu, dx);
      Vec k4 = rhs(u + h * k3, nu, dx);
      u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
      ++res.steps;
      if (!u.allFinite() || u.cwiseAbs().maxCoeff() > 1e6)
        fail(ErrorKind::Stability, "StabilityViolation",
             "DNS blew up at t = " + std::to_string(t) + " with dt = " + std::to_string(res.dt));
    }
    t = target;
    res.times.push_back(t);
    res.fields.push_back(u);
  }
  return res;
}

Vec restrict_to(const Vec& fine, const Grid1D& coarse) {
  const Eigen::Index n_dns = fine.size() - 1;
  require(n_dns > 0 && n_dns % coarse.n_points == 0, "IncompatibleGrids",
          "fine grid with " + std::to_string(n_dns) + " intervals does not nest " +
              std::to_string(coarse.n_points) + " coarse nodes");
  const Eigen::Index stride = n_dns / coarse.n_points;
  Vec out(coarse.n_points);
  for (int i = 0; i < coarse.n_points; ++i) out[i] = fine[i * stride];
  return out;
}

Vec inject(const Vec& coarse, int n_dns) {
  require(n_dns % coarse.size() == 0, "IncompatibleGrids", "grids do not nest");
  const Eigen::Index stride = n_dns / coarse.size();
  Vec out = Vec::Zero(n_dns + 1);
  for (Eigen::Index i = 0; i < coarse.size(); ++i) out[i * stride] = coarse[i];
  return out;
}

double mse(const Vec& u, const Vec& u_ref) {
  require(u.size() == u_ref.size() && u.size() > 0, "DimensionMismatch",
          "mse needs equal non-empty lengths", ErrorKind::Other);
  return (u - u_ref).squaredNorm() / double(u.size());
}

int points_across_steep_region(const Vec& fine, double dx, double fraction) {
  Vec g = Vec::Zero(fine.size());
  for (Eigen::Index i = 1; i + 1 < fine.size(); ++i) g[i] = std::abs(fine[i + 1] - fine[i - 1]) / (2 * dx);
  const double peak = g.maxCoeff();
  if (peak == 0.0) return 0;
  return static_cast<int>((g.array() >= fraction * peak).count());
}

void write_dns_csv(const std::string& path, const DnsResult& result, double length,
                   const std::string& comment) {
  CsvWriter csv(path, {"step", "t", "node", "x", "u"}, comment);
  for (size_t s = 0; s < result.fields.size(); ++s) {
    const Vec& f = result.fields[s];
    const double dx = length / double(f.size() - 1);
    for (Eigen::Index i = 0; i < f.size(); ++i)
      csv.field(static_cast<int>(s)).field(result.times[s]).field(static_cast<int>(i)).field(i * dx).field(f[i]).end_row();
  }
}

}  // namespace qham
