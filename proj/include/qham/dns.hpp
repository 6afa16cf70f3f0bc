#ifndef QHAM_DNS_HPP_
#define QHAM_DNS_HPP_

#include <string>
#include <vector>

#include "qham/grid_fd.hpp"

namespace qham {

struct DnsConfig {
  int n_dns = 512;        // intervals; the fine grid has n_dns + 1 points including both walls
  double t_final = 0.5;
  double dt = -1.0;       // <= 0: min(0.25 dx^2 / nu, 0.25 dx / max|u|)
  double output_dt = -1;  // <= 0: only t = 0 and t_final are stored
  double length = 1.0;

  void check() const;
  double dx() const { return length / n_dns; }
};

struct DnsResult {
  std::vector<double> times;
  std::vector<Vec> fields;  // n_dns + 1 values each
  double dt = 0.0;
  double dx = 0.0;
  int steps = 0;
  // Field at the stored time closest to t.
  const Vec& at(double t) const;
};

// RK4 on u_t = nu u_xx - u u_x with second-order central differences and
// both wall values held fixed.
DnsResult run_dns(const DnsConfig& config, double nu, const BoundaryCondition& bc);

// Point sampling at the coarse nodes x_i = i L / n_coarse, i < n_coarse.
Vec restrict_to(const Vec& fine, const Grid1D& coarse);
// Coarse field onto the fine grid by copying shared nodes (other nodes zero).
Vec inject(const Vec& coarse, int n_dns);

double mse(const Vec& u, const Vec& u_ref);

// Nodes where |u_x| is at least `fraction` of its maximum.
int points_across_steep_region(const Vec& fine, double dx, double fraction = 0.5);

void write_dns_csv(const std::string& path, const DnsResult& result, double length,
                   const std::string& comment = "");

}  // namespace qham

#endif  // QHAM_DNS_HPP_
