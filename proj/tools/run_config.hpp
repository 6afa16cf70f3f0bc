#ifndef QHAM_TOOLS_RUN_CONFIG_HPP_
#define QHAM_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace qham::cli {

struct RunConfig {
  // problem
  double nu = 1e-3;
  double length = 1.0;
  int n_grid = 32;
  double u_l = 1.0;
  double u_r = -1.0;
  std::string initial_profile = "cos";
  int n_max = 128;
  std::string coefficient_source = "quadrature";
  // homotopy
  double h_hat = -0.5;
  int order = 4;
  std::string normalization = "normalized";
  std::string alpha_mode = "time-dependent";
  // scheme
  std::string mode = "sequential";  // sequential | embedded | tmcqc2
  std::string scheme = "explicit-iterative";
  double dt = 5e-3;
  int tau = 100;
  double zeta = 0.5;
  int neumann_p = 20;
  int padding_c = -1;
  // quantum
  bool quantum = false;
  double epsilon = 1e-3;
  double epsilon2 = -1.0;
  double delta = -1.0;
  int lcu_c = 2;
  long long shots = 0;  // 0: exact readout
  std::uint64_t seed = 1;
  // dns
  int n_dns = 512;
  std::string dns_cache;
  // sweep
  std::vector<int> orders = {10, 20, 40, 60, 80};
  std::vector<double> h_hats = {-1.0, -0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1};
  // outputs
  std::string out_dir = "out";
  int jobs = 0;
  int max_vars = 64;
  double target_eps = 1e-3;

  void validate() const;
  double t_final() const { return dt * tau; }
};

// Applies key = value pairs from a TOML-style file; keys may be qualified by
// their section ("problem.nu") or bare ("nu").
void apply_config_file(RunConfig& cfg, const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace qham::cli

#endif  // QHAM_TOOLS_RUN_CONFIG_HPP_
