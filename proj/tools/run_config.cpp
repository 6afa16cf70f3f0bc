#include "run_config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "CLI11.hpp"
#include "qham/errors.hpp"

namespace qham::cli {

namespace {

std::string strip(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::Config, "InvalidConfig", key + ": expected a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long long d = std::stoll(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::Config, "InvalidConfig", key + ": expected an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::Config, "InvalidConfig", key + ": expected true or false, got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
  require(nu > 0.0, "InvalidConfig", "nu must be positive");
  require(length > 0.0, "InvalidConfig", "length must be positive");
  require(n_grid >= 8 && (n_grid & (n_grid - 1)) == 0, "InvalidConfig",
          "grid must be a power of two >= 8");
  require(initial_profile == "cos", "InvalidConfig", "only the cos initial profile is supported");
  require(u_l == 1.0 && u_r == -1.0, "InvalidConfig",
          "the cos profile fixes the wall values to 1 and -1");
  require(coefficient_source == "quadrature" || coefficient_source == "closed-form", "InvalidConfig",
          "coefficient_source must be quadrature or closed-form");
  require(h_hat != 0.0, "InvalidConfig", "h_hat must be nonzero");
  require(order >= 0, "InvalidConfig", "order must be >= 0");
  require(normalization == "normalized" || normalization == "raw", "InvalidConfig",
          "normalization must be normalized or raw");
  require(alpha_mode == "time-dependent" || alpha_mode == "frozen", "InvalidConfig",
          "alpha_mode must be time-dependent or frozen");
  require(mode == "sequential" || mode == "embedded" || mode == "tmcqc2", "InvalidConfig",
          "mode must be sequential, embedded or tmcqc2");
  require(scheme == "explicit-iterative" || scheme == "implicit-iterative" ||
              scheme == "explicit-oneshot" || scheme == "implicit-oneshot",
          "InvalidConfig", "unknown scheme " + scheme);
  require(dt > 0.0, "InvalidConfig", "dt must be positive");
  require(tau >= 1, "InvalidConfig", "tau must be >= 1");
  require(zeta > 0.0, "InvalidConfig", "zeta must be positive");
  require(neumann_p >= 1, "InvalidConfig", "neumann_p must be >= 1");
  require(padding_c >= -1, "InvalidConfig", "padding_c must be >= 0");
  require(epsilon > 0.0, "InvalidConfig", "epsilon must be positive");
  require(epsilon2 < 0.0 || (epsilon2 > 0.0 && epsilon2 < epsilon), "InvalidConfig",
          "epsilon2 must lie in (0, epsilon)");
  require(lcu_c == 2 || lcu_c == 4, "InvalidConfig", "lcu_c must be 2 or 4");
  require(shots >= 0, "InvalidConfig", "shots must be >= 0");
  require(n_dns >= n_grid && n_dns % n_grid == 0, "InvalidConfig",
          "n_dns must be a multiple of the grid size");
  require(!orders.empty() && !h_hats.empty(), "InvalidConfig", "sweep lists must be non-empty");
  for (int m : orders) require(m >= 0, "InvalidConfig", "orders must be >= 0");
  for (double h : h_hats) require(h != 0.0, "InvalidConfig", "h_hat values must be nonzero");
  require(jobs >= 0, "InvalidConfig", "jobs must be >= 0");
  require(max_vars >= 2, "InvalidConfig", "max_vars must be >= 2");
  require(target_eps > 0.0, "InvalidConfig", "target_eps must be positive");
}

void apply_config_file(RunConfig& c, const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "InvalidConfig", "cannot read config file " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    fail(ErrorKind::Config, "InvalidConfig", std::string("config parse error: ") + e.what());
  }
  using Setter = std::function<void(const std::string&, const std::vector<std::string>&)>;
  auto num = [](double& f) -> Setter {
    return [&f](const std::string& k, const std::vector<std::string>& v) { f = to_double(k, strip(v.at(0))); };
  };
  auto integer = [](auto& f) -> Setter {
    return [&f](const std::string& k, const std::vector<std::string>& v) {
      f = static_cast<std::remove_reference_t<decltype(f)>>(to_int(k, strip(v.at(0))));
    };
  };
  auto text = [](std::string& f) -> Setter {
    return [&f](const std::string&, const std::vector<std::string>& v) { f = strip(v.at(0)); };
  };
  std::map<std::string, Setter> table = {
      {"problem.nu", num(c.nu)},
      {"problem.length", num(c.length)},
      {"problem.n_grid", integer(c.n_grid)},
      {"problem.u_l", num(c.u_l)},
      {"problem.u_r", num(c.u_r)},
      {"problem.initial_profile", text(c.initial_profile)},
      {"problem.n_max", integer(c.n_max)},
      {"problem.coefficient_source", text(c.coefficient_source)},
      {"homotopy.h_hat", num(c.h_hat)},
      {"homotopy.order", integer(c.order)},
      {"homotopy.normalization", text(c.normalization)},
      {"homotopy.alpha_mode", text(c.alpha_mode)},
      {"homotopy.max_vars", integer(c.max_vars)},
      {"homotopy.target_eps", num(c.target_eps)},
      {"scheme.mode", text(c.mode)},
      {"scheme.kind", text(c.scheme)},
      {"scheme.dt", num(c.dt)},
      {"scheme.tau", integer(c.tau)},
      {"scheme.zeta", num(c.zeta)},
      {"scheme.neumann_p", integer(c.neumann_p)},
      {"scheme.padding_c", integer(c.padding_c)},
      {"quantum.enabled",
       [&c](const std::string& k, const std::vector<std::string>& v) { c.quantum = to_bool(k, strip(v.at(0))); }},
      {"quantum.epsilon", num(c.epsilon)},
      {"quantum.epsilon2", num(c.epsilon2)},
      {"quantum.delta", num(c.delta)},
      {"quantum.lcu_c", integer(c.lcu_c)},
      {"quantum.shots", integer(c.shots)},
      {"quantum.seed", integer(c.seed)},
      {"dns.n_dns", integer(c.n_dns)},
      {"dns.cache", text(c.dns_cache)},
      {"sweep.orders",
       [&c](const std::string& k, const std::vector<std::string>& v) {
         c.orders.clear();
         for (const auto& s : v) c.orders.push_back(static_cast<int>(to_int(k, strip(s))));
       }},
      {"sweep.h_hats",
       [&c](const std::string& k, const std::vector<std::string>& v) {
         c.h_hats.clear();
         for (const auto& s : v) c.h_hats.push_back(to_double(k, strip(s)));
       }},
      {"sweep.jobs", integer(c.jobs)},
      {"outputs.directory", text(c.out_dir)},
  };
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key = item.fullname();
    auto it = table.find(key);
    if (it == table.end() && item.parents.empty()) {
      // bare key: accept if exactly one section defines it
      int hits = 0;
      for (auto jt = table.begin(); jt != table.end(); ++jt)
        if (jt->first.size() > key.size() && jt->first.ends_with("." + key)) {
          it = jt;
          ++hits;
        }
      if (hits != 1) it = table.end();
    }
    require(it != table.end(), "InvalidConfig", "unknown config key '" + key + "'");
    require(!item.inputs.empty(), "InvalidConfig", "config key '" + key + "' has no value");
    it->second(key, item.inputs);
  }
}

nlohmann::json to_json(const RunConfig& c) {
  return {
      {"problem",
       {{"nu", c.nu},
        {"length", c.length},
        {"n_grid", c.n_grid},
        {"u_l", c.u_l},
        {"u_r", c.u_r},
        {"initial_profile", c.initial_profile},
        {"n_max", c.n_max},
        {"coefficient_source", c.coefficient_source}}},
      {"homotopy",
       {{"h_hat", c.h_hat},
        {"order", c.order},
        {"normalization", c.normalization},
        {"alpha_mode", c.alpha_mode},
        {"max_vars", c.max_vars},
        {"target_eps", c.target_eps}}},
      {"scheme",
       {{"mode", c.mode},
        {"kind", c.scheme},
        {"dt", c.dt},
        {"tau", c.tau},
        {"zeta", c.zeta},
        {"neumann_p", c.neumann_p},
        {"padding_c", c.padding_c}}},
      {"quantum",
       {{"enabled", c.quantum},
        {"epsilon", c.epsilon},
        {"epsilon2", c.epsilon2},
        {"delta", c.delta},
        {"lcu_c", c.lcu_c},
        {"shots", c.shots},
        {"seed", c.seed}}},
      {"dns", {{"n_dns", c.n_dns}, {"cache", c.dns_cache}}},
      {"sweep", {{"orders", c.orders}, {"h_hats", c.h_hats}, {"jobs", c.jobs}}},
      {"outputs", {{"directory", c.out_dir}}},
  };
}

}  // namespace qham::cli
