// qham: embed / solve / sweep / dns / diagnose front end.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qham/dns.hpp"
#include "qham/embedding.hpp"
#include "qham/errors.hpp"
#include "qham/homotopy.hpp"
#include "qham/io.hpp"
#include "qham/lcu.hpp"
#include "qham/time_marching.hpp"
#include "run_config.hpp"

using nlohmann::json;
using namespace qham;
using qham::cli::RunConfig;

namespace {

double finite_or_null(double v) { return v; }

json number(double v) {
  if (std::isfinite(v)) return finite_or_null(v);
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

json to_json(const DiagnosticsReport& d) {
  auto list = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  return {
      {"inputs",
       {{"h_hat", d.h_hat},
        {"nu", d.nu},
        {"order", d.order},
        {"t", d.t},
        {"dt", d.dt},
        {"dx", d.dx},
        {"tau", d.tau},
        {"norm", d.norm},
        {"u0_norm", d.u0_norm},
        {"u0_l2", d.u0_l2},
        {"first_norm", d.first_norm},
        {"second_norm", d.second_norm},
        {"u_bar", d.u_bar},
        {"d_bar", d.d_bar},
        {"target_eps", d.target_eps}}},
      {"gamma", {{"convention", "raw"}, {"ratios", list(d.gamma)}, {"max", number(d.gamma_max)}}},
      {"gamma_series", list(d.gamma_series)},
      {"gamma_bounds",
       {{"analytical", d.bounds.analytical},
        {"numerical", d.bounds.numerical},
        {"analytical_converges", d.bounds.analytical_converges},
        {"numerical_converges", d.bounds.numerical_converges}}},
      {"eps_gamma", number(d.eps_gamma)},
      {"eps_gamma_bar", number(d.eps_gamma_bar)},
      {"m_min", d.m_min},
      {"reynolds", d.reynolds},
      {"re_h", {{"value", d.re_h.value}, {"exponent", d.re_h.exponent}, {"caveat", d.re_h.caveat}}},
      {"t_ns", number(d.t_ns)},
      {"legacy_r", d.legacy_r},
      {"dt_bound", number(d.dt_bound)},
      {"a_norm", number(d.a_norm)},
      {"eps_fd", d.eps_fd},
      {"diverged", d.diverged},
  };
}

std::string config_comment(const RunConfig& cfg) { return "config: " + cli::to_json(cfg).dump(); }

void write_json(const std::string& path, json j) { write_text(path, j.dump(2) + "\n"); }

Problem make_problem(const RunConfig& c) {
  return Problem::make(c.n_grid, c.nu, c.length, c.n_max,
                       c.coefficient_source == "closed-form" ? CoefficientSource::ClosedForm
                                                             : CoefficientSource::Quadrature);
}

HomotopyConfig make_homotopy(const RunConfig& c, int order) {
  HomotopyConfig h;
  h.h_hat = c.h_hat;
  h.order = order;
  h.nu = c.nu;
  h.normalization = c.normalization == "raw" ? Normalization::Raw : Normalization::Normalized;
  h.alpha_mode = c.alpha_mode == "frozen" ? AlphaMode::Frozen : AlphaMode::TimeDependent;
  return h;
}

std::string path_in(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out_dir) / name).string();
}

void write_field_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<Vec>& fields, const Grid1D& grid, const std::string& comment) {
  CsvWriter csv(path, {"step", "t", "node", "x", "u"}, comment);
  for (size_t s = 0; s < fields.size(); ++s)
    for (int i = 0; i < grid.n_points; ++i)
      csv.field(static_cast<int>(s)).field(times[s]).field(i).field(grid.x(i)).field(fields[s][i]).end_row();
}

std::vector<std::string> variable_names(const EmbeddedSystem& sys) {
  std::vector<std::string> names;
  for (int v = 0; v < sys.n_vars(); ++v) names.push_back(sys.name(v));
  return names;
}

json stability_json(const Mat& a, const Problem& pr, const RunConfig& c, int order) {
  json j;
  j["a_norm"] = inf_norm(a);
  Vec u00 = eval_u0(pr.u0, pr.grid, 0.0);
  j["closed_form"] = closed_form_dt_bound(inf_norm(pr.second), u00.cwiseAbs().maxCoeff(), order,
                                          c.h_hat, c.nu);
  if (a.rows() <= 4096) {
    try {
      StabilityBound sb = dt_stability_bound(a);
      j["eigen"] = number(sb.eigen);
      j["surrogate"] = number(sb.surrogate);
      j["excluded_modes"] = sb.excluded_modes;
      j["max_growth_rate"] = sb.max_growth_rate;
    } catch (const Error& e) {
      j["eigen_error"] = e.what();
      j["surrogate"] = number(1.0 / inf_norm(a));
    }
  } else {
    j["surrogate"] = number(1.0 / inf_norm(a));
  }
  return j;
}

json complexity_json(const ComplexityReport& r) {
  return {{"sparsity", r.sparsity},
          {"epsilon", r.epsilon},
          {"eps_u", r.eps_u},
          {"n_dim", r.n_dim},
          {"gate_estimate", r.gate_estimate},
          {"gate_estimate_note", "order estimate with unit constant"},
          {"delta", r.delta},
          {"q", r.q},
          {"eta", number(r.eta)},
          {"a_norm", r.a_norm},
          {"p_succ_steps", r.p_succ_steps},
          {"p_succ_cumulative", r.p_succ_cumulative},
          {"p_succ_estimate", number(r.p_succ_estimate)},
          {"n_s_estimate", number(r.n_s_estimate)},
          {"amplitude_ratio", number(r.amplitude_ratio)}};
}

// ---------------------------------------------------------------- dns cache

std::string dns_key(const RunConfig& c) {
  std::ostringstream os;
  os << "dns nu=" << format_double(c.nu) << " n_dns=" << c.n_dns << " t_final=" << format_double(c.t_final())
     << " length=" << format_double(c.length);
  return os.str();
}

Vec load_dns_cache(const std::string& path, const std::string& key, int n_dns) {
  std::ifstream in(path);
  if (!in.good()) return {};
  std::string line;
  if (!std::getline(in, line) || line != "# " + key) return {};
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("node", 0) == 0) continue;
    auto pos = line.rfind(',');
    vals.push_back(std::stod(line.substr(pos + 1)));
  }
  if (static_cast<int>(vals.size()) != n_dns + 1) return {};
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

void save_dns_cache(const std::string& path, const std::string& key, const Vec& u, double dx) {
  CsvWriter csv(path, {"node", "x", "u"}, key);
  for (Eigen::Index i = 0; i < u.size(); ++i) csv.field(static_cast<int>(i)).field(i * dx).field(u[i]).end_row();
}

std::string cache_path(const RunConfig& c) {
  return c.dns_cache.empty() ? path_in(c, "dns_cache.csv") : c.dns_cache;
}

Vec dns_reference(const RunConfig& c, const Problem& pr) {
  const std::string key = dns_key(c);
  const std::string path = cache_path(c);
  Vec fine = load_dns_cache(path, key, c.n_dns);
  if (fine.size() == 0) {
    DnsConfig dc;
    dc.n_dns = c.n_dns;
    dc.t_final = c.t_final();
    dc.length = c.length;
    DnsResult r = run_dns(dc, c.nu, pr.bc);
    fine = r.fields.back();
    save_dns_cache(path, key, fine, dc.dx());
  }
  return restrict_to(fine, pr.grid);
}

// ---------------------------------------------------------------- embed

int cmd_embed(const RunConfig& c) {
  require(c.order >= 1, "InvalidConfig", "embed needs order >= 1");
  Problem pr = make_problem(c);
  EmbeddedSystem sys = derive_embedding(c.order, make_homotopy(c, c.order), c.max_vars);
  AssembledSystem as = assemble(sys, pr, 0.0);
  json doc = json::parse(to_json_string(sys));
  doc["config"] = cli::to_json(c);
  write_json(path_in(c, "embedding.json"), doc);
  write_matrix_market(as.a, path_in(c, "embedding_A.mtx"));
  {
    CsvWriter csv(path_in(c, "embedding_b.csv"), {"index", "variable", "node", "value"}, config_comment(c));
    const int n = pr.grid.n_points;
    for (Eigen::Index i = 0; i < as.b.size(); ++i)
      csv.field(static_cast<long long>(i)).field(sys.name(static_cast<int>(i / n))).field(static_cast<int>(i % n)).field(as.b[i]).end_row();
  }
  json diag;
  diag["config"] = cli::to_json(c);
  diag["n_vars"] = sys.n_vars();
  diag["variables"] = variable_names(sys);
  json pattern = json::array();
  for (auto [r, col] : block_pattern(sys)) pattern.push_back({r, col});
  diag["block_pattern"] = pattern;
  diag["matrix_size"] = as.a.rows();
  diag["stability"] = stability_json(Mat(as.a), pr, c, c.order);
  write_json(path_in(c, "embedding_diagnostics.json"), diag);
  std::cout << "embedded order " << c.order << ": " << sys.n_vars() << " variables, matrix "
            << as.a.rows() << "x" << as.a.cols() << " -> " << c.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- solve

EmulationOptions emulation_options(const RunConfig& c, double eps) {
  EmulationOptions o;
  o.epsilon = eps;
  o.delta = c.delta;
  o.c = c.lcu_c;
  o.readout = c.shots > 0 ? Readout::Shots : Readout::Exact;
  o.shots = c.shots > 0 ? c.shots : 1;
  o.seed = c.seed;
  return o;
}

void write_emulation(const RunConfig& c, const EmbeddedSystem& sys, const Problem& pr,
                     const std::string& prefix) {
  const int n = pr.grid.n_points;
  EmulationResult r = run_tmcqc2(sys, pr, c.dt, c.tau, emulation_options(c, c.epsilon));
  json doc;
  doc["config"] = cli::to_json(c);
  doc["layout"] = {{"n_t", r.layout.n_t}, {"n_a", r.layout.n_a}, {"n_d", r.layout.n_d},
                   {"total", r.layout.total()}};
  json steps = json::array();
  for (const auto& s : r.transcript)
    steps.push_back({{"step", s.step},
                     {"p_succ_exact", s.p_succ_exact},
                     {"p_succ_step", s.p_succ_step},
                     {"state_norm", s.state_norm},
                     {"countdown_value", s.countdown_value}});
  doc["steps"] = steps;
  doc["deltas"] = r.deltas;
  doc["max_norm_drift"] = r.max_norm_drift;
  doc["complexity"] = complexity_json(r.complexity);
  doc["readout"] = c.shots > 0 ? "shots" : "exact";
  if (r.shots) {
    doc["shots"] = {{"n_shots", r.shots->n_shots},
                    {"seed", r.shots->seed},
                    {"accepted", r.shots->accepted},
                    {"p_succ", r.shots->p_succ},
                    {"note", "magnitudes only; signs are not recovered from shots"}};
    write_shots_csv(path_in(c, prefix + "shots.csv"), *r.shots, r.layout, config_comment(c));
  }
  std::vector<Vec> fields;
  for (const auto& s : r.trajectory.states) fields.push_back(extract_solution(s, sys, n));
  if (c.epsilon2 > 0.0) {
    EmulationResult r2 = run_tmcqc2(sys, pr, c.dt, c.tau, emulation_options(c, c.epsilon2));
    std::vector<Vec> extra;
    for (size_t k = 0; k < fields.size(); ++k)
      extra.push_back(extract_solution(
          richardson(r.trajectory.states[k], r2.trajectory.states[k], c.epsilon, c.epsilon2), sys, n));
    write_field_csv(path_in(c, prefix + "trajectory_richardson.csv"), r.trajectory.times, extra,
                    pr.grid, config_comment(c));
    doc["richardson"] = {{"epsilon1", c.epsilon}, {"epsilon2", c.epsilon2}};
  }
  write_field_csv(path_in(c, prefix + "trajectory.csv"), r.trajectory.times, fields, pr.grid,
                  config_comment(c));
  write_json(path_in(c, prefix + "transcript.json"), doc);
}

int cmd_solve(const RunConfig& c) {
  Problem pr = make_problem(c);
  const bool implicit = c.scheme.rfind("implicit", 0) == 0;
  const bool oneshot = c.scheme.find("oneshot") != std::string::npos;
  json diag;
  bool diverged = false;

  if (c.mode == "sequential") {
    require(!oneshot, "InvalidConfig", "one-shot schemes need mode embedded");
    HomotopyConfig hc = make_homotopy(c, c.order);
    SequentialResult res = solve_sequential(hc, pr, c.dt, c.tau,
                                            implicit ? TimeScheme::Implicit : TimeScheme::Explicit);
    write_field_csv(path_in(c, "trajectory.csv"), res.times, sum_series(res.terms), pr.grid,
                    config_comment(c));
    diag = to_json(build_diagnostics(res, pr, hc, NormKind::Max, 1.0, -1.0, c.target_eps));
    diverged = res.diverged;
    Vec fine = load_dns_cache(cache_path(c), dns_key(c), c.n_dns);
    if (fine.size() > 0)
      diag["mse_vs_dns"] = number(mse(sum_series(res.terms).back(), restrict_to(fine, pr.grid)));
    if (c.quantum && c.order >= 1) {
      EmbeddedSystem sys = derive_embedding(c.order, hc, c.max_vars);
      write_emulation(c, sys, pr, "emulation_");
    }
  } else {
    require(c.order >= 1, "InvalidConfig", "embedded modes need order >= 1");
    HomotopyConfig hc = make_homotopy(c, c.order);
    EmbeddedSystem sys = derive_embedding(c.order, hc, c.max_vars);
    AssembledSystem a0 = assemble(sys, pr, 0.0);
    Mat dense = Mat(a0.a);
    diag["stability"] = stability_json(dense, pr, c, c.order);
    diag["n_vars"] = sys.n_vars();
    const int n = pr.grid.n_points;
    if (!implicit) {
      double bound = diag["stability"].contains("eigen") && diag["stability"]["eigen"].is_number()
                         ? diag["stability"]["eigen"].get<double>()
                         : diag["stability"]["surrogate"].get<double>();
      if (c.dt > c.zeta * bound)
        fail(ErrorKind::Stability, "StabilityViolation",
             "explicit dt " + std::to_string(c.dt) + " exceeds zeta * bound = " +
                 std::to_string(c.zeta * bound));
    } else if (dense.rows() <= 4096) {
      ConditionReport cr = condition_diagnostics(c.dt * dense);
      diag["implicit_block"] = {{"kappa", cr.kappa},
                                {"gamma", number(cr.gamma)},
                                {"diagonally_dominant", cr.diagonally_dominant},
                                {"kappa_within_two_over_gamma", cr.kappa_within_two_over_gamma},
                                {"varah_holds", cr.varah_holds}};
    }
    if (c.mode == "tmcqc2") {
      require(!implicit && !oneshot, "InvalidConfig", "tmcqc2 emulates the explicit iterative scheme");
      write_emulation(c, sys, pr, "");
    } else {
      Trajectory tr;
      if (oneshot) {
        std::vector<SpMat> as;
        std::vector<Vec> bs;
        const bool frozen = sys.alpha_mode == AlphaMode::Frozen;
        for (int j = 0; j < c.tau; ++j) {
          AssembledSystem s = assemble(sys, pr, frozen ? 0.0 : (implicit ? j + 1 : j) * c.dt);
          as.push_back(s.a);
          bs.push_back(s.b);
        }
        SchemeConfig sc;
        sc.tau = c.tau;
        sc.padding_c = c.padding_c;
        OneShotSystem os = build_oneshot(as, bs, c.dt, c.tau, sc.padding(), initial_state(sys, pr), implicit);
        Vec hist = solve_oneshot(os);
        for (int j = 0; j < os.n_slots(); ++j) {
          tr.times.push_back(std::min(j, c.tau) * c.dt);
          tr.states.push_back(history_block(hist, j, os.block));
        }
        diag["oneshot"] = {{"slots", os.n_slots()}, {"padding", os.padding}, {"size", os.matrix.rows()}};
        write_matrix_market(os.matrix, path_in(c, "oneshot_A.mtx"));
      } else {
        tr = integrate_embedded(sys, pr, c.dt, c.tau,
                                implicit ? TimeScheme::Implicit : TimeScheme::Explicit);
      }
      diverged = tr.diverged;
      std::vector<Vec> fields;
      for (const auto& s : tr.states) fields.push_back(extract_solution(s, sys, n));
      write_field_csv(path_in(c, "trajectory.csv"), tr.times, fields, pr.grid, config_comment(c));
      write_trajectory_csv(path_in(c, "variables.csv"), tr, pr.grid, variable_names(sys),
                           config_comment(c));
      if (c.quantum) write_emulation(c, sys, pr, "emulation_");
    }
    SequentialResult seq = solve_sequential(hc, pr, c.dt, c.tau,
                                            implicit ? TimeScheme::Implicit : TimeScheme::Explicit);
    DiagnosticsReport d = build_diagnostics(seq, pr, hc, NormKind::Max, 1.0, -1.0, c.target_eps);
    d.a_norm = inf_norm(a0.a);
    diag["homotopy"] = to_json(d);
  }
  diag["config"] = cli::to_json(c);
  write_json(path_in(c, "diagnostics.json"), diag);
  std::cout << "solve (" << c.mode << ", " << c.scheme << ") -> " << c.out_dir << "\n";
  if (diverged)
    fail(ErrorKind::Divergence, "Divergence", "state norm exceeded 1e6; outputs were written");
  return 0;
}

// ---------------------------------------------------------------- dns

int cmd_dns(const RunConfig& c) {
  Problem pr = make_problem(c);
  DnsConfig dc;
  dc.n_dns = c.n_dns;
  dc.t_final = c.t_final();
  dc.output_dt = c.dt;
  dc.length = c.length;
  DnsResult r = run_dns(dc, c.nu, pr.bc);
  write_dns_csv(path_in(c, "dns_fine.csv"), r, c.length, config_comment(c));
  std::vector<Vec> coarse;
  for (const auto& f : r.fields) coarse.push_back(restrict_to(f, pr.grid));
  write_field_csv(path_in(c, "dns_restricted.csv"), r.times, coarse, pr.grid, config_comment(c));
  save_dns_cache(cache_path(c), dns_key(c), r.fields.back(), dc.dx());
  std::cout << "dns: " << r.steps << " RK4 steps, dt = " << r.dt << " -> " << c.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepCell {
  int order = 0;
  double h_hat = 0.0;
  double mse = 0.0;
  double gamma_max = 0.0;
};

int cmd_sweep(const RunConfig& c) {
  Problem pr = make_problem(c);
  Vec ref = dns_reference(c, pr);
  const int max_order = *std::max_element(c.orders.begin(), c.orders.end());
  const size_t nh = c.h_hats.size();
  std::vector<std::vector<SweepCell>> by_h(nh);
  std::vector<std::string> errors(nh);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k; (k = next++) < nh;) {
      try {
        RunConfig local = c;
        local.h_hat = c.h_hats[k];
        HomotopyConfig hc = make_homotopy(local, max_order);
        SequentialResult res = solve_sequential(hc, pr, c.dt, c.tau);
        std::vector<double> gamma;
        if (max_order >= 1) gamma = gamma_ratios(res.terms, NormKind::Max, pr.grid.dx);
        for (int m : c.orders) {
          SweepCell cell{m, c.h_hats[k], mse(partial_sum(res.terms, m), ref), 0.0};
          for (int p = 0; p < m && p < static_cast<int>(gamma.size()); ++p)
            cell.gamma_max = std::max(cell.gamma_max, gamma[p]);
          by_h[k].push_back(cell);
        }
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
  };
  int jobs = c.jobs > 0 ? c.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<int>(jobs, static_cast<int>(nh));
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (size_t k = 0; k < nh; ++k)
    if (!errors[k].empty())
      fail(ErrorKind::Other, "SweepCellFailed", "h_hat = " + std::to_string(c.h_hats[k]) + ": " + errors[k]);

  CsvWriter csv(path_in(c, "sweep.csv"), {"M", "h_hat", "mse", "gamma_max"}, config_comment(c));
  json summary;
  summary["config"] = cli::to_json(c);
  json per_order = json::array();
  for (size_t mi = 0; mi < c.orders.size(); ++mi) {
    size_t best = 0;
    for (size_t k = 0; k < nh; ++k) {
      const SweepCell& cell = by_h[k][mi];
      csv.field(cell.order).field(cell.h_hat).field(cell.mse).field(cell.gamma_max).end_row();
      if (by_h[k][mi].mse < by_h[best][mi].mse) best = k;
    }
    per_order.push_back({{"M", c.orders[mi]}, {"argmin_h_hat", c.h_hats[best]},
                         {"min_mse", number(by_h[best][mi].mse)}});
  }
  summary["per_order"] = per_order;
  json columns = json::array();
  for (size_t k = 0; k < nh; ++k) {
    double log_mean = 0.0;
    for (const auto& cell : by_h[k]) log_mean += std::log10(cell.mse);
    columns.push_back({{"h_hat", c.h_hats[k]}, {"mean_log10_mse", number(log_mean / by_h[k].size())}});
  }
  summary["columns"] = columns;
  summary["note"] =
      "'smaller h_hat' is ambiguous; compare argmin_h_hat against both the most negative and the "
      "smallest-magnitude ends of the grid";
  write_json(path_in(c, "sweep_summary.json"), summary);
  std::cout << "sweep: " << c.orders.size() * nh << " cells -> " << c.out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------- diagnose

int cmd_diagnose(const RunConfig& c) {
  Problem pr = make_problem(c);
  HomotopyConfig hc = make_homotopy(c, c.order);
  SequentialResult res = solve_sequential(hc, pr, c.dt, c.tau);
  json d = to_json(build_diagnostics(res, pr, hc, NormKind::Max, 1.0, -1.0, c.target_eps));
  d["config"] = cli::to_json(c);
  std::cout << d.dump(2) << "\n";
  return 0;
}

void print_error(const std::string& code, const std::string& message, int exit) {
  json e = {{"error", code}, {"message", message}, {"exit_code", exit}};
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homotopy embedding and time-marching emulation for viscous Burgers"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
  auto bind = [&](CLI::App* sub, const std::string& name, auto RunConfig::*field, const std::string& help) {
    CLI::Option* opt = sub->add_option(name, flags.*field, help);
    overrides.emplace_back(opt, [field, &flags](RunConfig& c) { c.*field = flags.*field; });
    return opt;
  };

  std::map<std::string, CLI::App*> subs;
  subs["embed"] = app.add_subcommand("embed", "Derive and export the embedded linear system");
  subs["solve"] = app.add_subcommand("solve", "Integrate the series (sequential, embedded or tmcqc2)");
  subs["sweep"] = app.add_subcommand("sweep", "MSE against DNS over orders x h_hat");
  subs["dns"] = app.add_subcommand("dns", "Fine-grid reference simulation");
  subs["diagnose"] = app.add_subcommand("diagnose", "Print the diagnostics report");
  for (auto& [name, sub] : subs) {
    sub->add_option("--config", config_path, "TOML-style run configuration")->check(CLI::ExistingFile);
    bind(sub, "--nu", &RunConfig::nu, "Viscosity");
    bind(sub, "--h-hat", &RunConfig::h_hat, "Convergence-control parameter");
    bind(sub, "--order", &RunConfig::order, "Truncation order M");
    bind(sub, "--grid", &RunConfig::n_grid, "Grid points N_g");
    bind(sub, "--dt", &RunConfig::dt, "Time step");
    bind(sub, "--tau", &RunConfig::tau, "Number of time steps");
    bind(sub, "--mode", &RunConfig::mode, "sequential | embedded | tmcqc2");
    bind(sub, "--scheme", &RunConfig::scheme, "explicit-iterative | implicit-iterative | explicit-oneshot | implicit-oneshot");
    bind(sub, "--alpha-mode", &RunConfig::alpha_mode, "time-dependent | frozen");
    bind(sub, "--normalization", &RunConfig::normalization, "normalized | raw");
    bind(sub, "--epsilon", &RunConfig::epsilon, "LCU expansion parameter");
    bind(sub, "--epsilon2", &RunConfig::epsilon2, "Second epsilon for Richardson extrapolation");
    bind(sub, "--delta", &RunConfig::delta, "LCU scale (<= 0: automatic)");
    bind(sub, "--lcu-c", &RunConfig::lcu_c, "Number of unitaries (2 or 4)");
    bind(sub, "--shots", &RunConfig::shots, "Shots for sampled readout (0: exact)");
    bind(sub, "--seed", &RunConfig::seed, "RNG seed");
    bind(sub, "--out", &RunConfig::out_dir, "Output directory");
    bind(sub, "--jobs", &RunConfig::jobs, "Sweep worker threads (0: all cores)");
    bind(sub, "--n-dns", &RunConfig::n_dns, "DNS intervals");
    bind(sub, "--dns-cache", &RunConfig::dns_cache, "DNS cache file");
    bind(sub, "--orders", &RunConfig::orders, "Sweep orders")->delimiter(',');
    bind(sub, "--h-hats", &RunConfig::h_hats, "Sweep h_hat values")->delimiter(',');
    bind(sub, "--max-vars", &RunConfig::max_vars, "Closure variable limit");
    bind(sub, "--neumann-p", &RunConfig::neumann_p, "Neumann order");
    bind(sub, "--padding", &RunConfig::padding_c, "One-shot padding (-1: tau)");
    CLI::Option* q = sub->add_flag("--quantum", flags.quantum, "Also run the circuit emulation");
    overrides.emplace_back(q, [&flags](RunConfig& c) { c.quantum = flags.quantum; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("InvalidArguments", e.what(), 2);
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
    bool out_flag = false;
    for (auto& [opt, apply] : overrides)
      if (opt->count() > 0) {
        apply(cfg);
        out_flag = out_flag || opt->get_name() == "--out";
      }
    if (!out_flag)
      if (const char* env = std::getenv("QHAM_OUT_DIR"); env && *env) cfg.out_dir = env;
    cfg.validate();
    std::string which;
    for (auto& [name, sub] : subs)
      if (sub->parsed()) which = name;
    if (which != "diagnose") ensure_directory(cfg.out_dir);
    if (which == "embed") return cmd_embed(cfg);
    if (which == "solve") return cmd_solve(cfg);
    if (which == "sweep") return cmd_sweep(cfg);
    if (which == "dns") return cmd_dns(cfg);
    return cmd_diagnose(cfg);
  } catch (const Error& e) {
    int code = exit_code(e.kind());
    print_error(e.code(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    print_error("Internal", e.what(), 1);
    return 1;
  }
}
