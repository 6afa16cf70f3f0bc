#include "qham/embedding.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include <unsupported/Eigen/SparseExtra>

#include "json.hpp"
#include "qham/errors.hpp"

namespace qham {

const char* to_string(SpatialOp op) {
  switch (op) {
    case SpatialOp::First: return "D2";
    case SpatialOp::Second: return "D1";
    default: return "I";
  }
}

int EmbeddedSystem::index_of(const Monomial& m) const {
  for (int i = 1; i < n_vars(); ++i)
    if (variables[i] == m) return i;
  return -1;
}

std::string EmbeddedSystem::name(int var) const {
  return var == 0 ? std::string("u0") : encode(variables[var]);
}

int EmbeddedSystem::max_u_order() const {
  int k = 0;
  for (const auto& row : rows)
    for (const auto& t : row)
      for (const auto& [powers, v] : t.coefficient.terms())
        for (int j = 0; j <= Coefficient::kMaxU; ++j)
          if (powers[Coefficient::U0 + j] > 0) k = std::max(k, j);
  return k;
}

namespace {

// c * d^op/dx^op (monomial)
struct OpTerm {
  Coefficient c;
  int op = 0;
  Monomial m;
};

Coefficient h() { return Coefficient::symbol(Coefficient::H); }
Coefficient g() { return Coefficient::symbol(Coefficient::G); }
Coefficient nu() { return Coefficient::symbol(Coefficient::Nu); }

class Closure {
 public:
  Closure(int order, int max_vars) : order_(order), max_vars_(max_vars) {}

  EmbeddedSystem run(const HomotopyConfig& config) {
    sys_.order = order_;
    sys_.h_hat = config.h_hat;
    sys_.nu = config.nu;
    sys_.alpha_mode = config.alpha_mode;
    sys_.variables.push_back({});
    for (int p = 1; p <= order_; ++p) add({{p, 0}});
    pending_.clear();

    sys_.rows.push_back({{nu(), SpatialOp::Second, 0}});
    // w_1 is driven by h u0 u0_x; written as (h U1) * v0 so the source sits in A.
    sys_.rows.push_back({{h() * Coefficient::u(1), SpatialOp::Identity, 0}});
    for (int p = 2; p <= order_; ++p) {
      std::vector<LinearTerm> row;
      for (const auto& t : rho(p)) linearize_op_term(t, row);
      sys_.rows.push_back(compact(row));
    }
    while (!pending_.empty()) {
      int var = pending_.front();
      pending_.pop_front();
      std::vector<LinearTerm> row;
      Poly rhs = aux_rhs(sys_.variables[var]);
      for (const auto& [m, c] : rhs) linearize_monomial(m, c, row);
      if (static_cast<int>(sys_.rows.size()) <= var) sys_.rows.resize(var + 1);
      sys_.rows[var] = compact(row);
    }
    return sys_;
  }

 private:
  int add(const Monomial& m) {
    int idx = sys_.index_of(m);
    if (idx >= 0) return idx;
    if (sys_.n_vars() >= max_vars_) {
      std::string names;
      for (int v : pending_) names += encode(sys_.variables[v]) + " ";
      fail(ErrorKind::Other, "ClosureLimitExceeded",
           "registering " + encode(m) + " would exceed " + std::to_string(max_vars_) +
               " variables; pending: " + names);
    }
    sys_.variables.push_back(m);
    pending_.push_back(sys_.n_vars() - 1);
    return sys_.n_vars() - 1;
  }

  // d w_p / dt with every nested d w_{p-1} / dt expanded.
  const std::vector<OpTerm>& rho(int p) {
    auto it = rho_.find(p);
    if (it != rho_.end()) return it->second;
    std::vector<OpTerm> out;
    if (p == 1) {
      out.push_back({h() * Coefficient::u(0) * Coefficient::u(1), 0, {}});
    } else {
      for (const auto& t : rho(p - 1)) out.push_back({g() * t.c, t.op, t.m});
      for (int k = 0; 2 * k <= p - 1; ++k) {
        int l = p - 1 - k;
        double w = (k == l) ? 0.5 : 1.0;
        if (k == 0) {
          out.push_back({h() * Coefficient::u(0) * w, 1, {{l, 0}}});
          out.push_back({h() * Coefficient::u(1) * w, 0, {{l, 0}}});
        } else {
          out.push_back({h() * w, 1, make_monomial({{k, 0}, {l, 0}})});
        }
      }
      out.push_back({h() * nu() * -1.0, 2, {{p - 1, 0}}});
    }
    return rho_[p] = out;
  }

  Poly rho_poly(int p) {
    Poly out;
    for (const auto& t : rho(p)) {
      Poly single;
      single[t.m] = Coefficient::constant(1.0);
      for (const auto& [m, c] : derivative(single, t.op)) add_to(out, m, c * t.c);
    }
    return out;
  }

  // Product rule over the factor instances of m.
  Poly aux_rhs(const Monomial& m) {
    Poly out;
    for (size_t i = 0; i < m.size(); ++i) {
      Monomial rest = m;
      rest.erase(rest.begin() + i);
      Poly d = multiply(derivative(rho_poly(m[i].p), m[i].d), rest);
      for (const auto& [mm, c] : d) add_to(out, mm, c);
    }
    return out;
  }

  void push(std::vector<LinearTerm>& row, const Coefficient& c, int op, int col) {
    if (op > 2)
      fail(ErrorKind::Other, "UnrewritableMonomial",
           "operator order " + std::to_string(op) + " on " + sys_.name(col));
    row.push_back({c, static_cast<SpatialOp>(op), col});
  }

  void linearize_op_term(const OpTerm& t, std::vector<LinearTerm>& row) {
    if (t.m.empty()) {
      push(row, t.c, 0, -1);
    } else if (t.m.size() == 1) {
      push(row, t.c, t.op + t.m[0].d, add({{t.m[0].p, 0}}));
    } else {
      if (max_derivative(t.m) > 2)
        fail(ErrorKind::Other, "UnrewritableMonomial", "factor order above 2 in " + encode(t.m));
      push(row, t.c, t.op, add(t.m));
    }
  }

  void linearize_monomial(const Monomial& m, const Coefficient& c, std::vector<LinearTerm>& row) {
    if (m.empty()) return push(row, c, 0, -1);
    if (m.size() == 1) {
      if (m[0].d > 2)
        fail(ErrorKind::Other, "UnrewritableMonomial", "cannot express " + encode(m));
      return push(row, c, m[0].d, add({{m[0].p, 0}}));
    }
    bool single_base = true;
    int n0 = 0, n1 = 0, n2 = 0;
    for (const auto& f : m) {
      single_base = single_base && f.p == m[0].p;
      n0 += f.d == 0;
      n1 += f.d == 1;
      n2 += f.d == 2;
    }
    const int p = m[0].p;
    const int deg = static_cast<int>(m.size());
    auto power = [&](int d, int n) { return Monomial(n, Factor{p, d}); };
    if (single_base) {
      if (n1 == 1 && n0 == deg - 1)  // f^n f' = (f^{n+1})' / (n+1)
        return push(row, c * (1.0 / deg), 1, add(power(0, deg)));
      if (n2 == 1 && n1 == deg - 1)  // f'^n f'' = (f'^{n+1})' / (n+1)
        return push(row, c * (1.0 / deg), 1, add(power(1, deg)));
      if (n2 == 1 && n0 == deg - 1) {
        // f^n f'' = (f^{n+1})'' / (n+1) - n f^{n-1} f'^2
        push(row, c * (1.0 / deg), 2, add(power(0, deg)));
        Monomial rest = multiply(power(0, deg - 2), power(1, 2));
        return linearize_monomial(rest, c * -double(deg - 1), row);
      }
    }
    if (max_derivative(m) > 2) return integrate_by_parts(m, c, row);
    push(row, c, 0, add(m));
  }

  // m = (D(P) - rest) / k with P the monomial whose top factor is lowered once.
  void integrate_by_parts(const Monomial& m, const Coefficient& c, std::vector<LinearTerm>& row) {
    if (++depth_ > 8)
      fail(ErrorKind::Other, "UnrewritableMonomial", "factor order above 2 in " + encode(m));
    auto top = std::max_element(m.begin(), m.end(),
                                [](const Factor& a, const Factor& b) { return a.d < b.d; });
    Factor lowered{top->p, top->d - 1};
    Monomial pm = m;
    pm[top - m.begin()] = lowered;
    pm = make_monomial(pm);
    const double k = double(std::count(pm.begin(), pm.end(), lowered));
    std::vector<LinearTerm> inner;
    linearize_monomial(pm, Coefficient::constant(1.0), inner);
    bool liftable = std::all_of(inner.begin(), inner.end(),
                                [](const LinearTerm& t) { return t.op != SpatialOp::Second; });
    if (!liftable && max_derivative(pm) <= 2) inner = {{Coefficient::constant(1.0), SpatialOp::Identity, add(pm)}};
    for (const auto& t : inner) push(row, c * t.coefficient * (1.0 / k), static_cast<int>(t.op) + 1, t.col);
    Poly single;
    single[pm] = Coefficient::constant(1.0);
    for (const auto& [mm, cc] : derivative(single))
      if (mm != m) linearize_monomial(mm, c * cc * (-1.0 / k), row);
    --depth_;
  }

  static std::vector<LinearTerm> compact(const std::vector<LinearTerm>& row) {
    std::map<std::pair<int, int>, Coefficient> acc;
    std::vector<std::pair<int, int>> order;
    for (const auto& t : row) {
      auto key = std::make_pair(t.col, static_cast<int>(t.op));
      if (!acc.count(key)) order.push_back(key);
      acc[key] += t.coefficient;
    }
    std::vector<LinearTerm> out;
    for (const auto& key : order) {
      if (acc[key].is_zero()) continue;
      out.push_back({acc[key], static_cast<SpatialOp>(key.second), key.first});
    }
    return out;
  }

  int order_;
  int max_vars_;
  int depth_ = 0;
  EmbeddedSystem sys_;
  std::deque<int> pending_;
  std::map<int, std::vector<OpTerm>> rho_;
};

}  // namespace

EmbeddedSystem derive_embedding(int order, const HomotopyConfig& config, int max_vars) {
  config.check();
  require(order >= 1, "InvalidHomotopy", "embedding needs order >= 1");
  require(max_vars >= order + 1, "InvalidHomotopy", "max_vars must be >= order + 1");
  return Closure(order, max_vars).run(config);
}

AssembledSystem assemble(const EmbeddedSystem& system, const Problem& problem, double t) {
  const int n = problem.grid.n_points;
  const int nv = system.n_vars();
  AssembledSystem out;
  out.alpha_time = problem.alpha_time(t, system.alpha_mode);
  std::vector<Vec> u;
  for (int k = 0; k <= system.max_u_order(); ++k)
    u.push_back(eval_u0_derivative(k, problem.u0, problem.grid, out.alpha_time));
  out.b = Vec::Zero(nv * n);
  std::vector<Eigen::Triplet<double>> trip;
  const FdOperator* ops[3] = {nullptr, &problem.first, &problem.second};
  for (int r = 0; r < nv; ++r) {
    for (const auto& term : system.rows[r]) {
      Vec c = term.coefficient.eval(system.h_hat, system.nu, u, n);
      const int op = static_cast<int>(term.op);
      if (term.col < 0) {
        for (int i = 1; i < n; ++i) out.b[r * n + i] += c[i];
        continue;
      }
      if (op == 0) {
        for (int i = 1; i < n; ++i) trip.emplace_back(r * n + i, term.col * n + i, c[i]);
        continue;
      }
      const SpMat& m = ops[op]->matrix;
      for (int k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it)
          if (it.row() > 0)
            trip.emplace_back(r * n + it.row(), term.col * n + it.col(), c[it.row()] * it.value());
      // Only v0 carries nonzero boundary data.
      if (term.col == 0) out.b[r * n + n - 1] += c[n - 1] * ops[op]->ghost_weight * problem.bc.u_r;
    }
  }
  out.a.resize(nv * n, nv * n);
  out.a.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Vec initial_state(const EmbeddedSystem& system, const Problem& problem) {
  const int n = problem.grid.n_points;
  Vec v = Vec::Zero(system.n_vars() * n);
  v.head(n) = eval_u0(problem.u0, problem.grid, 0.0);
  return v;
}

Vec slice(const Vec& state, int var, int n_grid) { return state.segment(var * n_grid, n_grid); }

Vec extract_solution(const Vec& state, const EmbeddedSystem& system, int n_grid) {
  require(state.size() == static_cast<Eigen::Index>(system.n_vars()) * n_grid, "DimensionMismatch",
          "state length " + std::to_string(state.size()) + " does not match " +
              std::to_string(system.n_vars()) + " x " + std::to_string(n_grid),
          ErrorKind::Other);
  Vec u = slice(state, 0, n_grid);
  for (int p = 1; p <= system.order; ++p) u += slice(state, p, n_grid);
  return u;
}

std::vector<std::pair<int, int>> block_pattern(const EmbeddedSystem& system) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < system.n_vars(); ++r) {
    std::set<int> cols;
    for (const auto& t : system.rows[r])
      if (t.col >= 0) cols.insert(t.col);
    for (int c : cols) out.emplace_back(r, c);
  }
  return out;
}

std::string to_json_string(const EmbeddedSystem& system, int indent) {
  nlohmann::json j;
  j["M"] = system.order;
  j["h_hat"] = system.h_hat;
  j["nu"] = system.nu;
  j["alpha_mode"] = to_string(system.alpha_mode);
  j["variables"] = nlohmann::json::array();
  for (int v = 0; v < system.n_vars(); ++v) j["variables"].push_back(system.name(v));
  j["blocks"] = nlohmann::json::array();
  for (int r = 0; r < system.n_vars(); ++r)
    for (const auto& t : system.rows[r])
      j["blocks"].push_back({{"row", r},
                             {"col", t.col},
                             {"operator", to_string(t.op)},
                             {"coefficient", t.coefficient.str()}});
  return j.dump(indent);
}

void write_matrix_market(const SpMat& a, const std::string& path) {
  require(Eigen::saveMarket(a, path), "IoError", "cannot write " + path, ErrorKind::Other);
}

}  // namespace qham
