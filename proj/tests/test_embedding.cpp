#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "qham/embedding.hpp"
#include "qham/errors.hpp"
#include "qham/time_marching.hpp"

using namespace qham;

namespace {

HomotopyConfig config(int order, double h = -0.5) {
  HomotopyConfig c;
  c.order = order;
  c.h_hat = h;
  return c;
}

std::vector<std::string> names(const EmbeddedSystem& s) {
  std::vector<std::string> out;
  for (int v = 0; v < s.n_vars(); ++v) out.push_back(s.name(v));
  return out;
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("monomials") {
    Monomial m = make_monomial({{2, 0}, {1, 1}, {1, 1}});
    CHECK(encode(m) == "w1_x^2*w2");
    CHECK(max_derivative(m) == 1);
    CHECK(encode(multiply(make_monomial({{1, 0}}), make_monomial({{2, 0}}))) == "w1*w2");
    CHECK(encode(make_monomial({{1, 2}})) == "w1_xx");
  }

  TEST_CASE("coefficient algebra") {
    Coefficient c = Coefficient::symbol(Coefficient::H) * Coefficient::u(0) * Coefficient::u(1);
    Coefficient d = c.dx();  // h (U1^2 + U0 U2)
    Vec u0 = Vec::Constant(4, 2.0), u1 = Vec::Constant(4, 3.0), u2 = Vec::Constant(4, 5.0);
    Vec v = d.eval(-0.5, 1e-3, {u0, u1, u2}, 4);
    CHECK(v[2] == doctest::Approx(-0.5 * (9.0 + 10.0)));
    CHECK((c - c).is_zero());
  }

  TEST_CASE("product rule on field polynomials") {
    Poly p;
    add_to(p, make_monomial({{1, 0}, {1, 0}}), Coefficient::constant(1.0));
    Poly d = derivative(p);
    REQUIRE(d.size() == 1);
    CHECK(encode(d.begin()->first) == "w1*w1_x");
    CHECK(d.begin()->second.str() == "2");
  }

  TEST_CASE("closure sizes for low orders") {
    EmbeddedSystem s1 = derive_embedding(1, config(1));
    CHECK(names(s1) == std::vector<std::string>{"u0", "w1"});
    REQUIRE(s1.rows[1].size() == 1);
    CHECK(s1.rows[1][0].col == 0);
    CHECK(s1.rows[1][0].coefficient.str() == "h*U1");
    CHECK(derive_embedding(2, config(2)).n_vars() == 3);
    CHECK(derive_embedding(3, config(3)).n_vars() == 5);
  }

  TEST_CASE("fourth order closure") {
    EmbeddedSystem s = derive_embedding(4, config(4));
    CHECK(names(s) == std::vector<std::string>{"u0", "w1", "w2", "w3", "w4", "w1^2", "w1*w2", "w1_x^2"});
    std::vector<std::pair<int, int>> expect = {{0, 0}, {1, 0}, {2, 1}, {3, 1}, {3, 2}, {3, 5},
                                               {4, 1}, {4, 2}, {4, 3}, {4, 5}, {4, 6}, {5, 1},
                                               {6, 1}, {6, 2}, {6, 5}, {6, 7}, {7, 1}};
    CHECK(block_pattern(s) == expect);
    REQUIRE(s.rows[7].size() == 1);
    CHECK(s.rows[7][0].op == SpatialOp::First);
  }

  TEST_CASE("higher orders leave the rewrite grammar") {
    CHECK(derive_embedding(5, config(5)).n_vars() == 18);
    try {
      derive_embedding(6, config(6));
      FAIL("expected UnrewritableMonomial");
    } catch (const Error& e) {
      CHECK(e.code() == "UnrewritableMonomial");
    }
    try {
      derive_embedding(7, config(7));
      FAIL("expected ClosureLimitExceeded");
    } catch (const Error& e) {
      CHECK(e.code() == "ClosureLimitExceeded");
    }
  }

  TEST_CASE("every coupling carries h") {
    Problem pr = Problem::make(32, 1e-3);
    EmbeddedSystem s = derive_embedding(4, config(4, -1e-12));
    AssembledSystem a = assemble(s, pr, 0.0);
    Mat dense(a.a);
    const int n = 32;
    dense.topLeftCorner(n, n).setZero();
    CHECK(dense.cwiseAbs().maxCoeff() < 1e-6);
    CHECK(a.b.tail(a.b.size() - n).cwiseAbs().maxCoeff() < 1e-6);
  }

  TEST_CASE("operator norm scales like |D1| |u0|^M (|h| + nu)") {
    Problem pr = Problem::make(32, 1e-3);
    for (int m : {1, 2, 3, 4}) {
      EmbeddedSystem s = derive_embedding(m, config(m));
      double ratio = inf_norm(assemble(s, pr, 0.0).a) / (inf_norm(pr.second) * (0.5 + 1e-3));
      CHECK(ratio > 1e-3);
      CHECK(ratio < 10.0);
    }
  }

  TEST_CASE("state helpers") {
    Problem pr = Problem::make(8, 1e-3);
    EmbeddedSystem s = derive_embedding(2, config(2));
    Vec v = Vec::Zero(24);
    v.head(8) = Vec::LinSpaced(8, 0.0, 7.0);
    CHECK(extract_solution(v, s, 8).isApprox(v.head(8)));
    v.segment(8, 8).setOnes();
    CHECK(extract_solution(v, s, 8)[3] == doctest::Approx(4.0));
    CHECK(extract_solution(Vec::Zero(24), s, 8).isZero());
    CHECK(slice(v, 1, 8).isApprox(Vec::Ones(8)));
    CHECK_THROWS(extract_solution(Vec::Zero(23), s, 8));
    Vec v0 = initial_state(s, pr);
    CHECK(v0.head(8).isApprox(eval_u0(pr.u0, pr.grid, 0.0)));
  }

  TEST_CASE("json export") {
    EmbeddedSystem s = derive_embedding(4, config(4));
    auto j = nlohmann::json::parse(to_json_string(s));
    CHECK(j["M"] == 4);
    CHECK(j["variables"].size() == 8);
    CHECK(j["blocks"].size() > 0);
  }

  TEST_CASE("short horizon agreement with the sequential solver") {
    Problem pr = Problem::make(32, 1e-3);
    HomotopyConfig c = config(4);
    EmbeddedSystem s = derive_embedding(4, c);
    SequentialResult seq = solve_sequential(c, pr, 5e-3, 10);
    Trajectory tr = integrate_embedded(s, pr, 5e-3, 10);
    for (int p = 1; p <= 3; ++p)
      CHECK((slice(tr.states[10], p, 32) - seq.terms[p].trajectory[10]).cwiseAbs().maxCoeff() < 5e-3);
    Vec w1 = slice(tr.states[10], 1, 32);
    CHECK((slice(tr.states[10], 5, 32) - w1.cwiseProduct(w1)).cwiseAbs().maxCoeff() < 5e-3);
  }
}
