#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qham/errors.hpp"
#include "qham/homotopy.hpp"

using namespace qham;
using std::numbers::pi;

namespace {

HomotopyConfig config(int order, double h = -0.5) {
  HomotopyConfig c;
  c.order = order;
  c.h_hat = h;
  return c;
}

}  // namespace

TEST_SUITE("homotopy") {
  TEST_CASE("first deformation rhs is h u0 u0_x") {
    Problem pr = Problem::make(32, 1e-3);
    Vec a0 = eval_alpha(0, pr.u0, pr.grid, 0.1), a1 = eval_alpha(1, pr.u0, pr.grid, 0.1);
    Vec r = deformation_rhs(1, {a0}, nullptr, a0, a1, pr, config(1));
    Vec expect = -0.5 * a0.cwiseProduct(a1);
    CHECK(r[0] == 0.0);
    CHECK((r - expect).tail(31).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("third order quadratic sum has unit weights") {
    Problem pr = Problem::make(32, 1e-3);
    Vec a0 = eval_alpha(0, pr.u0, pr.grid, 0.0), a1 = eval_alpha(1, pr.u0, pr.grid, 0.0);
    Vec w1 = Vec::Zero(32), w2 = Vec::Zero(32);
    for (int i = 0; i < 32; ++i) w1[i] = std::sin(pi * pr.grid.x(i)), w2[i] = pr.grid.x(i) * pr.grid.x(i);
    HomotopyConfig c = config(3, -1.0);  // 1 + h = 0 drops the carried rhs
    c.nu = 0.0;
    c.normalization = Normalization::Raw;
    Vec zero = Vec::Zero(32);
    Vec r = deformation_rhs(3, {a0, w1, w2}, &zero, a0, a1, pr, c);
    // raw: 3 h [d(u0 u2) + d(u1^2)] with the u0 factor through alpha
    Vec expect = -3.0 * (a0.cwiseProduct(pr.first.apply(w2)) + a1.cwiseProduct(w2) +
                         pr.first.apply(w1.cwiseProduct(w1)));
    CHECK((r - expect).tail(31).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("second order with vanishing known terms") {
    Problem pr = Problem::make(32, 1e-3);
    Vec a0 = eval_alpha(0, pr.u0, pr.grid, 0.0), a1 = eval_alpha(1, pr.u0, pr.grid, 0.0);
    HomotopyConfig c = config(2);
    c.normalization = Normalization::Raw;
    Vec zero = Vec::Zero(32);
    Vec rho1 = deformation_rhs(1, {a0}, nullptr, a0, a1, pr, c);
    Vec r = deformation_rhs(2, {zero, zero}, &rho1, a0, a1, pr, c);
    CHECK((r - 2.0 * 0.5 * rho1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS(deformation_rhs(2, {zero}, &rho1, a0, a1, pr, c));
  }

  TEST_CASE("order zero is the guess trajectory") {
    Problem pr = Problem::make(32, 1e-3);
    SequentialResult r = solve_sequential(config(0), pr, 5e-3, 20);
    auto sum = sum_series(r.terms);
    for (int j = 0; j <= 20; ++j)
      CHECK((sum[j] - eval_u0(pr.u0, pr.grid, j * 5e-3)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("first order grows linearly at small t") {
    Problem pr = Problem::make(32, 1e-3);
    const double dt = 5e-3;
    SequentialResult r = solve_sequential(config(1), pr, dt, 4);
    // oracle: rectangle-rule quadrature of h u0 u0_x over the same levels
    Vec acc = Vec::Zero(32);
    for (int j = 0; j < 4; ++j) {
      Vec a0 = eval_alpha(0, pr.u0, pr.grid, j * dt), a1 = eval_alpha(1, pr.u0, pr.grid, j * dt);
      acc += dt * (-0.5) * a0.cwiseProduct(a1);
      acc[0] = 0.0;
      CHECK((r.terms[1].trajectory[j + 1] - acc).cwiseAbs().maxCoeff() < 1e-14);
    }
    double n1 = r.terms[1].trajectory[1].cwiseAbs().maxCoeff();
    double n4 = r.terms[1].trajectory[4].cwiseAbs().maxCoeff();
    CHECK(n4 / n1 == doctest::Approx(4.0).epsilon(0.02));
  }

  TEST_CASE("series sums") {
    Problem pr = Problem::make(32, 1e-3);
    DeformationTerm t0{0, Normalization::Normalized, {Vec::Ones(32)}};
    DeformationTerm t1{1, Normalization::Normalized, {Vec::Zero(32)}};
    CHECK(partial_sum({t0}, 0).isApprox(Vec::Ones(32)));
    CHECK(partial_sum({t0, t1}, 1).isApprox(Vec::Ones(32)));
    DeformationTerm r2{2, Normalization::Raw, {Vec::Constant(32, 4.0)}};
    DeformationTerm r1{1, Normalization::Raw, {Vec::Constant(32, 1.0)}};
    DeformationTerm r0{0, Normalization::Raw, {Vec::Zero(32)}};
    CHECK(partial_sum({r0, r1, r2}, 2)[3] == doctest::Approx(3.0));  // 1/1! + 4/2!
  }

  TEST_CASE("ratios of a geometric sequence") {
    std::vector<DeformationTerm> terms;
    Vec f = Vec::LinSpaced(32, 1.0, 2.0);
    for (int p = 0; p <= 6; ++p) {
      terms.push_back({p, Normalization::Normalized, {f}});
      f *= 0.5;
    }
    auto r = gamma_ratios(terms, NormKind::Max, 1.0 / 32, RatioConvention::Series);
    REQUIRE(r.size() == 6);
    for (double x : r) CHECK(x == doctest::Approx(0.5));
  }

  TEST_CASE("truncation bound and minimum order") {
    CHECK(truncation_bound(0.5, 9, 1.0) == doctest::Approx(1.953125e-3));
    CHECK(truncation_bound(1e-9, 5, 1.0) < 1e-40);
    CHECK(truncation_bound(0.999, 1, 1.0) == doctest::Approx(0.998001 / 0.001));
    CHECK(min_order(1e-3, 0.4, 1.0) == 9);
    CHECK(min_order(2.5, 0.6, 1.0) == 0);
    CHECK(min_order(0.5e-3, 0.5, 1.0) == min_order(1e-3, 0.5, 1.0) + 1);
    CHECK_THROWS(min_order(1e-3, 1.2, 1.0));
  }

  TEST_CASE("gamma bounds") {
    GammaBounds b = gamma_bounds(-0.5, 32.0, 1.0, 0.5);
    CHECK(b.analytical == doctest::Approx(pi / 8));
    CHECK(b.numerical / b.analytical == doctest::Approx(32.0 / pi));
    GammaBounds z = gamma_bounds(-0.5, 32.0, 1.0, 0.0);
    CHECK(z.analytical == 0.0);
    CHECK(z.numerical == 0.0);
  }

  TEST_CASE("Re_H and t_NS") {
    // oracle: 100^{2.5} * (1/sqrt 2) / (2 pi^2), evaluated independently
    const double oracle = 1e5 * std::sqrt(0.5) / (2.0 * pi * pi);
    CHECK(oracle == doctest::Approx(3582.2448).epsilon(1e-8));
    CHECK(re_h(100, 1, 1 / std::sqrt(2.0)).value == doctest::Approx(3582.2448).epsilon(1e-8));
    CHECK(re_h(0, 1, 1 / std::sqrt(2.0)).value == 0.0);
    CHECK(re_h(100, 1, 1.0, 3).caveat);
    CHECK(t_nonlinear(100, 0.5) == doctest::Approx(0.04));
    CHECK(std::isinf(t_nonlinear(100, 0.0)));
    CHECK(t_nonlinear(200, 0.5) == doctest::Approx(0.02));
  }

  TEST_CASE("legacy ratio and finite difference estimate") {
    Grid1D g = Grid1D::make(32);
    CHECK(legacy_r(1.0, inf_norm(build_first_derivative(g)), inf_norm(build_second_derivative(g))) ==
          doctest::Approx(1.0 / 128));
    CHECK(fd_error_estimate(4, 100, 1.0 / 32, 5e-3) == doctest::Approx(0.390625));
    CHECK(fd_error_estimate(4, 0, 1.0 / 32, 5e-3) == 0.0);
    CHECK(fd_error_estimate(4, 100, 4.0 / 32, 2e-2) ==
          doctest::Approx(16 * fd_error_estimate(4, 100, 1.0 / 32, 5e-3)));
  }

  TEST_CASE("explicit step above the bound fails loudly once it blows up") {
    Problem pr = Problem::make(32, 1e-3);
    HomotopyConfig c = config(6, -1.0);
    double bound = sequential_dt_bound(pr, c);
    bool raised = false;
    try {
      solve_sequential(c, pr, 8 * bound, 400);
    } catch (const Error& e) {
      raised = e.kind() == ErrorKind::Stability;
    }
    CHECK(raised);
  }

  TEST_CASE("configuration checks") {
    HomotopyConfig c = config(4, 0.0);
    CHECK_THROWS(c.check());
    c = config(-1);
    CHECK_THROWS(c.check());
    Problem pr = Problem::make(32, 1e-3);
    CHECK_THROWS(solve_sequential(config(2), pr, 5e-3, 0));
  }

  TEST_CASE("diagnostics report") {
    Problem pr = Problem::make(32, 1e-3);
    HomotopyConfig c = config(6);
    SequentialResult r = solve_sequential(c, pr, 5e-3, 100);
    DiagnosticsReport d = build_diagnostics(r, pr, c);
    CHECK(d.gamma.size() == 6);
    CHECK(d.first_norm == doctest::Approx(32.0));
    CHECK(d.second_norm == doctest::Approx(4096.0));
    CHECK(d.legacy_r == doctest::Approx(1.0 / 128).epsilon(1e-3));
    CHECK(d.t == doctest::Approx(0.5));
    CHECK(d.bounds.analytical == doctest::Approx(pi / 8));
  }
}
