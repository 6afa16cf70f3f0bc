#include "qham/grid_fd.hpp"

#include <cmath>
#include <vector>

#include "qham/errors.hpp"

namespace qham {

Grid1D Grid1D::make(int n_points, double length) {
  require(n_points >= 8, "InvalidGrid", "grid needs at least 8 points");
  require((n_points & (n_points - 1)) == 0, "InvalidGrid", "grid size must be a power of two");
  require(length > 0.0, "InvalidGrid", "domain length must be positive");
  Grid1D g;
  g.length = length;
  g.n_points = n_points;
  g.dx = length / n_points;
  return g;
}

Vec Grid1D::nodes() const {
  Vec x(n_points);
  for (int i = 0; i < n_points; ++i) x[i] = i * dx;
  return x;
}

int Grid1D::n_qubits() const {
  int q = 0;
  while ((1 << q) < n_points) ++q;
  return q;
}

BoundaryCondition BoundaryCondition::burgers(double length) {
  BoundaryCondition bc;
  bc.u_l = 1.0;
  bc.u_r = -1.0;
  bc.u_in = [length](double x) { return std::cos(M_PI * x / length); };
  return bc;
}

void BoundaryCondition::check(double length) const {
  require(static_cast<bool>(u_in), "InvalidBoundary", "initial profile missing");
  require(std::abs(u_in(0.0) - u_l) <= 1e-12 && std::abs(u_in(length) - u_r) <= 1e-12,
          "InvalidBoundary", "initial profile incompatible with Dirichlet data");
}

namespace {

FdOperator build(const Grid1D& grid, FdKind kind) {
  const int n = grid.n_points;
  double lo, mid, hi;
  if (kind == FdKind::FirstDerivative) {
    lo = -1.0 / (2.0 * grid.dx);
    mid = 0.0;
    hi = 1.0 / (2.0 * grid.dx);
  } else {
    lo = 1.0 / (grid.dx * grid.dx);
    mid = -2.0 / (grid.dx * grid.dx);
    hi = lo;
  }
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 1; i < n; ++i) {
    t.emplace_back(i, i - 1, lo);
    if (mid != 0.0) t.emplace_back(i, i, mid);
    if (i + 1 < n) t.emplace_back(i, i + 1, hi);
  }
  FdOperator op;
  op.kind = kind;
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.ghost_weight = hi;
  return op;
}

}  // namespace

FdOperator build_first_derivative(const Grid1D& grid) { return build(grid, FdKind::FirstDerivative); }
FdOperator build_second_derivative(const Grid1D& grid) { return build(grid, FdKind::SecondDerivative); }

Vec FdOperator::apply(const Vec& f, double right_value) const {
  Vec g = matrix * f;
  g[g.size() - 1] += ghost_weight * right_value;
  return g;
}

double inf_norm(const FdOperator& op) { return inf_norm(op.matrix); }

double inf_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const SpMat& m) {
  Vec rows = Vec::Zero(m.rows());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace qham
