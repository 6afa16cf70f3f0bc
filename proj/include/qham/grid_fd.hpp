#ifndef QHAM_GRID_FD_HPP_
#define QHAM_GRID_FD_HPP_

#include <functional>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qham {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;

// Uniform grid x_i = i*dx, i = 0..n-1, dx = L/n. Node 0 sits on the left
// wall; the right wall x = L is one spacing past the last node.
struct Grid1D {
  double length = 1.0;
  int n_points = 32;
  double dx = 1.0 / 32;

  static Grid1D make(int n_points, double length = 1.0);
  double x(int i) const { return i * dx; }
  Vec nodes() const;
  int n_qubits() const;
};

struct BoundaryCondition {
  double u_l = 1.0;
  double u_r = -1.0;
  std::function<double(double)> u_in;

  // cos(pi x / L) with u(0) = 1, u(L) = -1.
  static BoundaryCondition burgers(double length = 1.0);
  void check(double length) const;
};

enum class FdKind { FirstDerivative, SecondDerivative };

// Central differences. Row 0 (the wall node) is frozen at zero. Row n-1
// reaches across the right wall through a ghost value; for fields with
// homogeneous data the ghost is zero, otherwise ghost_weight * u_r has to be
// added by the caller (apply() does it).
struct FdOperator {
  FdKind kind = FdKind::FirstDerivative;
  SpMat matrix;
  double ghost_weight = 0.0;
  std::string boundary_tag = "frozen-wall-row";

  Vec apply(const Vec& f, double right_value = 0.0) const;
  Mat dense() const { return Mat(matrix); }
};

FdOperator build_first_derivative(const Grid1D& grid);
FdOperator build_second_derivative(const Grid1D& grid);

double inf_norm(const FdOperator& op);
double inf_norm(const Mat& m);
double inf_norm(const SpMat& m);

}  // namespace qham

#endif  // QHAM_GRID_FD_HPP_
