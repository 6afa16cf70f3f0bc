#ifndef QHAM_EMBEDDING_HPP_
#define QHAM_EMBEDDING_HPP_

#include <string>
#include <vector>

#include "qham/homotopy.hpp"
#include "qham/symbolic.hpp"

namespace qham {

enum class SpatialOp { Identity = 0, First = 1, Second = 2 };
const char* to_string(SpatialOp op);

// coefficient * op(v_col); col = -1 marks an affine source (op is Identity).
struct LinearTerm {
  Coefficient coefficient;
  SpatialOp op = SpatialOp::Identity;
  int col = -1;
};

struct EmbeddedSystem {
  int order = 0;
  double h_hat = 0.0;
  double nu = 0.0;
  AlphaMode alpha_mode = AlphaMode::TimeDependent;
  // variables[0] is the guess u0 (stored as the empty monomial), variables[p]
  // = w_p for p = 1..M, then product variables in closure order.
  std::vector<Monomial> variables;
  std::vector<std::vector<LinearTerm>> rows;

  int n_vars() const { return static_cast<int>(variables.size()); }
  int index_of(const Monomial& m) const;
  std::string name(int var) const;
  // Highest derivative of u0 that appears in any coefficient.
  int max_u_order() const;
};

EmbeddedSystem derive_embedding(int order, const HomotopyConfig& config, int max_vars = 64);

struct AssembledSystem {
  SpMat a;
  Vec b;
  double alpha_time = 0.0;
};

AssembledSystem assemble(const EmbeddedSystem& system, const Problem& problem, double t);

// v0 = u0(., 0), every other slice zero.
Vec initial_state(const EmbeddedSystem& system, const Problem& problem);
// v0 + sum of the w_p slices; product variables are not summed.
Vec extract_solution(const Vec& state, const EmbeddedSystem& system, int n_grid);
Vec slice(const Vec& state, int var, int n_grid);

// Nonzero (row, col) variable blocks, row-major; col = -1 is not listed.
std::vector<std::pair<int, int>> block_pattern(const EmbeddedSystem& system);

std::string to_json_string(const EmbeddedSystem& system, int indent = 2);
void write_matrix_market(const SpMat& a, const std::string& path);

}  // namespace qham

#endif  // QHAM_EMBEDDING_HPP_
