#ifndef QHAM_LCU_HPP_
#define QHAM_LCU_HPP_

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qham/time_marching.hpp"

namespace qham {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct SymmetricSplit {
  Mat s;  // (J + J^T) / 2
  Mat a;  // (J - J^T) / 2
};
SymmetricSplit split_symmetric(const Mat& j);

// [[0, J], [J^T, 0]]
Mat dilate(const Mat& j);
// [0; x], the input convention that makes dilate(J) [0; x] = [J x; 0].
Vec pad_input(const Vec& x);

// Zero-pads J to the next power of two.
Mat pad_pow2(const Mat& j);
int next_pow2(int n);

// exp(-i t H) for hermitian H.
CMat expi_hermitian(const CMat& h, double t);

struct LcuDecomposition {
  int c = 2;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<CMat> unitaries;
  std::vector<double> weights;  // 1 / (2 eps) each
  double beta = 0.0;
  Mat target;   // delta J
  Mat dilated;  // delta dilate(J), C = 2 only

  int dim() const { return static_cast<int>(unitaries.front().rows()); }
  // (1/2eps) sum_c U_c: sin(eps dJ)/eps for C = 2, sin(eps S)/eps + sinh(eps A)/eps for C = 4.
  CMat reconstruction() const;
  // The operator the reconstruction approximates (dilated target for C = 2).
  Mat reference() const { return c == 2 ? dilated : target; }
};

// C = 2: U0 = i exp(-i eps dJ^), U1 = -i exp(i eps dJ^) on the dilation of delta J.
// C = 4: i exp(-i eps S), -i exp(i eps S), exp(eps A), -exp(-eps A) for delta J.
LcuDecomposition build_unitaries(const Mat& j, double epsilon, double delta, int c = 2);

struct DeltaChoice {
  double delta = 0.0;
  double q = 0.0;    // eps delta |J|_inf
  double eta = 0.0;  // 1 / q
};
// Largest delta on a 1e-3 grid of 1/|J|_inf with delta |J|_inf < 1.
DeltaChoice choose_delta(const Mat& j, double epsilon);

// counter (x) ancilla (x) data, most significant first.
struct RegisterLayout {
  static constexpr int kMaxQubits = 26;
  int n_t = 0;
  int n_a = 1;
  int n_d = 1;

  static RegisterLayout make(int tau, int c, int data_dim);
  int total() const { return n_t + n_a + n_d; }
  long long size() const { return 1LL << total(); }
  long long index(long long counter, long long ancilla, long long data) const {
    return ((counter << n_a) + ancilla) << n_d | data;
  }
  std::string describe() const;
};

// V, select-W, V^dagger on the ancilla register, acting only where the
// counter equals control (control < 0: everywhere). Returns the probability
// of the ancilla-zero subspace afterwards.
double apply_lcu_once(CVec& state, const LcuDecomposition& decomp, const RegisterLayout& layout,
                      long long control = -1);

struct ShotResult {
  std::map<long long, long long> counts;
  long long n_shots = 0;
  std::uint64_t seed = 0;
  long long accepted = 0;
  double p_succ = 0.0;
  std::vector<double> magnitudes;  // sqrt(count / accepted) per data index
};
ShotResult sample_shots(const CVec& state, const RegisterLayout& layout, long long n_shots,
                        std::uint64_t seed, long long success_counter = 0);
void write_shots_csv(const std::string& path, const ShotResult& shots, const RegisterLayout& layout,
                     const std::string& comment = "");

double gate_estimate(double s, double epsilon, double n, double eps_u);

struct ComplexityReport {
  double sparsity = 0.0;
  double epsilon = 0.0;
  double eps_u = 0.0;
  double n_dim = 0.0;
  double gate_estimate = 0.0;
  double delta = 0.0;
  double q = 0.0;
  double eta = 0.0;
  double a_norm = 0.0;
  std::vector<double> p_succ_steps;
  double p_succ_cumulative = 0.0;
  double p_succ_estimate = 0.0;  // (eps delta)^{2 tau} |Psi_tau|^2 / |Psi_0|^2
  double n_s_estimate = 0.0;     // (1/(eps delta |A|))^{2 tau} |Psi_0|^2 / |Psi_tau|^2
  double amplitude_ratio = 0.0;  // |Psi_0| / |Psi_tau|
};

enum class Readout { Exact, Shots };

struct EmulationOptions {
  double epsilon = 1e-3;
  double delta = -1.0;  // <= 0: choose_delta per step
  int c = 2;
  Readout readout = Readout::Exact;
  long long shots = 100000;
  std::uint64_t seed = 1;
};

struct StepRecord {
  int step = 0;
  double p_succ_exact = 0.0;  // cumulative success probability after this step
  double p_succ_step = 0.0;
  double state_norm = 0.0;
  long long countdown_value = 0;
};

struct EmulationResult {
  Trajectory trajectory;  // rescaled post-selected states
  std::vector<StepRecord> transcript;
  RegisterLayout layout;
  ComplexityReport complexity;
  std::optional<ShotResult> shots;
  CVec final_state;
  double max_norm_drift = 0.0;
  std::vector<double> deltas;
};

// Iterative explicit circuit for v_{j+1} = ops[j] v_j. The source is carried by
// an extra constant coordinate, so ops are the augmented step matrices.
EmulationResult emulate_iterative(const std::vector<Mat>& ops, const Vec& v0,
                                  const EmulationOptions& options);
// A_E = I + dt A(t_j) and b via [[A_E, dt b], [0, 1]].
EmulationResult run_tmcqc2(const EmbeddedSystem& system, const Problem& problem, double dt, int tau,
                           const EmulationOptions& options);
Mat augmented_step(const SpMat& a, const Vec& b, double dt);

struct OneShotEmulation {
  Vec history;
  int p = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::vector<double> p_succ_terms;
  RegisterLayout layout;
};
// sum_{p<P} (I - A_OS)^p b_OS, every power of J = I - A_OS applied through
// one LCU round with the 1/(eps delta)^p weight applied classically.
OneShotEmulation run_oneshot_emulated(const OneShotSystem& sys, int p, double epsilon,
                                      double delta = -1.0, int c = 2);

// (R1 - g^2 R2) / (1 - g^2), g = eps1 / eps2.
double richardson(double r1, double r2, double eps1, double eps2);
Vec richardson(const Vec& r1, const Vec& r2, double eps1, double eps2);

}  // namespace qham

#endif  // QHAM_LCU_HPP_
