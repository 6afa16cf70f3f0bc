#include "qham/lcu.hpp"

#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "qham/errors.hpp"
#include "qham/io.hpp"

namespace qham {

namespace {

const std::complex<double> kI(0.0, 1.0);

int log2_exact(long long n) { return std::countr_zero(static_cast<unsigned long long>(n)); }

}  // namespace

SymmetricSplit split_symmetric(const Mat& j) {
  require(j.rows() == j.cols(), "DimensionMismatch", "J must be square", ErrorKind::Other);
  return {(j + j.transpose()) / 2.0, (j - j.transpose()) / 2.0};
}

Mat dilate(const Mat& j) {
  const Eigen::Index r = j.rows(), c = j.cols();
  Mat d = Mat::Zero(r + c, r + c);
  d.topRightCorner(r, c) = j;
  d.bottomLeftCorner(c, r) = j.transpose();
  return d;
}

Vec pad_input(const Vec& x) {
  Vec v = Vec::Zero(2 * x.size());
  v.tail(x.size()) = x;
  return v;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

Mat pad_pow2(const Mat& j) {
  const int n = next_pow2(static_cast<int>(j.rows()));
  Mat out = Mat::Zero(n, n);
  out.topLeftCorner(j.rows(), j.cols()) = j;
  return out;
}

CMat expi_hermitian(const CMat& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  require(es.info() == Eigen::Success, "EigenFailure", "hermitian eigensolve failed",
          ErrorKind::Numerical);
  CVec phase = (-kI * t * es.eigenvalues().cast<std::complex<double>>()).array().exp();
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

// exp(-i t H) and exp(i t H) from one eigensolve.
template <class M>
std::pair<CMat, CMat> expi_pair(const M& h, double t) {
  Eigen::SelfAdjointEigenSolver<M> es(h);
  require(es.info() == Eigen::Success, "EigenFailure", "hermitian eigensolve failed",
          ErrorKind::Numerical);
  CMat v = es.eigenvectors().template cast<std::complex<double>>();
  CVec phase = (-kI * t * es.eigenvalues().template cast<std::complex<double>>()).array().exp();
  CMat vh = v.adjoint();
  return {v * phase.asDiagonal() * vh, v * phase.conjugate().asDiagonal() * vh};
}

}  // namespace

CMat LcuDecomposition::reconstruction() const {
  CMat sum = CMat::Zero(dim(), dim());
  for (size_t k = 0; k < unitaries.size(); ++k) sum += weights[k] * unitaries[k];
  return sum;
}

LcuDecomposition build_unitaries(const Mat& j, double epsilon, double delta, int c) {
  require(epsilon > 0.0, "InvalidLcu", "epsilon must be positive");
  require(delta > 0.0, "InvalidLcu", "delta must be positive");
  require(c == 2 || c == 4, "InvalidLcu", "C must be 2 or 4");
  require(j.rows() == j.cols(), "DimensionMismatch", "J must be square", ErrorKind::Other);
  LcuDecomposition d;
  d.c = c;
  d.epsilon = epsilon;
  d.delta = delta;
  d.target = delta * j;
  if (c == 2) {
    d.dilated = dilate(d.target);
    auto [minus, plus] = expi_pair(d.dilated, epsilon);
    d.unitaries.push_back(kI * minus);
    d.unitaries.push_back(-kI * plus);
  } else {
    SymmetricSplit sp = split_symmetric(d.target);
    // exp(eps A) = exp(-i eps (i A)) with i A hermitian.
    CMat ia = kI * sp.a.cast<std::complex<double>>();
    auto [s_minus, s_plus] = expi_pair(sp.s, epsilon);
    auto [a_minus, a_plus] = expi_pair(ia, epsilon);
    d.unitaries.push_back(kI * s_minus);
    d.unitaries.push_back(-kI * s_plus);
    d.unitaries.push_back(a_minus);
    d.unitaries.push_back(-a_plus);
  }
  d.weights.assign(d.unitaries.size(), 1.0 / (2.0 * epsilon));
  d.beta = d.weights.size() / (2.0 * epsilon);
  return d;
}

DeltaChoice choose_delta(const Mat& j, double epsilon) {
  const double norm = inf_norm(j);
  require(norm > 0.0, "InvalidLcu", "|J|_inf must be positive");
  require(epsilon > 0.0, "InvalidLcu", "epsilon must be positive");
  DeltaChoice best;
  for (int k = 1; k < 1000; ++k) {
    double delta = k / (1000.0 * norm);
    if (delta * norm >= 1.0) break;
    double q = epsilon * delta * norm;
    if (q > best.q) best = {delta, q, 1.0 / q};
  }
  return best;
}

RegisterLayout RegisterLayout::make(int tau, int c, int data_dim) {
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  require(data_dim >= 1 && std::has_single_bit(static_cast<unsigned>(data_dim)), "LayoutMismatch",
          "data dimension must be a power of two", ErrorKind::Other);
  RegisterLayout l;
  l.n_t = tau > 1 ? static_cast<int>(std::ceil(std::log2(tau))) : 0;
  l.n_a = c == 4 ? 2 : 1;
  l.n_d = log2_exact(data_dim);
  if (l.total() > kMaxQubits)
    fail(ErrorKind::RegisterCap, "RegisterCap",
         "layout needs " + std::to_string(l.total()) + " qubits (" + l.describe() + "), cap is " +
             std::to_string(kMaxQubits));
  return l;
}

std::string RegisterLayout::describe() const {
  return "n_t=" + std::to_string(n_t) + " n_a=" + std::to_string(n_a) +
         " n_d=" + std::to_string(n_d);
}

double apply_lcu_once(CVec& state, const LcuDecomposition& decomp, const RegisterLayout& layout,
                      long long control) {
  require(state.size() == layout.size(), "LayoutMismatch", "state size does not match layout",
          ErrorKind::Other);
  require(decomp.dim() == (1 << layout.n_d), "LayoutMismatch",
          "unitary dimension does not match the data register", ErrorKind::Other);
  require(static_cast<int>(decomp.unitaries.size()) == (1 << layout.n_a), "LayoutMismatch",
          "ancilla register does not match C", ErrorKind::Other);
  const long long nc = 1LL << layout.n_t;
  const int na = 1 << layout.n_a;
  const long long nd = 1LL << layout.n_d;
  const double norm = 1.0 / std::sqrt(double(na));
  std::vector<CVec> branch(na), mixed(na);
  for (long long cnt = 0; cnt < nc; ++cnt) {
    if (control >= 0 && cnt != control) continue;
    for (int a = 0; a < na; ++a) branch[a] = state.segment(layout.index(cnt, a, 0), nd);
    // V: Hadamards, then select-W.
    for (int a = 0; a < na; ++a) {
      mixed[a] = CVec::Zero(nd);
      for (int b = 0; b < na; ++b)
        mixed[a] += (std::popcount(unsigned(a & b)) % 2 ? -norm : norm) * branch[b];
      mixed[a] = decomp.unitaries[a] * mixed[a];
    }
    // V^dagger
    for (int a = 0; a < na; ++a) {
      CVec out = CVec::Zero(nd);
      for (int b = 0; b < na; ++b)
        out += (std::popcount(unsigned(a & b)) % 2 ? -norm : norm) * mixed[b];
      state.segment(layout.index(cnt, a, 0), nd) = out;
    }
  }
  double p = 0.0;
  for (long long cnt = 0; cnt < nc; ++cnt) p += state.segment(layout.index(cnt, 0, 0), nd).squaredNorm();
  return p;
}

ShotResult sample_shots(const CVec& state, const RegisterLayout& layout, long long n_shots,
                        std::uint64_t seed, long long success_counter) {
  require(n_shots >= 1, "InvalidShots", "n_shots must be >= 1");
  require(state.size() == layout.size(), "LayoutMismatch", "state size does not match layout",
          ErrorKind::Other);
  std::vector<double> prob(state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) prob[i] = std::norm(state[i]);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<long long> dist(prob.begin(), prob.end());
  ShotResult r;
  r.n_shots = n_shots;
  r.seed = seed;
  for (long long s = 0; s < n_shots; ++s) ++r.counts[dist(rng)];
  const long long nd = 1LL << layout.n_d;
  r.magnitudes.assign(nd, 0.0);
  const long long lo = layout.index(success_counter, 0, 0);
  for (const auto& [outcome, count] : r.counts)
    if (outcome >= lo && outcome < lo + nd) {
      r.accepted += count;
      r.magnitudes[outcome - lo] = double(count);
    }
  r.p_succ = double(r.accepted) / double(n_shots);
  for (auto& m : r.magnitudes) m = r.accepted ? std::sqrt(m / double(r.accepted)) : 0.0;
  return r;
}

void write_shots_csv(const std::string& path, const ShotResult& shots, const RegisterLayout& layout,
                     const std::string& comment) {
  CsvWriter csv(path, {"outcome_bits", "count"}, comment);
  for (const auto& [outcome, count] : shots.counts) {
    std::string bits;
    for (int b = layout.total() - 1; b >= 0; --b) bits += (outcome >> b) & 1 ? '1' : '0';
    csv.field(bits).field(count).end_row();
  }
}

double gate_estimate(double s, double epsilon, double n, double eps_u) {
  require(s > 0.0 && epsilon > 0.0 && n > 0.0 && eps_u > 0.0, "OutOfDomain",
          "gate estimate inputs must be positive");
  require(eps_u < epsilon, "OutOfDomain", "eps_U must be below eps");
  const double l = std::log2(epsilon / eps_u);
  return (s * epsilon + 1.0) * (std::log2(n) + std::pow(l, 2.5)) * l;
}

Mat augmented_step(const SpMat& a, const Vec& b, double dt) {
  const Eigen::Index n = a.rows();
  Mat j = Mat::Zero(n + 1, n + 1);
  j.topLeftCorner(n, n) = Mat::Identity(n, n) + dt * Mat(a);
  j.topRightCorner(n, 1) = dt * b;
  j(n, n) = 1.0;
  return j;
}

EmulationResult emulate_iterative(const std::vector<Mat>& ops, const Vec& v0,
                                  const EmulationOptions& options) {
  const int tau = static_cast<int>(ops.size());
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  require(options.c == 2 || options.c == 4, "InvalidLcu", "C must be 2 or 4");
  const int n = static_cast<int>(v0.size());
  const int padded = next_pow2(n);
  const int data_dim = options.c == 2 ? 2 * padded : padded;
  EmulationResult res;
  res.layout = RegisterLayout::make(tau, options.c, data_dim);
  const RegisterLayout& L = res.layout;
  const long long nd = 1LL << L.n_d;

  Vec x = Vec::Zero(padded);
  x.head(n) = v0;
  const double norm0 = x.norm();
  require(norm0 > 0.0, "InvalidState", "initial state is zero", ErrorKind::Other);
  if (options.c == 2) x = pad_input(x);
  res.final_state = CVec::Zero(L.size());
  const long long top = tau - 1;
  res.final_state.segment(L.index(top, 0, 0), nd) = x.cast<std::complex<double>>() / norm0;

  res.trajectory.times.push_back(0.0);
  res.trajectory.states.push_back(v0);
  double scale = norm0;
  double p_prev = 1.0;
  double max_norm = 0.0;
  for (int k = 0; k < tau; ++k) {
    Mat j = pad_pow2(ops[k]);
    double delta = options.delta > 0.0 ? options.delta : choose_delta(j, options.epsilon).delta;
    res.deltas.push_back(delta);
    LcuDecomposition d = build_unitaries(j, options.epsilon, delta, options.c);
    const long long counter = top - k;
    apply_lcu_once(res.final_state, d, L, counter);
    res.max_norm_drift = std::max(res.max_norm_drift, std::abs(res.final_state.norm() - 1.0));
    if (options.c == 2) {
      // X on the dilation qubit moves J x back into the input half.
      CVec& s = res.final_state;
      const long long half = nd / 2;
      for (long long cnt = 0; cnt < (1LL << L.n_t); ++cnt)
        for (long long a = 0; a < (1LL << L.n_a); ++a) {
          const long long base = L.index(cnt, a, 0);
          for (long long i = 0; i < half; ++i) std::swap(s[base + i], s[base + half + i]);
        }
    }
    if (k < tau - 1) {
      // Decrement the counter on the success branch only.
      CVec& s = res.final_state;
      for (long long i = 0; i < nd; ++i) std::swap(s[L.index(counter, 0, i)], s[L.index(counter - 1, 0, i)]);
    }
    const long long next = k < tau - 1 ? counter - 1 : 0;
    CVec good = res.final_state.segment(L.index(next, 0, 0), nd);
    const double p = good.squaredNorm();
    scale *= options.c / (2.0 * options.epsilon * delta);
    Vec data = (options.c == 2 ? CVec(good.tail(padded)) : good).real() * scale;
    res.trajectory.times.push_back(k + 1);
    res.trajectory.states.push_back(data.head(n));
    max_norm = std::max(max_norm, data.head(n).norm());
    StepRecord rec;
    rec.step = k + 1;
    rec.p_succ_exact = p;
    rec.p_succ_step = p_prev > 0.0 ? p / p_prev : 0.0;
    rec.state_norm = res.final_state.norm();
    rec.countdown_value = next;
    res.transcript.push_back(rec);
    res.complexity.p_succ_steps.push_back(rec.p_succ_step);
    p_prev = p;
  }
  ComplexityReport& cr = res.complexity;
  Mat j0 = pad_pow2(ops.front());
  int s = 0;
  for (Eigen::Index r = 0; r < j0.rows(); ++r)
    s = std::max<int>(s, static_cast<int>((j0.row(r).array() != 0.0).count()));
  cr.sparsity = s;
  cr.epsilon = options.epsilon;
  cr.eps_u = options.epsilon / 2.0;
  cr.n_dim = data_dim;
  cr.gate_estimate = gate_estimate(std::max(1, s), cr.epsilon, cr.n_dim, cr.eps_u);
  cr.delta = res.deltas.front();
  cr.a_norm = inf_norm(j0);
  cr.q = cr.epsilon * cr.delta * cr.a_norm;
  cr.eta = 1.0 / cr.q;
  cr.p_succ_cumulative = p_prev;
  const Vec& last = res.trajectory.states.back();
  cr.amplitude_ratio = norm0 / last.norm();
  double log_p = 2.0 * std::log(last.norm() / norm0);
  for (double dl : res.deltas) log_p += 2.0 * std::log(2.0 * options.epsilon * dl / options.c);
  cr.p_succ_estimate = std::exp(log_p);
  cr.n_s_estimate = std::pow(1.0 / cr.q, 2.0 * tau) * cr.amplitude_ratio * cr.amplitude_ratio;
  if (options.readout == Readout::Shots)
    res.shots = sample_shots(res.final_state, L, options.shots, options.seed, 0);
  return res;
}

EmulationResult run_tmcqc2(const EmbeddedSystem& system, const Problem& problem, double dt, int tau,
                           const EmulationOptions& options) {
  require(dt > 0.0, "InvalidScheme", "dt must be positive");
  require(tau >= 1, "InvalidScheme", "tau must be >= 1");
  // fail on the register cap before any operator is built
  const int padded = next_pow2(system.n_vars() * problem.grid.n_points + 1);
  RegisterLayout::make(tau, options.c, options.c == 2 ? 2 * padded : padded);
  std::vector<Mat> ops;
  const bool frozen = system.alpha_mode == AlphaMode::Frozen;
  for (int k = 0; k < tau; ++k) {
    AssembledSystem as = assemble(system, problem, frozen ? 0.0 : k * dt);
    if (k == 0) {
      StabilityBound sb = dt_stability_bound(Mat(as.a));
      if (dt > sb.eigen)
        fail(ErrorKind::Stability, "StabilityViolation",
             "dt " + std::to_string(dt) + " above explicit bound " + std::to_string(sb.eigen));
    }
    ops.push_back(augmented_step(as.a, as.b, dt));
  }
  Vec v0 = initial_state(system, problem);
  Vec x(v0.size() + 1);
  x << v0, 1.0;
  EmulationResult res = emulate_iterative(ops, x, options);
  for (auto& t : res.trajectory.times) t *= dt;
  for (auto& s : res.trajectory.states) s = s.head(v0.size()).eval();
  return res;
}

OneShotEmulation run_oneshot_emulated(const OneShotSystem& sys, int p, double epsilon, double delta,
                                      int c) {
  require(p >= 1, "InvalidScheme", "Neumann order must be >= 1");
  const Eigen::Index m = sys.matrix.rows();
  Mat j = pad_pow2(Mat::Identity(m, m) - Mat(sys.matrix));
  OneShotEmulation out;
  out.p = p;
  out.epsilon = epsilon;
  out.delta = delta > 0.0 ? delta : choose_delta(j, epsilon).delta;
  require(out.delta * inf_norm(j) < 1.0, "NeumannDivergence", "delta |I - A_OS|_inf >= 1",
          ErrorKind::Numerical);
  const int padded = static_cast<int>(j.rows());
  const int data_dim = c == 2 ? 2 * padded : padded;
  out.layout = RegisterLayout::make(1, c, data_dim);
  const RegisterLayout& L = out.layout;
  const long long nd = 1LL << L.n_d;
  LcuDecomposition d = build_unitaries(j, epsilon, out.delta, c);

  Vec rhs = Vec::Zero(padded);
  rhs.head(m) = sys.rhs;
  const double bnorm = rhs.norm();
  out.history = sys.rhs;
  if (bnorm == 0.0) return out;
  CVec data = (c == 2 ? pad_input(rhs) : rhs).cast<std::complex<double>>() / bnorm;
  double weight = bnorm;
  for (int k = 1; k < p; ++k) {
    CVec state = CVec::Zero(L.size());
    state.segment(L.index(0, 0, 0), nd) = data;
    const double before = data.squaredNorm();
    apply_lcu_once(state, d, L);
    data = state.segment(L.index(0, 0, 0), nd);
    if (c == 2) {
      CVec swapped(nd);
      swapped << data.tail(nd / 2), data.head(nd / 2);
      data = swapped;
    }
    out.p_succ_terms.push_back(before > 0.0 ? data.squaredNorm() / before : 0.0);
    weight *= c / (2.0 * epsilon * out.delta);
    CVec term = c == 2 ? CVec(data.tail(padded)) : data;
    out.history += weight * term.real().head(m);
  }
  return out;
}

double richardson(double r1, double r2, double eps1, double eps2) {
  require(eps1 != eps2, "DegenerateEpsilons", "eps1 equals eps2");
  require(eps1 > eps2 && eps2 > 0.0, "DegenerateEpsilons", "need eps1 > eps2 > 0");
  const double g2 = (eps1 / eps2) * (eps1 / eps2);
  return (r1 - g2 * r2) / (1.0 - g2);
}

Vec richardson(const Vec& r1, const Vec& r2, double eps1, double eps2) {
  require(eps1 != eps2, "DegenerateEpsilons", "eps1 equals eps2");
  require(eps1 > eps2 && eps2 > 0.0, "DegenerateEpsilons", "need eps1 > eps2 > 0");
  require(r1.size() == r2.size(), "DimensionMismatch", "state sizes differ", ErrorKind::Other);
  const double g2 = (eps1 / eps2) * (eps1 / eps2);
  return (r1 - g2 * r2) / (1.0 - g2);
}

}  // namespace qham
