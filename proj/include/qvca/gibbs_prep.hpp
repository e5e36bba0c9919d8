#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "qvca/emulator.hpp"

namespace qvca {

struct GibbsPrepConfig {
  int m = 4;           // bath qubits
  int r = 8;           // phase register width
  int q = 4;           // measured prefix of the phase register
  double lambda = 3.5; // bath scale, eta = sqrt(lambda / m) ||H'||
  double target_beta = 1.0;
  long max_runs = 100000;

  void validate() const {
    if (m < 1) throw ConfigError("gibbs: m must be >= 1");
    if (q < 1 || r <= q) throw ConfigError("gibbs: need r > q >= 1");
    if (!(lambda > 0)) throw ConfigError("gibbs: lambda must be positive");
    if (max_runs < 1) throw ConfigError("gibbs: max_runs must be >= 1");
  }
};

// Scales entering the preparation, for a system spectrum shifted to start at 0.
struct GibbsScales {
  double norm_sys = 0;   // ||H'||
  double eta = 0;        // bath splitting
  double norm_bath = 0;  // ||H_B|| = m eta
  double norm_total = 0; // ||H_0||

  GibbsScales(double spread, const GibbsPrepConfig& cfg) {
    require(spread > 0, "gibbs: system Hamiltonian has a flat spectrum");
    norm_sys = spread;
    eta = std::sqrt(cfg.lambda / cfg.m) * spread;
    norm_bath = cfg.m * eta;
    norm_total = norm_sys + norm_bath;
  }

  double ratio() const { return 1.0 + norm_sys / norm_bath; }

  double beta_of(long s_star, int q) const { return 4.0 / eta * (0.5 - std::ldexp(double(s_star), -q) * ratio()); }

  double delta_beta(int q) const { return std::ldexp(4.0, -q) / eta * ratio(); }
};

inline double trace_distance_bound(const GibbsPrepConfig& cfg, double norm_sys, double beta) {
  const double lg = std::log(std::ldexp(1.0, cfg.r - cfg.q)) / (std::numbers::pi * std::numbers::pi);
  const double ex = 2.0 / cfg.lambda + beta * norm_sys + cfg.lambda * norm_sys * norm_sys * beta * beta / 8.0;
  return (1 + lg) * std::exp(ex) / std::ldexp(1.0, cfg.r - cfg.q - 2) + 0.5 * (std::exp(2.0 / cfg.lambda) - 1);
}

inline double expected_runs_bound(const GibbsPrepConfig& cfg, double norm_sys, double beta) {
  const double ex = 2.0 / cfg.lambda + beta * norm_sys + cfg.lambda * norm_sys * norm_sys * beta * beta / 8.0;
  return std::ldexp(1.0, cfg.q) * std::sqrt(std::numbers::pi / (2.0 * cfg.m)) * std::exp(ex);
}

inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// |alpha_s(phi)|^2 for the r-qubit phase register.
inline double qpe_weight(double phi, long s, int r) {
  const double N = std::ldexp(1.0, r);
  const double x = phi - s / N;
  const double den = std::sin(std::numbers::pi * x);
  if (std::abs(den) < 1e-15) return 1.0;
  const double num = std::sin(std::numbers::pi * N * x);
  return num * num / (den * den * N * N);
}

inline double window_weight(double phi, long s_star, const GibbsPrepConfig& cfg) {
  const long w = 1L << (cfg.r - cfg.q);
  double acc = 0;
  for (long s = s_star * w; s < (s_star + 1) * w; ++s) acc += qpe_weight(phi, s, cfg.r);
  return acc;
}

struct GibbsPrepResult {
  DensityMatrix rho;
  long s_star = 0;
  double achieved_beta = 0;  // from s_star
  double delta_beta = 0;
  long runs = 0;
  double window_probability = 0;
  double trace_distance = 0;  // to the exact Gibbs state at achieved_beta
  double distance_bound = 0;
  double runs_bound = 0;
};

// Closed-form reduced state in the eigenbasis of the uncoupled system plus
// bath. The bath enters only through its binomial level multiplicities, so
// m is not limited by the dense register size.
inline DensityMatrix riera_state_closed_form(const EigenSolution& sys, const GibbsPrepConfig& cfg, long s_star,
                                             double* probability = nullptr) {
  const double e0 = sys.energies.minCoeff();
  GibbsScales sc(sys.energies.maxCoeff() - e0, cfg);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(sys.dim());
  double total = 0;
  for (int a = 0; a < sys.dim(); ++a)
    for (int j = 0; j <= cfg.m; ++j) {
      const double mult = std::exp(std::lgamma(cfg.m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(cfg.m - j + 1.0));
      const double E = sys.energies[a] - e0 + sc.eta * j;
      const double w = mult * window_weight(E / sc.norm_total, s_star, cfg);
      p[a] += w;
      total += w;
    }
  if (probability) *probability = total / (sys.dim() * std::ldexp(1.0, cfg.m));
  require(total > 0, "gibbs: measured window has zero weight");
  p /= total;
  return {sys.states * p.cast<cplx>().asDiagonal() * sys.states.adjoint()};
}

inline void check_gibbs_size(int system_qubits, const GibbsPrepConfig& cfg) {
  if (system_qubits + cfg.m + cfg.r > kMaxDenseQubits)
    throw ResourceError("gibbs: system + bath + register exceeds the dense limit of " +
                        std::to_string(kMaxDenseQubits) + " qubits");
}

// Dense emulation of the preparation circuit: fully mixed system plus bath,
// Hadamards on R, controlled U^{2^j} with U = exp(2 pi i H_0 / ||H_0||),
// inverse QFT on R, then projection of the top q bits of R onto each outcome.
// Returns the unnormalized reduced system state for every outcome.
inline std::vector<CMatrix> riera_outcome_states(const PauliOperator& Hsys, const GibbsPrepConfig& cfg) {
  cfg.validate();
  const int ns = Hsys.qubits();
  check_gibbs_size(ns, cfg);
  EigenSolution sys = diagonalize(Hsys, 0.0);
  const double e0 = sys.energies.minCoeff();
  GibbsScales sc(sys.energies.maxCoeff() - e0, cfg);

  const int nq = ns + cfg.m;
  PauliOperator H0 = (Hsys - PauliOperator::identity(ns, e0)).embed(nq, 0);
  for (int j = 0; j < cfg.m; ++j)
    H0 += PauliOperator::identity(nq, 0.5 * sc.eta) + PauliOperator::single(nq, ns + j, Op1::Z) * cplx(0.5 * sc.eta);
  EigenSolution full = diagonalize(H0, 0.0);

  const long D = 1L << nq, N = 1L << cfg.r, ds = 1L << ns, db = 1L << cfg.m;
  std::vector<CMatrix> Upow(cfg.r);
  for (int j = 0; j < cfg.r; ++j) {
    CVector ph(full.dim());
    for (int k = 0; k < full.dim(); ++k)
      ph[k] = std::exp(cplx(0, 2 * std::numbers::pi * std::ldexp(1.0, j) * full.energies[k] / sc.norm_total));
    Upow[j] = full.states * ph.asDiagonal() * full.states.adjoint();
  }
  CMatrix iqft(N, N);
  for (long x = 0; x < N; ++x)
    for (long s = 0; s < N; ++s)
      iqft(s, x) = std::exp(cplx(0, -2 * std::numbers::pi * double((x * s) % N) / N)) / std::sqrt(double(N));

  const long w = 1L << (cfg.r - cfg.q), outcomes = 1L << cfg.q;
  std::vector<CMatrix> out(outcomes, CMatrix::Zero(ds, ds));
#pragma omp parallel
  {
    std::vector<CMatrix> local(outcomes, CMatrix::Zero(ds, ds));
#pragma omp for schedule(static)
    for (long b = 0; b < D; ++b) {
      // Columns index the register value, rows the system-plus-bath state.
      CMatrix psi = CMatrix::Zero(D, N);
      psi.row(b).setConstant(1.0 / std::sqrt(double(N)));
      for (int j = 0; j < cfg.r; ++j)
        for (long x = 0; x < N; ++x)
          if (x >> j & 1) psi.col(x) = Upow[j] * psi.col(x);
      psi = psi * iqft.transpose();
      for (long o = 0; o < outcomes; ++o)
        for (long s = o * w; s < (o + 1) * w; ++s) {
          // Partial trace over the bath (high qubits).
          Eigen::Map<const CMatrix> v(psi.col(s).data(), ds, db);
          local[o] += v * v.adjoint() / double(D);
        }
    }
#pragma omp critical
    for (long o = 0; o < outcomes; ++o) out[o] += local[o];
  }
  return out;
}

// Gibbs state for any real beta, including the inverted populations that
// negative outcomes describe.
inline DensityMatrix gibbs_at(const EigenSolution& sys, double beta) {
  Eigen::VectorXd w = (-beta * (sys.energies.array() - (beta >= 0 ? sys.energies.minCoeff() : sys.energies.maxCoeff()))).exp();
  w /= w.sum();
  return {sys.states * w.cast<cplx>().asDiagonal() * sys.states.adjoint()};
}

inline long nearest_s_star(const GibbsScales& sc, const GibbsPrepConfig& cfg) {
  long best = 0;
  for (long s = 1; s < (1L << cfg.q); ++s)
    if (std::abs(sc.beta_of(s, cfg.q) - cfg.target_beta) < std::abs(sc.beta_of(best, cfg.q) - cfg.target_beta))
      best = s;
  return best;
}

// Repeats the circuit, sampling the measured prefix, until the outcome whose
// temperature is closest to the target appears.
inline GibbsPrepResult prepare_gibbs_riera(const PauliOperator& Hsys, const GibbsPrepConfig& cfg,
                                           std::uint64_t seed) {
  cfg.validate();
  check_gibbs_size(Hsys.qubits(), cfg);
  EigenSolution sys = diagonalize(Hsys, 0.0);
  GibbsScales sc(sys.energies.maxCoeff() - sys.energies.minCoeff(), cfg);
  GibbsPrepResult res;
  res.delta_beta = sc.delta_beta(cfg.q);
  const long target = nearest_s_star(sc, cfg);
  if (std::abs(sc.beta_of(target, cfg.q) - cfg.target_beta) > res.delta_beta)
    throw ConfigError("gibbs: target beta " + std::to_string(cfg.target_beta) +
                      " is not reachable with q = " + std::to_string(cfg.q));

  auto states = riera_outcome_states(Hsys, cfg);
  std::vector<double> prob;
  for (auto& s : states) prob.push_back(std::max(0.0, s.trace().real()));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<long> draw(prob.begin(), prob.end());
  long s = -1;
  while (s != target) {
    if (res.runs >= cfg.max_runs) throw ResourceError("gibbs: target outcome not observed within max_runs");
    s = draw(rng);
    ++res.runs;
  }
  res.s_star = s;
  res.window_probability = prob[s];
  res.rho = {states[s] / prob[s]};
  res.achieved_beta = sc.beta_of(s, cfg.q);
  res.trace_distance = trace_distance(res.rho.rho, gibbs_at(sys, res.achieved_beta).rho);
  res.distance_bound = trace_distance_bound(cfg, sc.norm_sys, res.achieved_beta);
  res.runs_bound = expected_runs_bound(cfg, sc.norm_sys, res.achieved_beta);
  return res;
}

// Least-squares slope of -ln p_n against E_n over the eigenbasis of H.
inline double effective_beta(const DensityMatrix& rho, const EigenSolution& sys) {
  const int d = sys.dim();
  Eigen::VectorXd e(d), y(d);
  for (int n = 0; n < d; ++n) {
    double p = (sys.states.col(n).adjoint() * rho.rho * sys.states.col(n))(0, 0).real();
    require(p > 0, "effective_beta: state has an empty level");
    e[n] = sys.energies[n];
    y[n] = -std::log(p);
  }
  const double em = e.mean(), ym = y.mean();
  const double var = (e.array() - em).square().sum();
  require(var > 0, "effective_beta: flat spectrum");
  return ((e.array() - em) * (y.array() - ym)).sum() / var;
}

}  // namespace qvca
