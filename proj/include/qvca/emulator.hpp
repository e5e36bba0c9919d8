#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qvca/ed.hpp"

namespace qvca {

struct DensityMatrix {
  CMatrix rho;

  int dim() const { return static_cast<int>(rho.rows()); }

  void validate(double tol = 1e-10) const {
    require(rho.rows() == rho.cols(), "density matrix: not square");
    require(std::abs(rho.trace() - cplx(1.0)) < tol, "density matrix: trace differs from one");
    require((rho - rho.adjoint()).cwiseAbs().maxCoeff() < tol, "density matrix: not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > -1e-9, "density matrix: negative eigenvalue");
  }
};

inline DensityMatrix gibbs_from_solution(const EigenSolution& sol) {
  CMatrix w = sol.weights.cast<cplx>().asDiagonal();
  return {sol.states * w * sol.states.adjoint()};
}

inline DensityMatrix exact_gibbs(const PauliOperator& H, double beta) {
  require(beta >= 0, "exact_gibbs: beta must be non-negative");
  return gibbs_from_solution(diagonalize(H, beta));
}

inline CMatrix exact_unitary(const EigenSolution& sol, double tau) {
  CVector ph(sol.dim());
  for (int n = 0; n < sol.dim(); ++n) ph[n] = std::exp(cplx(0, -tau * sol.energies[n]));
  return sol.states * ph.asDiagonal() * sol.states.adjoint();
}

// Greedy partition of the Pauli terms into mutually commuting groups, in the
// canonical term order.
inline std::vector<std::vector<std::pair<cplx, PauliString>>> commuting_groups(const PauliOperator& H) {
  std::vector<std::vector<std::pair<cplx, PauliString>>> groups;
  for (auto& term : H.term_list()) {
    if (term.second.is_identity()) continue;
    bool placed = false;
    for (auto& g : groups) {
      bool ok = true;
      for (auto& other : g)
        if (!commutes(term.second, other.second)) {
          ok = false;
          break;
        }
      if (ok) {
        g.push_back(term);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({term});
  }
  return groups;
}

// First-order product formula (prod_g e^{-i H_g tau / n_T})^{n_T}. Terms
// inside a group commute, so each group factorizes exactly into
// e^{-i theta P} = cos(theta) I - i sin(theta) P.
inline CMatrix trotter_unitary(const PauliOperator& H, double tau, int n_T) {
  require(n_T >= 1, "trotter_unitary: n_T must be >= 1");
  require(H.is_hermitian(), "trotter_unitary: operator is not Hermitian");
  const int dim = 1 << H.qubits();
  const double dt = tau / n_T;
  cplx global = std::exp(cplx(0, -dt * H.coefficient(PauliString{H.qubits(), 0, 0}).real()));
  CMatrix step = CMatrix::Identity(dim, dim) * global;
  for (auto& g : commuting_groups(H)) {
    for (auto& [c, s] : g) {
      const double th = c.real() * dt;
      CMatrix P = PauliOperator::from_string(s).to_matrix();
      CMatrix f = std::cos(th) * CMatrix::Identity(dim, dim) - cplx(0, std::sin(th)) * P;
      step = f * step;
    }
  }
  CMatrix U = CMatrix::Identity(dim, dim);
  for (int k = 0; k < n_T; ++k) U = step * U;
  return U;
}

struct Evolution {
  enum Kind { Exact, Trotter } kind = Exact;
  int n_T = 1;
};

struct MeasurementTrace {
  std::vector<double> tau;
  std::vector<double> P0;
  std::vector<double> P1;

  // C = 2 (P0 - P1)
  std::vector<double> correlation() const {
    std::vector<double> c(P0.size());
    for (std::size_t i = 0; i < P0.size(); ++i) c[i] = 2 * (P0[i] - P1[i]);
    return c;
  }
};

// Ancilla-plus-system density matrix kept as 2x2 blocks of system matrices;
// block (a, b) multiplies |a><b| on the ancilla.
struct AncillaState {
  CMatrix b[2][2];

  void hadamard() {
    CMatrix n00 = 0.5 * (b[0][0] + b[0][1] + b[1][0] + b[1][1]);
    CMatrix n01 = 0.5 * (b[0][0] - b[0][1] + b[1][0] - b[1][1]);
    CMatrix n10 = 0.5 * (b[0][0] + b[0][1] - b[1][0] - b[1][1]);
    CMatrix n11 = 0.5 * (b[0][0] - b[0][1] - b[1][0] + b[1][1]);
    b[0][0] = n00;
    b[0][1] = n01;
    b[1][0] = n10;
    b[1][1] = n11;
  }

  // |0><0| x I + |1><1| x O
  void controlled(const CMatrix& O) {
    b[0][1] = b[0][1] * O.adjoint();
    b[1][0] = O * b[1][0];
    b[1][1] = O * b[1][1] * O.adjoint();
  }

  double probability(int outcome) const { return b[outcome][outcome].trace().real(); }
};

struct ShotNoise {
  long shots = 0;  // 0 disables sampling
  std::uint64_t seed = 0;
};

// H - controlled O - H on an ancilla prepared in |0>, with
// O = U^dagger(tau) s_mu U(tau) s_nu, so that 2(P0 - P1) is the Lehmann C_{mu nu}.
inline std::pair<double, double> correlation_circuit(const DensityMatrix& rho, const CMatrix& U, const CMatrix& s_mu,
                                                     const CMatrix& s_nu) {
  const int d = rho.dim();
  AncillaState st;
  st.b[0][0] = rho.rho;
  st.b[0][1] = st.b[1][0] = st.b[1][1] = CMatrix::Zero(d, d);
  st.hadamard();
  st.controlled(U.adjoint() * s_mu * U * s_nu);
  st.hadamard();
  double p0 = st.probability(0), p1 = st.probability(1);
  double s = p0 + p1;
  return {p0 / s, p1 / s};
}

class EvolutionCache {
 public:
  EvolutionCache(const PauliOperator& H, const std::vector<double>& tau, Evolution ev) {
    if (ev.kind == Evolution::Exact) {
      EigenSolution sol = diagonalize(H, 0.0);
      for (double t : tau) U_.push_back(exact_unitary(sol, t));
    } else {
      for (double t : tau) U_.push_back(trotter_unitary(H, t, ev.n_T));
    }
  }
  const CMatrix& operator[](std::size_t i) const { return U_[i]; }
  std::size_t size() const { return U_.size(); }

 private:
  std::vector<CMatrix> U_;
};

inline void check_observable(const CMatrix& s) {
  if ((s - s.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw DomainError("measure_correlation: observable is not Hermitian");
}

inline MeasurementTrace measure_correlation(const DensityMatrix& rho, const CMatrix& s_mu, const CMatrix& s_nu,
                                            const std::vector<double>& tau, const EvolutionCache& U,
                                            ShotNoise noise = {}) {
  check_observable(s_mu);
  check_observable(s_nu);
  require(U.size() == tau.size(), "measure_correlation: evolution cache does not match the grid");
  MeasurementTrace tr;
  tr.tau = tau;
  tr.P0.resize(tau.size());
  tr.P1.resize(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    auto [p0, p1] = correlation_circuit(rho, U[i], s_mu, s_nu);
    tr.P0[i] = p0;
    tr.P1[i] = p1;
  }
  if (noise.shots > 0) {
    std::mt19937_64 rng(noise.seed);
    for (std::size_t i = 0; i < tau.size(); ++i) {
      std::binomial_distribution<long> draw(noise.shots, std::clamp(tr.P0[i], 0.0, 1.0));
      tr.P0[i] = static_cast<double>(draw(rng)) / noise.shots;
      tr.P1[i] = 1.0 - tr.P0[i];
    }
  }
  return tr;
}

inline MeasurementTrace measure_correlation(const DensityMatrix& rho, const PauliOperator& H,
                                            const PauliOperator& s_mu, const PauliOperator& s_nu,
                                            const std::vector<double>& tau, Evolution ev, ShotNoise noise = {}) {
  require(s_mu.is_hermitian() && s_nu.is_hermitian(), "measure_correlation: observable is not Hermitian");
  return measure_correlation(rho, s_mu.to_matrix(), s_nu.to_matrix(), tau, EvolutionCache(H, tau, ev), noise);
}

// Hermitian observables X_o, Y_o for every spin-orbital o, ordered
// (1 up .. Lc up, 1 down .. Lc down); index 2o is X, 2o+1 is Y.
inline std::vector<PauliOperator> xy_observables(int Lc) {
  std::vector<PauliOperator> out;
  for (Spin s : {Spin::Up, Spin::Down})
    for (int i = 1; i <= Lc; ++i) {
      auto [X, Y] = jw_hermitian_pair(i, s, Lc);
      out.push_back(X);
      out.push_back(Y);
    }
  return out;
}

// C_{mu nu}(tau_n) for every ordered pair of X/Y observables.
struct CorrelationRecord {
  int Lc = 0;
  std::vector<double> tau;
  std::vector<std::vector<std::vector<double>>> C;  // [mu][nu][n]
};

inline CorrelationRecord emulate_record(const PauliOperator& H, const DensityMatrix& rho, int Lc,
                                        const std::vector<double>& tau, Evolution ev, ShotNoise noise = {}) {
  const auto obs = xy_observables(Lc);
  std::vector<CMatrix> S;
  for (auto& o : obs) S.push_back(o.to_matrix());
  EvolutionCache U(H, tau, ev);
  const int K = static_cast<int>(S.size());
  CorrelationRecord rec;
  rec.Lc = Lc;
  rec.tau = tau;
  rec.C.assign(K, std::vector<std::vector<double>>(K));
#pragma omp parallel for collapse(2) schedule(static)
  for (int mu = 0; mu < K; ++mu)
    for (int nu = 0; nu < K; ++nu) {
      ShotNoise pn = noise;
      pn.seed = noise.seed + static_cast<std::uint64_t>(mu * K + nu);
      rec.C[mu][nu] = measure_correlation(rho, S[mu], S[nu], tau, U, pn).correlation();
    }
  return rec;
}

// All 4Lc^2 Lehmann sums at once: amplitudes grouped by Bohr frequency, then
// one product with the phase table e^{-i tau w}.
inline CorrelationRecord lehmann_record(const EigenSolution& sol, int Lc, const std::vector<double>& tau) {
  const auto obs = xy_observables(Lc);
  auto S = eigenbasis_elements(sol, obs);
  const int K = static_cast<int>(S.size()), d = sol.dim();
  struct Pair {
    double w;
    int m, n;
  };
  std::vector<Pair> pairs;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      double mx = 0;
      for (auto& s : S) mx = std::max(mx, std::abs(s(n, m)));
      if (mx > 1e-13) pairs.push_back({sol.energies[m] - sol.energies[n], m, n});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.w < b.w; });
  std::vector<double> freq;
  std::vector<int> slot(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (freq.empty() || pairs[p].w - freq.back() > 1e-12) freq.push_back(pairs[p].w);
    slot[p] = static_cast<int>(freq.size()) - 1;
  }
  const long F = static_cast<long>(freq.size()), nt = static_cast<long>(tau.size());
  CMatrix amp = CMatrix::Zero(K * K, F);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const int m = pairs[p].m, n = pairs[p].n;
    const double w = sol.weights[m] + sol.weights[n];
    for (int mu = 0; mu < K; ++mu) {
      const cplx a = w * S[mu](n, m);
      if (a == 0.0) continue;
      for (int nu = 0; nu < K; ++nu) amp(mu * K + nu, slot[p]) += a * S[nu](m, n);
    }
  }
  CorrelationRecord rec;
  rec.Lc = Lc;
  rec.tau = tau;
  rec.C.assign(K, std::vector<std::vector<double>>(K, std::vector<double>(nt)));
  const long B = 1024;
#pragma omp parallel for schedule(dynamic)
  for (long t0 = 0; t0 < nt; t0 += B) {
    const long nb = std::min(B, nt - t0);
    CMatrix ph(F, nb);
    for (long j = 0; j < nb; ++j)
      for (long f = 0; f < F; ++f) ph(f, j) = std::polar(1.0, -tau[t0 + j] * freq[f]);
    CMatrix C = amp * ph;
    for (int mu = 0; mu < K; ++mu)
      for (int nu = 0; nu < K; ++nu)
        for (long j = 0; j < nb; ++j) rec.C[mu][nu][t0 + j] = C(mu * K + nu, j).real();
  }
  return rec;
}

}  // namespace qvca
