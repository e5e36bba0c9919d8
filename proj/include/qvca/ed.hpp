#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "qvca/jordan_wigner.hpp"

namespace qvca {

inline constexpr int kMaxDenseQubits = 14;

struct EigenSolution {
  Eigen::VectorXd energies;  // ascending
  CMatrix states;            // columns are eigenvectors
  double beta = 1.0;
  double log_Z = 0.0;
  Eigen::VectorXd weights;   // e^{-beta E_n} / Z

  double Z() const { return std::exp(log_Z); }
  // -T ln Z, or the ground energy at beta = infinity.
  double grand_potential() const { return -log_Z / beta; }
  int dim() const { return static_cast<int>(energies.size()); }
};

inline void set_temperature(EigenSolution& s, double beta) {
  require(beta >= 0, "diagonalize: beta must be non-negative");
  s.beta = beta;
  const double e0 = s.energies.size() ? s.energies.minCoeff() : 0.0;
  double acc = 0;
  s.weights.resize(s.energies.size());
  for (int n = 0; n < s.energies.size(); ++n) acc += s.weights[n] = std::exp(-beta * (s.energies[n] - e0));
  s.weights /= acc;
  s.log_Z = std::log(acc) - beta * e0;
}

inline EigenSolution diagonalize_matrix(const CMatrix& H, double beta) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  require(es.info() == Eigen::Success, "diagonalize: eigensolver failed");
  EigenSolution s;
  s.energies = es.eigenvalues();
  s.states = es.eigenvectors();
  set_temperature(s, beta);
  return s;
}

inline EigenSolution diagonalize(const PauliOperator& H, double beta) {
  if (H.qubits() > kMaxDenseQubits)
    throw ResourceError("diagonalize: " + std::to_string(H.qubits()) + " qubits exceeds the dense limit of " +
                        std::to_string(kMaxDenseQubits));
  require(H.is_hermitian(), "diagonalize: operator is not Hermitian");
  return diagonalize_matrix(H.to_matrix(), beta);
}

// Nambu spinor component a: c_{a+1,up} for a < Lc, c^dagger_{a-Lc+1,down} otherwise.
inline PauliOperator nambu_operator(int a, int Lc) {
  require(a >= 0 && a < 2 * Lc, "nambu: index out of range");
  if (a < Lc) return jw_annihilate(a + 1, Spin::Up, Lc);
  return jw_create(a - Lc + 1, Spin::Down, Lc);
}

// Pole representation G(z) = sum_r q_r q_r^dagger / (z - omega_r).
struct LehmannData {
  std::vector<double> omega;      // E_n - E_m
  std::vector<double> P;          // (e^{-beta E_n} + e^{-beta E_m}) / Z
  std::vector<CVector> Q;         // amplitudes <m|psi_a|n>, one entry per Nambu row
  int rows = 0;

  CVector weighted(std::size_t r) const { return Q[r] * std::sqrt(P[r]); }
};

inline LehmannData lehmann_data(const EigenSolution& sol, int Lc, double amp_tol = 1e-13) {
  const int rows = 2 * Lc, d = sol.dim();
  require(d == (1 << (2 * Lc)), "lehmann: spectrum size does not match the cluster");
  std::vector<CMatrix> M;
  for (int a = 0; a < rows; ++a) M.push_back(sol.states.adjoint() * nambu_operator(a, Lc).to_matrix() * sol.states);
  LehmannData L;
  L.rows = rows;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      CVector q(rows);
      double mx = 0;
      for (int a = 0; a < rows; ++a) {
        q[a] = M[a](m, n);
        mx = std::max(mx, std::abs(q[a]));
      }
      if (mx < amp_tol) continue;
      L.omega.push_back(sol.energies[n] - sol.energies[m]);
      L.P.push_back(sol.weights[n] + sol.weights[m]);
      L.Q.push_back(q);
    }
  return L;
}

inline CMatrix lehmann_green_at(const LehmannData& L, cplx z) {
  CMatrix G = CMatrix::Zero(L.rows, L.rows);
  for (std::size_t r = 0; r < L.omega.size(); ++r) {
    CVector q = L.weighted(r);
    G.noalias() += (q * q.adjoint()) / (z - L.omega[r]);
  }
  return G;
}

struct NambuGreensFunction {
  std::vector<double> omega;
  double eta = 0.0;
  std::vector<CMatrix> G;
  int rows() const { return G.empty() ? 0 : static_cast<int>(G.front().rows()); }
};

inline NambuGreensFunction lehmann_green(const LehmannData& L, const std::vector<double>& omega_grid, double eta) {
  if (!(eta > 0)) throw DomainError("lehmann_green: eta must be positive");
  NambuGreensFunction out;
  out.omega = omega_grid;
  out.eta = eta;
  const long R = static_cast<long>(L.omega.size()), K = L.rows * L.rows, M = static_cast<long>(omega_grid.size());
  // Residue of every pole as one column, entry (a, b) at a + rows b.
  CMatrix res(K, R);
  for (long r = 0; r < R; ++r) {
    CVector q = L.weighted(r);
    for (int b = 0; b < L.rows; ++b)
      for (int a = 0; a < L.rows; ++a) res(a + L.rows * b, r) = q[a] * std::conj(q[b]);
  }
  out.G.assign(M, CMatrix::Zero(L.rows, L.rows));
  const long B = 256;
#pragma omp parallel for schedule(dynamic)
  for (long m0 = 0; m0 < M; m0 += B) {
    const long nb = std::min(B, M - m0);
    CMatrix D(R, nb);
    for (long j = 0; j < nb; ++j)
      for (long r = 0; r < R; ++r) D(r, j) = 1.0 / (cplx(omega_grid[m0 + j], eta) - L.omega[r]);
    CMatrix G = res * D;
    for (long j = 0; j < nb; ++j) out.G[m0 + j] = Eigen::Map<const CMatrix>(G.col(j).data(), L.rows, L.rows);
  }
  return out;
}

// Matrix elements of an operator list in the eigenbasis.
inline std::vector<CMatrix> eigenbasis_elements(const EigenSolution& sol, const std::vector<PauliOperator>& ops) {
  std::vector<CMatrix> out;
  for (auto& o : ops) out.push_back(sol.states.adjoint() * o.to_matrix() * sol.states);
  return out;
}

// C_{mu nu}(tau) = sum_{mn} e^{-i tau (E_m - E_n)} A^{mn}, with
// A^{mn} = (e^{-beta E_m} + e^{-beta E_n}) / Z <n|s_mu|m><m|s_nu|n>.
class LehmannCorrelator {
 public:
  LehmannCorrelator(const EigenSolution& sol, const CMatrix& s_mu, const CMatrix& s_nu, double tol = 1e-15) {
    const int d = sol.dim();
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) {
        cplx A = (sol.weights[m] + sol.weights[n]) * s_mu(n, m) * s_nu(m, n);
        if (std::abs(A) < tol) continue;
        freq_.push_back(sol.energies[m] - sol.energies[n]);
        amp_.push_back(A);
      }
  }

  cplx operator()(double tau) const {
    cplx c = 0;
    for (std::size_t r = 0; r < freq_.size(); ++r) c += amp_[r] * std::exp(cplx(0, -tau * freq_[r]));
    return c;
  }

  // (-i)^s sum A^{mn} (E_m - E_n)^s
  cplx moment(int s) const {
    cplx c = 0;
    for (std::size_t r = 0; r < freq_.size(); ++r) c += amp_[r] * std::pow(freq_[r], s);
    return c * std::pow(cplx(0, -1), s);
  }

  double max_abs_frequency() const {
    double m = 0;
    for (double f : freq_) m = std::max(m, std::abs(f));
    return m;
  }

 private:
  std::vector<double> freq_;
  std::vector<cplx> amp_;
};

}  // namespace qvca
