#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "qvca/vca.hpp"

namespace qvca {

// Lattice-perturbed Nambu matrix G' (1 - V G')^{-1} = (G'^{-1} - V)^{-1}.
// Returns nullopt when 1 - V G' is singular.
inline std::optional<CMatrix> cpt_matrix(const CMatrix& Gp, const CMatrix& V, double tol = 1e-12) {
  const long n = Gp.rows();
  Eigen::PartialPivLU<CMatrix> lu(CMatrix::Identity(n, n) - V * Gp);
  if (!(std::abs(lu.determinant()) > tol)) return std::nullopt;
  return CMatrix(Gp * lu.inverse());
}

// e^{-i k (r_i - r_j)} / Lc for the periodization at lattice momentum k.
inline CMatrix periodization_phases(const ClusterModel& m, const Vec2& k) {
  const Geometry geo = make_geometry(m);
  CMatrix P(m.Lc, m.Lc);
  for (int i = 0; i < m.Lc; ++i)
    for (int j = 0; j < m.Lc; ++j) {
      const double dr =
          k[0] * (geo.positions[i][0] - geo.positions[j][0]) + k[1] * (geo.positions[i][1] - geo.positions[j][1]);
      P(i, j) = std::polar(1.0 / m.Lc, -dr);
    }
  return P;
}

// Periodized normal and anomalous components of one Nambu matrix.
inline std::pair<cplx, cplx> periodize(const CMatrix& G, const CMatrix& phases) {
  const long L = phases.rows();
  return {(phases.array() * G.topLeftCorner(L, L).array()).sum(),
          (phases.array() * G.topRightCorner(L, L).array()).sum()};
}

// G_cpt(k, w) and F_cpt(k, w) on the full lattice momentum grid.
struct CptSpectra {
  std::vector<Vec2> k;
  std::vector<double> omega;
  double eta = 0;
  double beta = 1;
  std::vector<std::vector<cplx>> G, F;  // [k][omega]
  std::vector<double> flagged_omega;    // frequencies skipped for a singular 1 - V G'

  double domega() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }
};

inline CptSpectra cpt_spectra(const NambuGreensFunction& g, const ClusterModel& m, const VariationalParams& v) {
  require(g.rows() == 2 * m.Lc, "cpt: Green's function does not match the cluster");
  CptSpectra s;
  s.k = lattice_k_grid(m);
  s.omega = g.omega;
  s.eta = g.eta;
  s.beta = m.beta();
  const long nk = static_cast<long>(s.k.size()), M = static_cast<long>(g.omega.size());
  s.G.assign(nk, std::vector<cplx>(M));
  s.F.assign(nk, std::vector<cplx>(M));
  std::vector<char> bad(M, 0);
#pragma omp parallel for schedule(static)
  for (long q = 0; q < nk; ++q) {
    const CMatrix V = perturbation_matrix(m, v, fold_to_reduced_zone(m, s.k[q]));
    const CMatrix P = periodization_phases(m, s.k[q]);
    if (V.rows() == 4) {
      using M4 = Eigen::Matrix<cplx, 4, 4>;
      const M4 V4 = V, I4 = M4::Identity();
      for (long i = 0; i < M; ++i) {
        const M4 Gp = g.G[i], D = I4 - V4 * Gp;
        if (!(std::abs(D.determinant()) > 1e-12)) {
          bad[i] = 1;
          continue;
        }
        std::tie(s.G[q][i], s.F[q][i]) = periodize(CMatrix(Gp * D.inverse()), P);
      }
      continue;
    }
    for (long i = 0; i < M; ++i) {
      auto G = cpt_matrix(g.G[i], V);
      if (!G) {
        bad[i] = 1;
        continue;
      }
      std::tie(s.G[q][i], s.F[q][i]) = periodize(*G, P);
    }
  }
  for (long i = 0; i < M; ++i)
    if (bad[i]) {
      s.flagged_omega.push_back(g.omega[i]);
      for (long q = 0; q < nk; ++q) s.G[q][i] = s.F[q][i] = 0;
    }
  return s;
}

inline std::vector<std::vector<double>> spectral_map(const std::vector<std::vector<cplx>>& X) {
  std::vector<std::vector<double>> A(X.size());
  for (std::size_t q = 0; q < X.size(); ++q) A[q] = spectral_function(X[q]);
  return A;
}

// A(k, w) and F(k, w).
inline std::vector<std::vector<double>> spectral_density(const CptSpectra& s) { return spectral_map(s.G); }
inline std::vector<std::vector<double>> anomalous_density(const CptSpectra& s) { return spectral_map(s.F); }

// N(w) = (1/N) sum_k A(k, w).
inline std::vector<double> density_of_states(const CptSpectra& s) {
  std::vector<double> N(s.omega.size(), 0.0);
  for (auto& row : spectral_density(s))
    for (std::size_t i = 0; i < row.size(); ++i) N[i] += row[i] / s.k.size();
  return N;
}

inline std::vector<double> fermi_sum(const CptSpectra& s, const std::vector<std::vector<cplx>>& X) {
  std::vector<double> w(s.omega.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = fermi(s.beta, s.omega[i]) * s.domega();
  std::vector<double> out;
  for (auto& row : X) {
    double acc = 0;
    for (std::size_t i = 0; i < row.size(); ++i) acc += w[i] * (-row[i].imag() / std::numbers::pi);
    out.push_back(acc);
  }
  return out;
}

// N(k) = int dw f(w) A(k, w).
inline std::vector<double> momentum_distribution(const CptSpectra& s) { return fermi_sum(s, s.G); }
// F(k) = int dw f(w) F(k, w).
inline std::vector<double> condensation_amplitude(const CptSpectra& s) { return fermi_sum(s, s.F); }

struct ScalarObservables {
  double n = 0;                 // <n_{i sigma}>
  double Delta = 0;             // (1/N) sum_k F(k)
  std::optional<double> xi;     // pair coherence length, reciprocal form
  std::optional<double> xi_real;
};

// xi^2 = sum_k |grad F(k)|^2 / sum_k |F(k)|^2 with periodic central differences.
inline std::optional<double> coherence_length_reciprocal(const ClusterModel& m, const std::vector<double>& Fk) {
  require(m.dimension == 1, "coherence length: one-dimensional lattices only");
  const long N = static_cast<long>(Fk.size());
  const double dk = 2 * std::numbers::pi / (N * m.a);
  double num = 0, den = 0;
  for (long q = 0; q < N; ++q) {
    const double d = (Fk[(q + 1) % N] - Fk[(q + N - 1) % N]) / (2 * dk);
    num += d * d;
    den += Fk[q] * Fk[q];
  }
  if (!(den > 1e-24)) return std::nullopt;
  return std::sqrt(num / den);
}

// xi^2 = sum_r r^2 |F(r)|^2 / sum_r |F(r)|^2, r the minimal-image distance.
inline std::optional<double> coherence_length_real(const ClusterModel& m, const std::vector<double>& Fk) {
  require(m.dimension == 1, "coherence length: one-dimensional lattices only");
  const long N = static_cast<long>(Fk.size());
  double num = 0, den = 0;
  for (long r = 0; r < N; ++r) {
    cplx Fr = 0;
    for (long q = 0; q < N; ++q) Fr += std::polar(Fk[q], 2 * std::numbers::pi * double(q * r % N) / N);
    Fr /= double(N);
    const double d = std::min(r, N - r) * m.a;
    num += d * d * std::norm(Fr);
    den += std::norm(Fr);
  }
  if (!(den > 1e-24)) return std::nullopt;
  return std::sqrt(num / den);
}

inline ScalarObservables scalar_observables(const CptSpectra& s, const ClusterModel& m) {
  ScalarObservables o;
  auto Nk = momentum_distribution(s);
  auto Fk = condensation_amplitude(s);
  for (double x : Nk) o.n += x / Nk.size();
  for (double x : Fk) o.Delta += x / Fk.size();
  if (m.dimension == 1) {
    o.xi = coherence_length_reciprocal(m, Fk);
    o.xi_real = coherence_length_real(m, Fk);
  }
  return o;
}

// N(k) = 1/2 + 2T sum_{n >= 0} Re G_cpt(k, i w_n), with the 1/w^2 tail of the
// remaining terms added in closed form.
inline std::vector<double> matsubara_momentum_distribution(const EigenSolution& sol, const ClusterModel& m,
                                                           const VariationalParams& v, int n_freq = 4000) {
  require(n_freq >= 1, "matsubara: need at least one frequency");
  LehmannData L = lehmann_data(sol, m.Lc);
  const auto ks = lattice_k_grid(m);
  const double T = m.T;
  std::vector<CMatrix> Gp(n_freq);
  for (int n = 0; n < n_freq; ++n) Gp[n] = lehmann_green_at(L, cplx(0, (2 * n + 1) * std::numbers::pi * T));
  std::vector<double> out(ks.size());
#pragma omp parallel for schedule(static)
  for (long q = 0; q < static_cast<long>(ks.size()); ++q) {
    const CMatrix V = perturbation_matrix(m, v, fold_to_reduced_zone(m, ks[q]));
    const CMatrix P = periodization_phases(m, ks[q]);
    double acc = 0, last = 0;
    for (int n = 0; n < n_freq; ++n) {
      auto G = cpt_matrix(Gp[n], V);
      require(G.has_value(), "matsubara: singular 1 - V G' on the imaginary axis");
      last = periodize(*G, P).first.real();
      acc += last;
    }
    const double wl = (2 * n_freq - 1) * std::numbers::pi * T;
    const double m1 = -last * wl * wl;
    const double tail = -m1 / (std::numbers::pi * std::numbers::pi * T * T) / (4.0 * n_freq);
    out[q] = 0.5 + 2 * T * (acc + tail);
  }
  return out;
}

// Bisection for the chemical potential giving a target density.
inline double bisect_filling(const std::function<double(double)>& density, double target, double lo, double hi,
                             double tol = 1e-4, int max_iter = 60) {
  double dlo = density(lo) - target, dhi = density(hi) - target;
  if (dlo * dhi > 0) throw DomainError("bisect_filling: target density not bracketed");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi), d = density(mid) - target;
    if ((d < 0) == (dlo < 0)) {
      lo = mid;
      dlo = d;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qvca
