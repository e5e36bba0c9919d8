#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "qvca/emulator.hpp"

namespace qvca {

inline constexpr double kDefaultEta = std::numbers::pi / 50;

struct TimeGrid {
  double dtau = 0.05;
  int n_max = 2000;
  double eta = kDefaultEta;

  void validate() const {
    if (!(dtau > 0)) throw ConfigError("grid: dtau must be positive");
    if (n_max < 1) throw ConfigError("grid: n_max must be >= 1");
    if (!(eta >= 0)) throw ConfigError("grid: eta must be non-negative");
  }
  double tau(int n) const { return n * dtau; }
  double tau_max() const { return n_max * dtau; }
  double omega_max() const { return 1.0 / (2 * dtau); }
  double domega() const { return 1.0 / (2 * tau_max()); }

  std::vector<double> taus() const {
    std::vector<double> t(n_max + 1);
    for (int n = 0; n <= n_max; ++n) t[n] = tau(n);
    return t;
  }
  // omega_m = m domega for |omega_m| <= omega_max; n_max points on each side.
  std::vector<double> omegas() const {
    std::vector<double> w(2 * n_max + 1);
    for (int m = -n_max; m <= n_max; ++m) w[m + n_max] = m * domega();
    return w;
  }
};

// Anticommutator correlators of one orbital pair (a, b):
// <{c_a(t), c_b^dag}>, <{c_a^dag(t), c_b}>, <{c_a(t), c_b}>, <{c_a^dag(t), c_b^dag}>.
struct FermionCorrelators {
  std::vector<cplx> cc_dag, cdag_c, cc, cdag_cdag;
};

// Inverse of the X/Y map, from C_XX, C_YY, C_YX, C_XY with X_a/Y_a first.
inline FermionCorrelators invert_xy(const std::vector<double>& xx, const std::vector<double>& yy,
                                    const std::vector<double>& yx, const std::vector<double>& xy) {
  const std::size_t n = xx.size();
  if (yy.size() != n || yx.size() != n || xy.size() != n)
    throw DomainError("invert_xy: traces are on different time grids");
  const cplx I(0, 1);
  FermionCorrelators f;
  for (std::size_t k = 0; k < n; ++k) {
    f.cc_dag.push_back(0.25 * (xx[k] + yy[k] + I * yx[k] - I * xy[k]));
    f.cdag_c.push_back(0.25 * (xx[k] + yy[k] - I * yx[k] + I * xy[k]));
    f.cc.push_back(0.25 * (xx[k] - yy[k] + I * yx[k] + I * xy[k]));
    f.cdag_cdag.push_back(0.25 * (xx[k] - yy[k] - I * yx[k] - I * xy[k]));
  }
  return f;
}

inline FermionCorrelators invert_xy(const MeasurementTrace& xx, const MeasurementTrace& yy, const MeasurementTrace& yx,
                                    const MeasurementTrace& xy) {
  if (yy.tau != xx.tau || yx.tau != xx.tau || xy.tau != xx.tau)
    throw DomainError("invert_xy: traces are on different time grids");
  return invert_xy(xx.correlation(), yy.correlation(), yx.correlation(), xy.correlation());
}

// Nambu anticommutator <{psi_a(t), psi_b^dag}> on the time grid.
struct NambuTrace {
  std::vector<double> tau;
  std::vector<CMatrix> C;
};

inline NambuTrace nambu_trace(const CorrelationRecord& rec) {
  const int L = rec.Lc, rows = 2 * L;
  require(static_cast<int>(rec.C.size()) == 2 * rows, "nambu_trace: record does not match the cluster");
  NambuTrace out;
  out.tau = rec.tau;
  out.C.assign(rec.tau.size(), CMatrix::Zero(rows, rows));
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < rows; ++b) {
      auto f = invert_xy(rec.C[2 * a][2 * b], rec.C[2 * a + 1][2 * b + 1], rec.C[2 * a + 1][2 * b],
                         rec.C[2 * a][2 * b + 1]);
      const bool pa = a < L, pb = b < L;
      const auto& src = pa ? (pb ? f.cc_dag : f.cc) : (pb ? f.cdag_cdag : f.cdag_c);
      for (std::size_t n = 0; n < rec.tau.size(); ++n) out.C[n](a, b) = src[n];
    }
  return out;
}

// G^R(omega) = dtau sum_n w_n e^{i omega tau_n} e^{-eta tau_n} (-i) C(tau_n), with
// trapezoid weight w_0 = 1/2.
inline std::vector<CMatrix> retarded_transform(const std::vector<CMatrix>& C, double dtau, double eta,
                                               const std::vector<double>& omegas) {
  require(!C.empty(), "retarded_transform: empty trace");
  require(eta >= 0, "retarded_transform: eta must be non-negative");
  const long nt = static_cast<long>(C.size());
  const long rows = C.front().rows(), cols = C.front().cols(), K = rows * cols;
  CMatrix F(nt, K);
  for (long n = 0; n < nt; ++n) {
    const double w = (n == 0 ? 0.5 : 1.0) * dtau * std::exp(-eta * n * dtau);
    for (long k = 0; k < K; ++k) F(n, k) = cplx(0, -w) * C[n](k % rows, k / rows);
  }
  const long M = static_cast<long>(omegas.size()), B = 128;
  std::vector<CMatrix> out(M, CMatrix::Zero(rows, cols));
#pragma omp parallel for schedule(dynamic)
  for (long m0 = 0; m0 < M; m0 += B) {
    const long nb = std::min(B, M - m0);
    CMatrix W(nt, nb);
    for (long j = 0; j < nb; ++j) {
      const double om = omegas[m0 + j];
      const cplx z = std::polar(1.0, om * dtau);
      cplx ph = 1.0;
      for (long n = 0; n < nt; ++n) {
        if (n % 256 == 0) ph = std::polar(1.0, om * n * dtau);
        W(n, j) = ph;
        ph *= z;
      }
    }
    CMatrix G = F.transpose() * W;
    for (long j = 0; j < nb; ++j)
      for (long k = 0; k < K; ++k) out[m0 + j](k % rows, k / rows) = G(k, j);
  }
  return out;
}

inline NambuGreensFunction retarded_transform(const NambuTrace& tr, const TimeGrid& grid) {
  grid.validate();
  require(static_cast<int>(tr.C.size()) == grid.n_max + 1, "retarded_transform: trace length does not match grid");
  NambuGreensFunction g;
  g.omega = grid.omegas();
  g.eta = grid.eta;
  g.G = retarded_transform(tr.C, grid.dtau, grid.eta, g.omega);
  return g;
}

inline std::vector<cplx> retarded_transform(const std::vector<cplx>& c, double dtau, double eta,
                                            const std::vector<double>& omegas) {
  std::vector<CMatrix> m;
  for (cplx v : c) m.push_back(CMatrix::Constant(1, 1, v));
  std::vector<cplx> out;
  for (auto& g : retarded_transform(m, dtau, eta, omegas)) out.push_back(g(0, 0));
  return out;
}

// A = -(1/pi) Im G for one matrix entry.
inline std::vector<double> spectral_function(const NambuGreensFunction& g, int a, int b) {
  std::vector<double> A(g.G.size());
  for (std::size_t m = 0; m < g.G.size(); ++m) A[m] = -g.G[m](a, b).imag() / std::numbers::pi;
  return A;
}

inline std::vector<double> spectral_function(const std::vector<cplx>& g) {
  std::vector<double> A(g.size());
  for (std::size_t m = 0; m < g.size(); ++m) A[m] = -g[m].imag() / std::numbers::pi;
  return A;
}

// Forward-difference estimates C^(s) = dtau^{-s} sum_r (-1)^r binom(s, r) C((s - r) dtau).
inline std::vector<cplx> moments(const std::vector<cplx>& c, int s_max, double dtau) {
  if (s_max < 0 || static_cast<std::size_t>(s_max) >= c.size())
    throw DomainError("moments: s_max exceeds the time grid");
  require(dtau > 0, "moments: dtau must be positive");
  std::vector<cplx> out;
  for (int s = 0; s <= s_max; ++s) {
    cplx acc = 0;
    double binom = 1;
    for (int r = 0; r <= s; ++r) {
      acc += (r % 2 ? -binom : binom) * c[s - r];
      binom = binom * (s - r) / (r + 1);
    }
    out.push_back(acc / std::pow(dtau, s));
  }
  return out;
}

// C(tau) ~ sum_s C^(s) tau^s / s!
inline cplx moment_series(const std::vector<cplx>& mom, double tau) {
  cplx acc = 0;
  double term = 1;
  for (std::size_t s = 0; s < mom.size(); ++s) {
    acc += mom[s] * term;
    term *= tau / (s + 1);
  }
  return acc;
}

}  // namespace qvca
