#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qvca/jordan_wigner.hpp"

namespace qvca {

using Vec2 = std::array<double, 2>;

struct ClusterModel {
  int dimension = 1;
  int Lc = 2;
  int Nc = 50;
  double a = 1.0;
  double t = 1.0;
  double U = 0.0;
  double mu = 0.0;
  double T = 1.0;

  double beta() const { return 1.0 / T; }
  int qubits() const { return 2 * Lc; }
  // Sites along one lattice direction inside a cluster.
  int linear_size() const { return dimension == 1 ? Lc : 2; }

  void validate() const {
    if (dimension != 1 && dimension != 2) throw ConfigError("model.dimension must be 1 or 2");
    if (Lc < 1) throw ConfigError("model.Lc must be >= 1");
    if (dimension == 2 && Lc != 4) throw ConfigError("model.Lc must be 4 (2x2 cluster) in two dimensions");
    if (Nc < 1) throw ConfigError("model.Nc must be >= 1");
    if (!(a > 0)) throw ConfigError("model.a must be positive");
    if (!(T > 0)) throw ConfigError("model.T must be positive");
  }
};

struct VariationalParams {
  double mu_prime = 0.0;
  double delta_prime = 0.0;
  double delta_d_prime = 0.0;
  double M_prime = 0.0;
};

// Bond from site i (cell 0) to site j in the cell displaced by R.
struct Bond {
  int i;
  int j;
  Vec2 R;
};

struct Geometry {
  std::vector<Vec2> positions;   // site positions inside the cluster
  std::vector<Bond> intra;       // undirected, i < j
  std::vector<Bond> lattice;     // directed, every neighbor of every site
  Vec2 cell{0, 0};               // superlattice period per direction
};

inline Geometry make_geometry(const ClusterModel& m) {
  Geometry g;
  const double a = m.a;
  if (m.dimension == 1) {
    for (int i = 0; i < m.Lc; ++i) g.positions.push_back({i * a, 0});
    for (int i = 0; i + 1 < m.Lc; ++i) g.intra.push_back({i, i + 1, {0, 0}});
    g.cell = {m.Lc * a, 0};
  } else {
    g.positions = {{0, 0}, {a, 0}, {0, a}, {a, a}};
    g.intra = {{0, 1, {0, 0}}, {0, 2, {0, 0}}, {1, 3, {0, 0}}, {2, 3, {0, 0}}};
    g.cell = {2 * a, 2 * a};
  }
  const int L = m.linear_size();
  auto wrap = [&](double x, double period, double& cellshift) {
    double c = std::floor(x / period + 1e-9);
    cellshift = c * period;
    return x - cellshift;
  };
  std::vector<Vec2> dirs = {{a, 0}, {-a, 0}};
  if (m.dimension == 2) {
    dirs.push_back({0, a});
    dirs.push_back({0, -a});
  }
  for (int i = 0; i < m.Lc; ++i) {
    for (auto d : dirs) {
      Vec2 p{g.positions[i][0] + d[0], g.positions[i][1] + d[1]};
      Vec2 R{0, 0};
      double px = wrap(p[0], L * a, R[0]);
      double py = m.dimension == 2 ? wrap(p[1], L * a, R[1]) : 0.0;
      for (int j = 0; j < m.Lc; ++j) {
        if (std::abs(g.positions[j][0] - px) < 1e-9 && std::abs(g.positions[j][1] - py) < 1e-9) {
          g.lattice.push_back({i, j, R});
          break;
        }
      }
    }
  }
  return g;
}

inline double neel_sign(const ClusterModel& m, int site) {
  const Geometry g = make_geometry(m);
  const double phase = std::numbers::pi * (g.positions[site][0] + g.positions[site][1]) / m.a;
  return std::cos(phase) >= 0 ? 1.0 : -1.0;
}

// d_ij: +1 along x, -1 along y, 0 otherwise (0-based sites).
inline double d_wave_sign(const ClusterModel& m, int i, int j) {
  const Geometry g = make_geometry(m);
  const double dx = g.positions[i][0] - g.positions[j][0];
  const double dy = g.positions[i][1] - g.positions[j][1];
  if (std::abs(std::abs(dx) - m.a) < 1e-9 && std::abs(dy) < 1e-9) return 1.0;
  if (std::abs(std::abs(dy) - m.a) < 1e-9 && std::abs(dx) < 1e-9) return -1.0;
  return 0.0;
}

inline void check_fields(const ClusterModel& m, const VariationalParams& v) {
  if (m.dimension == 1 && (v.delta_d_prime != 0.0 || v.M_prime != 0.0))
    throw ConfigError("d-wave and antiferromagnetic fields require the 2x2 cluster");
}

inline PauliOperator build_cluster_hamiltonian(const ClusterModel& m, const VariationalParams& v) {
  m.validate();
  check_fields(m, v);
  const int Lc = m.Lc, n = m.qubits();
  const Geometry g = make_geometry(m);
  std::vector<PauliOperator> cu, cd;
  for (int i = 1; i <= Lc; ++i) {
    cu.push_back(jw_create(i, Spin::Up, Lc));
    cd.push_back(jw_create(i, Spin::Down, Lc));
  }
  PauliOperator H(n);
  for (auto& b : g.intra) {
    for (auto* c : {&cu, &cd}) {
      PauliOperator hop = (*c)[b.i] * (*c)[b.j].adjoint();
      H += (hop + hop.adjoint()) * cplx(-m.t);
    }
  }
  for (int i = 0; i < Lc; ++i) {
    PauliOperator nu = cu[i] * cu[i].adjoint(), nd = cd[i] * cd[i].adjoint();
    H += (nu * nd) * cplx(-m.U);
    H += (nu + nd) * cplx(-v.mu_prime);
    if (v.M_prime != 0.0) H += (nu - nd) * cplx(v.M_prime * neel_sign(m, i));
    if (v.delta_prime != 0.0) {
      PauliOperator p = cu[i] * cd[i];
      H += (p + p.adjoint()) * cplx(v.delta_prime);
    }
  }
  if (v.delta_d_prime != 0.0) {
    for (int i = 0; i < Lc; ++i)
      for (int j = 0; j < Lc; ++j) {
        double d = d_wave_sign(m, i, j);
        if (d == 0.0) continue;
        PauliOperator p = cu[i] * cd[j];
        H += (p + p.adjoint()) * cplx(v.delta_d_prime * d);
      }
  }
  return H;
}

inline PauliOperator total_number(int Lc) {
  PauliOperator N(2 * Lc);
  for (int i = 1; i <= Lc; ++i) N += jw_number(i, Spin::Up, Lc) + jw_number(i, Spin::Down, Lc);
  return N;
}

inline std::vector<Vec2> k_grid(const ClusterModel& m) {
  require(m.Nc >= 1, "k_grid: Nc must be positive");
  const double step = 2 * std::numbers::pi / (m.Nc * m.linear_size() * m.a);
  std::vector<Vec2> ks;
  if (m.dimension == 1) {
    for (int q = 0; q < m.Nc; ++q) ks.push_back({q * step, 0});
  } else {
    for (int qy = 0; qy < m.Nc; ++qy)
      for (int qx = 0; qx < m.Nc; ++qx) ks.push_back({qx * step, qy * step});
  }
  return ks;
}

// Full-lattice momenta k = 2 pi m / (N a), m = 0..N-1.
inline std::vector<Vec2> lattice_k_grid(const ClusterModel& m) {
  const int N = m.Nc * m.linear_size();
  const double step = 2 * std::numbers::pi / (N * m.a);
  std::vector<Vec2> ks;
  if (m.dimension == 1) {
    for (int q = 0; q < N; ++q) ks.push_back({q * step, 0});
  } else {
    for (int qy = 0; qy < N; ++qy)
      for (int qx = 0; qx < N; ++qx) ks.push_back({qx * step, qy * step});
  }
  return ks;
}

// Lattice one-body block A(k~) in the superlattice gauge.
inline CMatrix lattice_block(const ClusterModel& m, const Vec2& k) {
  const Geometry g = make_geometry(m);
  CMatrix A = CMatrix::Zero(m.Lc, m.Lc);
  for (int i = 0; i < m.Lc; ++i) A(i, i) = -m.mu;
  for (auto& b : g.lattice) {
    const double ph = k[0] * b.R[0] + k[1] * b.R[1];
    A(b.i, b.j) += -m.t * std::exp(cplx(0, ph));
  }
  return A;
}

// Nambu one-body matrices t(k~) = diag(A, -A) and t' = [[B, C], [C, D]].
inline CMatrix lattice_one_body(const ClusterModel& m, const Vec2& k) {
  const int L = m.Lc;
  CMatrix A = lattice_block(m, k);
  CMatrix t = CMatrix::Zero(2 * L, 2 * L);
  t.topLeftCorner(L, L) = A;
  t.bottomRightCorner(L, L) = -A;
  return t;
}

inline CMatrix cluster_one_body(const ClusterModel& m, const VariationalParams& v) {
  check_fields(m, v);
  const int L = m.Lc;
  const Geometry g = make_geometry(m);
  CMatrix B = CMatrix::Zero(L, L), C = CMatrix::Zero(L, L), D = CMatrix::Zero(L, L);
  for (int i = 0; i < L; ++i) {
    const double s = v.M_prime != 0.0 ? neel_sign(m, i) : 0.0;
    B(i, i) = -v.mu_prime + v.M_prime * s;
    D(i, i) = v.mu_prime + v.M_prime * s;
    C(i, i) = v.delta_prime;
    for (int j = 0; j < L; ++j)
      if (i != j && v.delta_d_prime != 0.0) C(i, j) = v.delta_d_prime * d_wave_sign(m, i, j);
  }
  for (auto& b : g.intra) {
    B(b.i, b.j) = B(b.j, b.i) = -m.t;
    D(b.i, b.j) = D(b.j, b.i) = m.t;
  }
  CMatrix tp(2 * L, 2 * L);
  tp << B, C, C.adjoint(), D;
  return tp;
}

inline Vec2 fold_to_reduced_zone(const ClusterModel& m, const Vec2& k) {
  const double G = 2 * std::numbers::pi / (m.linear_size() * m.a);
  Vec2 r = k;
  for (int d = 0; d < m.dimension; ++d) {
    r[d] = std::fmod(k[d], G);
    if (r[d] < 0) r[d] += G;
    if (G - r[d] < 1e-12) r[d] = 0;
  }
  return r;
}

inline bool on_superlattice_grid(const ClusterModel& m, const Vec2& k) {
  const double step = 2 * std::numbers::pi / (m.Nc * m.linear_size() * m.a);
  for (int d = 0; d < 2; ++d) {
    if (d >= m.dimension) {
      if (std::abs(k[d]) > 1e-9) return false;
      continue;
    }
    double q = k[d] / step;
    if (std::abs(q - std::round(q)) > 1e-6) return false;
  }
  return true;
}

// V(k~) = t(k~) - t'. k~ is folded into the reduced zone and must lie on the
// superlattice grid.
inline CMatrix perturbation_matrix(const ClusterModel& m, const VariationalParams& v, const Vec2& k) {
  if (!on_superlattice_grid(m, k)) throw DomainError("perturbation_matrix: wavevector off the superlattice grid");
  return lattice_one_body(m, fold_to_reduced_zone(m, k)) - cluster_one_body(m, v);
}

}  // namespace qvca
