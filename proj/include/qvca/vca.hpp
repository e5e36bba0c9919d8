#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qvca/cluster_model.hpp"
#include "qvca/greens.hpp"

namespace qvca {

inline double fermi(double beta, double omega) {
  const double x = beta * omega;
  if (x > 0) {
    const double e = std::exp(-x);
    return e / (1 + e);
  }
  return 1 / (1 + std::exp(x));
}

// Cluster data needed by the functional at one point of parameter space.
struct ClusterGreens {
  double omega_prime = 0;  // -T ln Z of the cluster
  NambuGreensFunction G;
};

using ClusterSolver = std::function<ClusterGreens(const VariationalParams&)>;

// Exact diagonalization, G' evaluated directly at omega + i eta.
inline ClusterSolver lehmann_solver(const ClusterModel& m, const TimeGrid& grid) {
  return [m, grid](const VariationalParams& v) {
    EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, v), m.beta());
    ClusterGreens cg;
    cg.omega_prime = sol.grand_potential();
    cg.G = lehmann_green(lehmann_data(sol, m.Lc), grid.omegas(), grid.eta);
    return cg;
  };
}

// C(tau) from the exact Lehmann sums, then the discrete retarded transform.
inline ClusterSolver lehmann_trace_solver(const ClusterModel& m, const TimeGrid& grid) {
  return [m, grid](const VariationalParams& v) {
    EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, v), m.beta());
    ClusterGreens cg;
    cg.omega_prime = sol.grand_potential();
    cg.G = retarded_transform(nambu_trace(lehmann_record(sol, m.Lc, grid.taus())), grid);
    return cg;
  };
}

// C(tau) from the emulated ancilla circuit.
inline ClusterSolver emulator_solver(const ClusterModel& m, const TimeGrid& grid, Evolution ev, ShotNoise noise) {
  return [m, grid, ev, noise](const VariationalParams& v) {
    PauliOperator H = build_cluster_hamiltonian(m, v);
    EigenSolution sol = diagonalize(H, m.beta());
    ClusterGreens cg;
    cg.omega_prime = sol.grand_potential();
    cg.G = retarded_transform(nambu_trace(emulate_record(H, gibbs_from_solution(sol), m.Lc, grid.taus(), ev, noise)),
                              grid);
    return cg;
  };
}

struct LogBranchWarning {
  Vec2 k;
  double omega;
};

struct OmegaDiagnostics {
  std::vector<LogBranchWarning> warnings;
};

namespace detail {

// sum_w f(w) dw (-1/pi) Im ln det[1 - V G'(w)], with the phase of the
// determinant followed continuously along the grid.
template <int N>
double fermi_log_det(const CMatrix& Vd, const NambuGreensFunction& g, const std::vector<double>& f, const Vec2& k,
                     std::vector<LogBranchWarning>& warn) {
  using Mat = Eigen::Matrix<cplx, N, N>;
  const Mat V = Vd;
  const Mat I = Mat::Identity(Vd.rows(), Vd.cols());
  double phase = 0, prev = 0, acc = 0;
  for (std::size_t i = 0; i < g.omega.size(); ++i) {
    const Mat Gm = g.G[i];
    const cplx d = (I - V * Gm).determinant();
    if (std::abs(d) < 1e-12) warn.push_back({k, g.omega[i]});
    const double ph = std::arg(d);
    if (i == 0) {
      phase = ph;
    } else {
      double jump = ph - prev;
      jump -= 2 * std::numbers::pi * std::round(jump / (2 * std::numbers::pi));
      phase += jump;
    }
    prev = ph;
    acc += f[i] * (-phase / std::numbers::pi);
  }
  return acc;
}

}  // namespace detail

// Omega_t per lattice site:
//   Omega' - (1/N) sum_k int dw f(w) (-1/pi) Im ln det[1 - V(k) G'(w + i eta)] - (1/N) sum_k Tr V_hole(k),
// all divided by Lc. The trace term restores the constant dropped when the
// spin-down block is written in hole form.
inline double grand_potential(const ClusterModel& m, const VariationalParams& v, const NambuGreensFunction& g,
                              double omega_prime, OmegaDiagnostics* diag = nullptr) {
  const std::size_t M = g.omega.size();
  require(M >= 2, "grand_potential: frequency grid too short");
  const int L = m.Lc, rows = 2 * L;
  require(g.rows() == rows, "grand_potential: Green's function does not match the cluster");
  const double dw = g.omega[1] - g.omega[0];
  std::vector<double> f(M);
  for (std::size_t i = 0; i < M; ++i) f[i] = fermi(m.beta(), g.omega[i]) * dw;
  const auto ks = k_grid(m);
  const long nk = static_cast<long>(ks.size());
  std::vector<double> per_k(nk);
  std::vector<std::vector<LogBranchWarning>> warn(nk);
#pragma omp parallel for schedule(static)
  for (long q = 0; q < nk; ++q) {
    const CMatrix V = perturbation_matrix(m, v, ks[q]);
    double acc = 0;
    switch (rows) {
      case 2: acc = detail::fermi_log_det<2>(V, g, f, ks[q], warn[q]); break;
      case 4: acc = detail::fermi_log_det<4>(V, g, f, ks[q], warn[q]); break;
      case 8: acc = detail::fermi_log_det<8>(V, g, f, ks[q], warn[q]); break;
      default: acc = detail::fermi_log_det<Eigen::Dynamic>(V, g, f, ks[q], warn[q]);
    }
    per_k[q] = -acc - V.bottomRightCorner(L, L).trace().real();
  }
  double sum = 0;
  for (long q = 0; q < nk; ++q) sum += per_k[q];
  if (diag)
    for (auto& w : warn) diag->warnings.insert(diag->warnings.end(), w.begin(), w.end());
  return (omega_prime + sum / nk) / L;
}

using Objective = std::function<double(const VariationalParams&)>;

inline Objective functional(const ClusterModel& m, ClusterSolver solver) {
  return [m, solver](const VariationalParams& v) {
    ClusterGreens cg = solver(v);
    return grand_potential(m, v, cg.G, cg.omega_prime);
  };
}

enum class Field { MuPrime = 0, DeltaPrime = 1, DeltaDPrime = 2, MPrime = 3 };

inline double& field(VariationalParams& v, Field f) {
  switch (f) {
    case Field::MuPrime: return v.mu_prime;
    case Field::DeltaPrime: return v.delta_prime;
    case Field::DeltaDPrime: return v.delta_d_prime;
    default: return v.M_prime;
  }
}

inline double field(const VariationalParams& v, Field f) { return field(const_cast<VariationalParams&>(v), f); }

inline std::string field_name(Field f) {
  static const char* names[] = {"mu_prime", "delta_prime", "delta_d_prime", "M_prime"};
  return names[static_cast<int>(f)];
}

struct SaddleOptions {
  std::vector<Field> active = {Field::MuPrime, Field::DeltaPrime};
  double h = 1e-3;
  double eps_omega = 1e-5;
  int max_iter = 50;
  double bound = 20.0;  // |parameter| limit
};

struct VcaResult {
  VariationalParams params_star;
  double omega_value = 0;
  double gradient_norm = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> diagnostics;
};

inline Eigen::VectorXd gradient(const Objective& omega, const VariationalParams& v, const std::vector<Field>& active,
                                double h) {
  require(h > 0, "gradient: step must be positive");
  Eigen::VectorXd g(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    VariationalParams p = v, q = v;
    field(p, active[i]) += h;
    field(q, active[i]) -= h;
    g[i] = (omega(p) - omega(q)) / (2 * h);
  }
  return g;
}

inline Eigen::MatrixXd hessian(const Objective& omega, const VariationalParams& v, const std::vector<Field>& active,
                               double h) {
  const int n = static_cast<int>(active.size());
  Eigen::MatrixXd H(n, n);
  for (int j = 0; j < n; ++j) {
    VariationalParams p = v, q = v;
    field(p, active[j]) += h;
    field(q, active[j]) -= h;
    H.col(j) = (gradient(omega, p, active, h) - gradient(omega, q, active, h)) / (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

// Newton-Raphson on grad Omega = 0. A singular Hessian switches to damped
// descent on |grad Omega|^2.
inline VcaResult find_saddle(const Objective& omega, const VariationalParams& v0, const SaddleOptions& opt) {
  require(!opt.active.empty(), "find_saddle: no active fields");
  VcaResult res;
  VariationalParams v = v0;
  auto shifted = [&](const Eigen::VectorXd& d) {
    VariationalParams p = v;
    for (std::size_t i = 0; i < opt.active.size(); ++i) field(p, opt.active[i]) += d[i];
    return p;
  };
  auto in_bounds = [&](const VariationalParams& p) {
    for (Field f : opt.active)
      if (!(std::abs(field(p, f)) <= opt.bound)) return false;
    return true;
  };
  if (!in_bounds(v)) throw ConfigError("find_saddle: initial point outside the parameter bounds");
  Eigen::VectorXd g = gradient(omega, v, opt.active, opt.h);
  while (g.norm() > opt.eps_omega && res.iterations < opt.max_iter) {
    ++res.iterations;
    Eigen::MatrixXd H = hessian(omega, v, opt.active, opt.h);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const bool singular = s[0] == 0 || s[s.size() - 1] < 1e-10 * s[0];
    Eigen::VectorXd step;
    if (!singular) {
      step = -svd.solve(g);
    } else {
      res.diagnostics.push_back("iteration " + std::to_string(res.iterations) +
                                ": singular Hessian, damped descent on |grad|^2");
      step = -(H * g);
      if (step.norm() == 0) step = -g;
    }
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      VariationalParams p = shifted(lambda * step);
      if (!in_bounds(p)) continue;
      Eigen::VectorXd gp = gradient(omega, p, opt.active, opt.h);
      if (gp.norm() < g.norm()) {
        v = p;
        g = gp;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.diagnostics.push_back("iteration " + std::to_string(res.iterations) + ": no step reduces |grad|");
      break;
    }
  }
  res.params_star = v;
  res.omega_value = omega(v);
  res.gradient_norm = g.norm();
  res.converged = res.gradient_norm <= opt.eps_omega;
  if (!res.converged && res.iterations >= opt.max_iter) res.diagnostics.push_back("max_iter reached");
  return res;
}

// Potthoff landscape on a regular (mu', Delta') grid.
struct ScanPoint {
  double mu_prime, delta_prime, omega;
};

inline std::vector<ScanPoint> potthoff_scan(const Objective& omega, VariationalParams base, double mu_lo, double mu_hi,
                                            double d_lo, double d_hi, int n) {
  require(n >= 2, "potthoff_scan: need at least 2 points per axis");
  std::vector<ScanPoint> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      VariationalParams v = base;
      v.mu_prime = mu_lo + (mu_hi - mu_lo) * i / (n - 1);
      v.delta_prime = d_lo + (d_hi - d_lo) * j / (n - 1);
      out.push_back({v.mu_prime, v.delta_prime, omega(v)});
    }
  return out;
}

}  // namespace qvca
