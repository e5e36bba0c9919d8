#include <gtest/gtest.h>

#include "qvca/observables.hpp"

using namespace qvca;

namespace {

ClusterModel chain(double U, double mu, double T, int Nc = 50) {
  ClusterModel m;
  m.Lc = 2;
  m.U = U;
  m.mu = mu;
  m.T = T;
  m.Nc = Nc;
  return m;
}

double band(const ClusterModel& m, const Vec2& k) { return -2 * m.t * std::cos(k[0] * m.a) - m.mu; }

CptSpectra pipeline(const ClusterModel& m, const VariationalParams& v, const TimeGrid& g) {
  return cpt_spectra(lehmann_trace_solver(m, g)(v).G, m, v);
}

}  // namespace

TEST(Cpt, VanishingPerturbationReturnsClusterFunction) {
  ClusterModel m = chain(2, 0.3, 0.5, 4);
  EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, {0.1, 0.2, 0, 0}), m.beta());
  CMatrix Gp = lehmann_green_at(lehmann_data(sol, 2), cplx(0.4, 0.1));
  auto G = cpt_matrix(Gp, CMatrix::Zero(4, 4));
  ASSERT_TRUE(G.has_value());
  EXPECT_LT((*G - Gp).cwiseAbs().maxCoeff(), 1e-14);
  const Vec2 k{0.7, 0};
  auto [g, f] = periodize(Gp, periodization_phases(m, k));
  const cplx ph = std::polar(1.0, -0.7);
  EXPECT_LT(std::abs(g - 0.5 * (Gp(0, 0) + Gp(1, 1) + ph * Gp(1, 0) + std::conj(ph) * Gp(0, 1))), 1e-14);
  EXPECT_LT(std::abs(f - 0.5 * (Gp(0, 2) + Gp(1, 3) + ph * Gp(1, 2) + std::conj(ph) * Gp(0, 3))), 1e-14);
}

TEST(Cpt, NonInteractingIsExactForAnyWeissField) {
  ClusterModel m = chain(0, -0.4, 0.5, 6);
  VariationalParams v{0.3, 0.2, 0, 0};
  EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, v), m.beta());
  LehmannData L = lehmann_data(sol, 2);
  const cplx z(0.3, 0.05);
  for (auto& k : lattice_k_grid(m)) {
    auto G = cpt_matrix(lehmann_green_at(L, z), perturbation_matrix(m, v, fold_to_reduced_zone(m, k)));
    auto [g, f] = periodize(*G, periodization_phases(m, k));
    EXPECT_LT(std::abs(g - 1.0 / (z - band(m, k))), 1e-10);
    EXPECT_LT(std::abs(f), 1e-10);
  }
}

TEST(Cpt, SingularFrequencyIsFlagged) {
  ClusterModel m;
  m.Lc = 1;
  m.Nc = 1;
  CMatrix V = perturbation_matrix(m, {}, {0, 0});
  NambuGreensFunction g;
  g.omega = {-1, 0, 1};
  g.eta = 0.1;
  g.G = {CMatrix::Identity(2, 2) * 0.1, V.inverse(), CMatrix::Identity(2, 2) * 0.1};
  CptSpectra s = cpt_spectra(g, m, {});
  ASSERT_EQ(s.flagged_omega.size(), 1u);
  EXPECT_EQ(s.flagged_omega[0], 0.0);
  EXPECT_EQ(s.G[0][1], 0.0);
  EXPECT_NE(s.G[0][0], 0.0);
}

TEST(Spectra, BandPeaksSumRuleAndPositivity) {
  ClusterModel m = chain(0, 0, 1);
  TimeGrid grid;  // dtau = 0.05, n_max = 2000, eta = pi/50
  CptSpectra s = pipeline(m, {0, 0, 0, 0}, grid);
  auto A = spectral_density(s);
  for (std::size_t q = 0; q < s.k.size(); ++q) {
    double sum = 0;
    for (double x : A[q]) sum += x * s.domega();
    EXPECT_NEAR(sum, 1.0, 0.02) << q;
    EXPECT_GT(*std::min_element(A[q].begin(), A[q].end()), -1e-8) << q;
    const auto peak = std::max_element(A[q].begin(), A[q].end()) - A[q].begin();
    EXPECT_NEAR(s.omega[peak], band(m, s.k[q]), s.domega() + grid.eta) << q;
  }
  auto dos = density_of_states(s);
  double total = 0;
  for (double x : dos) total += x * s.domega();
  EXPECT_NEAR(total, 1.0, 0.02);
}

TEST(Spectra, MomentumDistributionMatchesMatsubara) {
  ClusterModel m = chain(0, -0.5, 1, 20);
  VariationalParams v{-0.5, 0, 0, 0};
  auto Nk = momentum_distribution(pipeline(m, v, TimeGrid{0.05, 4000}));
  EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, v), m.beta());
  auto Nm = matsubara_momentum_distribution(sol, m, v);
  const auto ks = lattice_k_grid(m);
  for (std::size_t q = 0; q < ks.size(); ++q) {
    EXPECT_NEAR(Nm[q], fermi(m.beta(), band(m, ks[q])), 1e-8);
    EXPECT_NEAR(Nk[q], Nm[q], 0.05);
  }
}

TEST(Spectra, MatsubaraTailCorrection) {
  ClusterModel m = chain(3, 0.2, 0.3, 4);
  VariationalParams v{0.4, 0.1, 0, 0};
  EigenSolution sol = diagonalize(build_cluster_hamiltonian(m, v), m.beta());
  auto a = matsubara_momentum_distribution(sol, m, v, 500);
  auto b = matsubara_momentum_distribution(sol, m, v, 8000);
  for (std::size_t q = 0; q < a.size(); ++q) EXPECT_NEAR(a[q], b[q], 1e-5);
}

TEST(Scalars, NoPairingGivesZeroGapAndUndefinedLength) {
  ClusterModel m = chain(2, -1, 0.5, 10);
  CptSpectra s = cpt_spectra(lehmann_solver(m, TimeGrid{0.05, 1000})({-1, 0, 0, 0}).G, m, {-1, 0, 0, 0});
  ScalarObservables o = scalar_observables(s, m);
  EXPECT_EQ(o.Delta, 0.0);
  for (double f : condensation_amplitude(s)) EXPECT_EQ(f, 0.0);
  EXPECT_FALSE(o.xi.has_value());
  EXPECT_FALSE(o.xi_real.has_value());
}

TEST(Scalars, HalfFillingAtTightBindingSaddle) {
  ClusterModel m = chain(0, 0, 1);
  TimeGrid grid;
  VcaResult r = find_saddle(functional(m, lehmann_solver(m, grid)), {0.2, 0.1, 0, 0}, {});
  ASSERT_TRUE(r.converged);
  CptSpectra s = cpt_spectra(lehmann_solver(m, grid)(r.params_star).G, m, r.params_star);
  EXPECT_NEAR(scalar_observables(s, m).n, 0.5, 0.01);
}

TEST(Scalars, DensityMatchesOmegaDerivative) {
  ClusterModel m = chain(2, -0.6, 0.5, 20);
  TimeGrid grid{0.05, 4000, 0.02};
  SaddleOptions opt;
  opt.active = {Field::MuPrime};
  VcaResult r = find_saddle(functional(m, lehmann_solver(m, grid)), {-0.6, 0, 0, 0}, opt);
  ASSERT_TRUE(r.converged);
  const double h = 1e-3;
  ClusterModel lo = m, hi = m;
  lo.mu -= h;
  hi.mu += h;
  const double dOmega = (functional(hi, lehmann_solver(hi, grid))(r.params_star) -
                         functional(lo, lehmann_solver(lo, grid))(r.params_star)) / (2 * h);
  CptSpectra s = cpt_spectra(lehmann_solver(m, grid)(r.params_star).G, m, r.params_star);
  EXPECT_NEAR(scalar_observables(s, m).n, -dOmega / 2, 1e-2);
}

TEST(Scalars, CoherenceLengthFormsAgree) {
  ClusterModel m = chain(0, 0, 1, 100);
  // Exponentially localized pair amplitude F(r) ~ e^{-|r|/3}.
  const long N = 200;
  std::vector<double> Fk(N);
  for (long q = 0; q < N; ++q) {
    const double k = 2 * std::numbers::pi * q / N;
    const double x = std::exp(-1.0 / 3);
    Fk[q] = (1 - x * x) / (1 - 2 * x * std::cos(k) + x * x);
  }
  auto xr = coherence_length_reciprocal(m, Fk), xs = coherence_length_real(m, Fk);
  ASSERT_TRUE(xr && xs);
  EXPECT_NEAR(*xr, *xs, 0.05 * *xs);
}

TEST(Scalars, PairingFieldInInteractingCluster) {
  ClusterModel m = chain(4, -1, 0.2, 20);
  VariationalParams v{-1, 0.3, 0, 0};
  CptSpectra s = cpt_spectra(lehmann_solver(m, TimeGrid{0.05, 2000})(v).G, m, v);
  ScalarObservables o = scalar_observables(s, m);
  EXPECT_GT(std::abs(o.Delta), 1e-3);
  ASSERT_TRUE(o.xi && o.xi_real);
  EXPECT_GT(*o.xi, 0.0);
}

TEST(Filling, BisectionReachesQuarterFilling) {
  ClusterModel base = chain(0, 0, 0.2, 20);
  auto exact = [&](double mu) {
    ClusterModel m = base;
    m.mu = mu;
    double n = 0;
    auto ks = lattice_k_grid(m);
    for (auto& k : ks) n += fermi(m.beta(), band(m, k)) / ks.size();
    return n;
  };
  auto measured = [&](double mu) {
    ClusterModel m = base;
    m.mu = mu;
    VariationalParams v{mu, 0, 0, 0};
    return scalar_observables(cpt_spectra(lehmann_solver(m, TimeGrid{0.05, 2000})(v).G, m, v), m).n;
  };
  const double mu_exact = bisect_filling(exact, 0.25, -3, 0, 1e-8);
  const double mu = bisect_filling(measured, 0.25, -3, 0, 1e-3);
  EXPECT_NEAR(mu, mu_exact, 0.05);
  EXPECT_NEAR(measured(mu), 0.25, 0.01);
  EXPECT_THROW(bisect_filling(exact, 0.25, 0, 1), DomainError);
}

TEST(Interacting, GapOpensAtTheFermiLevel) {
  ClusterModel m = chain(4, -2, 0.1);
  VariationalParams v{-2, 0, 0, 0};
  CptSpectra s = cpt_spectra(lehmann_solver(m, TimeGrid{})(v).G, m, v);
  auto A = spectral_density(s);
  double closest = 1e9;
  for (auto& row : A) {
    const auto peak = std::max_element(row.begin(), row.end()) - row.begin();
    closest = std::min(closest, std::abs(s.omega[peak]));
  }
  // The free band crosses omega = 0; here no quasiparticle peak comes closer than ~t.
  EXPECT_GT(closest, 0.8);
  EXPECT_NEAR(scalar_observables(s, m).n, 0.5, 0.01);
}
