#include "commands.hpp"

#include <omp.h>

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>

#include "qvca/config.hpp"
#include "qvca/io.hpp"
#include "qvca/observables.hpp"

namespace fs = std::filesystem;

namespace qvca::cli {

namespace {

struct Context {
  RunConfig cfg;
  fs::path dir;
  std::vector<std::string> files;
  Json extra = Json::object();  // command-specific manifest entries

  fs::path file(const std::string& name) {
    files.push_back(name);
    return dir / name;
  }
};

std::string orbital_label(int a, int Lc) {
  return (a < Lc ? "up" : "dn") + std::to_string(a % Lc + 1);
}

// X/Y observable label in xy_observables order.
std::string xy_label(int k, int Lc) { return (k % 2 ? "Y" : "X") + orbital_label(k / 2, Lc); }

DensityMatrix cluster_state(Context& c, const PauliOperator& H, const EigenSolution& sol) {
  if (c.cfg.backend.gibbs == "exact") return gibbs_from_solution(sol);
  GibbsPrepConfig g = c.cfg.backend.riera;
  g.target_beta = c.cfg.model.beta();
  GibbsPrepResult r = prepare_gibbs_riera(H, g, c.cfg.seed);
  c.extra["gibbs"] = {{"s_star", r.s_star}, {"achieved_beta", r.achieved_beta}, {"delta_beta", r.delta_beta},
                      {"runs", r.runs}, {"trace_distance", r.trace_distance}};
  return r.rho;
}

Evolution evolution(const RunConfig& cfg) {
  return cfg.backend.evolution == "exact" ? Evolution{} : Evolution{Evolution::Trotter, cfg.backend.n_T};
}

CorrelationRecord record(Context& c, const VariationalParams& v, double* omega_prime = nullptr) {
  const RunConfig& cfg = c.cfg;
  PauliOperator H = build_cluster_hamiltonian(cfg.model, v);
  EigenSolution sol = diagonalize(H, cfg.model.beta());
  if (omega_prime) *omega_prime = sol.grand_potential();
  if (cfg.backend.kind == "ed") return lehmann_record(sol, cfg.model.Lc, cfg.grid.taus());
  return emulate_record(H, cluster_state(c, H, sol), cfg.model.Lc, cfg.grid.taus(), evolution(cfg),
                        {cfg.backend.shots, cfg.seed});
}

ClusterSolver solver(Context& c) {
  if (c.cfg.backend.kind == "ed") return lehmann_solver(c.cfg.model, c.cfg.grid);
  return [&c](const VariationalParams& v) {
    ClusterGreens cg;
    cg.G = retarded_transform(nambu_trace(record(c, v, &cg.omega_prime)), c.cfg.grid);
    return cg;
  };
}

VcaResult saddle_result(Context& c) {
  Objective om = functional(c.cfg.model, solver(c));
  if (!c.cfg.optimize) {
    VcaResult r;
    r.params_star = c.cfg.initial;
    r.omega_value = om(r.params_star);
    r.gradient_norm = gradient(om, r.params_star, c.cfg.solver.active, c.cfg.solver.h).norm();
    r.converged = r.gradient_norm <= c.cfg.solver.eps_omega;
    r.diagnostics.push_back("optimization disabled; evaluated at the initial point");
    return r;
  }
  return find_saddle(om, c.cfg.initial, c.cfg.solver);
}

Json result_json(const VcaResult& r) {
  return {{"params_star", params_json(r.params_star)}, {"omega_per_site", r.omega_value},
          {"gradient_norm", r.gradient_norm},          {"iterations", r.iterations},
          {"converged", r.converged},                  {"diagnostics", r.diagnostics}};
}

int solve_cluster(Context& c) {
  const RunConfig& cfg = c.cfg;
  EigenSolution sol = diagonalize(build_cluster_hamiltonian(cfg.model, cfg.initial), cfg.model.beta());
  CsvWriter w(c.file("spectrum.csv"), {"index", "energy[t]", "weight"});
  for (int n = 0; n < sol.dim(); ++n) w.row({double(n), sol.energies[n], sol.weights[n]});
  write_json(c.file("cluster.json"), {{"params", params_json(cfg.initial)},
                                      {"ground_energy", sol.energies[0]},
                                      {"log_Z", sol.log_Z},
                                      {"omega_prime", sol.grand_potential()}});
  return kOk;
}

int measure_gf(Context& c) {
  const RunConfig& cfg = c.cfg;
  const int L = cfg.model.Lc, K = 4 * L;
  CorrelationRecord rec = record(c, cfg.initial);
  std::vector<std::string> head = {"tau[1/t]"};
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) head.push_back("C_" + xy_label(a, L) + "_" + xy_label(b, L));
  CsvWriter w(c.file("correlations.csv"), head);
  for (std::size_t n = 0; n < rec.tau.size(); ++n) {
    std::vector<double> r = {rec.tau[n]};
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) r.push_back(rec.C[a][b][n]);
    w.row(r);
  }
  write_green(c.file("green.csv"), retarded_transform(nambu_trace(rec), cfg.grid));
  return kOk;
}

int potthoff_scan_cmd(Context& c) {
  const ScanConfig& s = c.cfg.scan;
  auto pts = potthoff_scan(functional(c.cfg.model, solver(c)), c.cfg.initial, s.mu_min, s.mu_max, s.delta_min,
                           s.delta_max, s.points);
  CsvWriter w(c.file("scan.csv"), {"mu_prime[t]", "delta_prime[t]", "omega_per_site[t]"});
  for (auto& p : pts) w.row({p.mu_prime, p.delta_prime, p.omega});
  return kOk;
}

int saddle_cmd(Context& c) {
  VcaResult r = saddle_result(c);
  write_json(c.file("saddle.json"), result_json(r));
  return r.converged ? kOk : kNotConverged;
}

int observables_cmd(Context& c) {
  const RunConfig& cfg = c.cfg;
  VcaResult r = saddle_result(c);
  write_json(c.file("saddle.json"), result_json(r));
  ClusterGreens cg = solver(c)(r.params_star);
  CptSpectra s = cpt_spectra(cg.G, cfg.model, r.params_star);
  auto A = spectral_density(s), F = anomalous_density(s);
  {
    CsvWriter w(c.file("akw.csv"), {"kx[1/a]", "ky[1/a]", "omega[t]", "A[1/t]", "F[1/t]"});
    for (std::size_t q = 0; q < s.k.size(); ++q)
      for (std::size_t m = 0; m < s.omega.size(); ++m) w.row({s.k[q][0], s.k[q][1], s.omega[m], A[q][m], F[q][m]});
  }
  auto Nk = momentum_distribution(s), Fk = condensation_amplitude(s);
  {
    CsvWriter w(c.file("nk.csv"), {"kx[1/a]", "ky[1/a]", "N", "F"});
    for (std::size_t q = 0; q < s.k.size(); ++q) w.row({s.k[q][0], s.k[q][1], Nk[q], Fk[q]});
  }
  {
    CsvWriter w(c.file("dos.csv"), {"omega[t]", "N[1/t]"});
    auto dos = density_of_states(s);
    for (std::size_t m = 0; m < s.omega.size(); ++m) w.row({s.omega[m], dos[m]});
  }
  ScalarObservables o = scalar_observables(s, cfg.model);
  auto opt = [](const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); };
  write_json(c.file("scalars.json"), {{"n", o.n},
                                      {"Delta", o.Delta},
                                      {"xi[a]", opt(o.xi)},
                                      {"xi_real_space[a]", opt(o.xi_real)},
                                      {"xi_defined", o.xi.has_value()},
                                      {"flagged_omega", s.flagged_omega}});
  return r.converged ? kOk : kNotConverged;
}

int gibbs_study(Context& c) {
  const RunConfig& cfg = c.cfg;
  PauliOperator H = cfg.gibbs_system == "qubit" ? PauliOperator::single(1, 0, Op1::Num)
                                                : build_cluster_hamiltonian(cfg.model, cfg.initial);
  const GibbsPrepConfig& g = cfg.backend.riera;
  GibbsPrepResult r = prepare_gibbs_riera(H, g, cfg.seed);
  EigenSolution sys = diagonalize(H, 0.0);
  write_json(c.file("gibbs.json"), {{"s_star", r.s_star},
                                    {"achieved_beta", r.achieved_beta},
                                    {"delta_beta", r.delta_beta},
                                    {"effective_beta", effective_beta(r.rho, sys)},
                                    {"trace_distance", r.trace_distance},
                                    {"distance_bound", r.distance_bound},
                                    {"within_bound", r.trace_distance <= r.distance_bound},
                                    {"runs", r.runs},
                                    {"runs_bound", r.runs_bound},
                                    {"window_probability", r.window_probability}});
  GibbsScales sc(sys.energies.maxCoeff() - sys.energies.minCoeff(), g);
  auto states = riera_outcome_states(H, g);
  CsvWriter w(c.file("outcomes.csv"), {"s", "beta[1/t]", "probability"});
  for (std::size_t s = 0; s < states.size(); ++s)
    w.row({double(s), sc.beta_of(static_cast<long>(s), g.q), states[s].trace().real()});
  return kOk;
}

const std::map<std::string, std::function<int(Context&)>>& table() {
  static const std::map<std::string, std::function<int(Context&)>> t = {
      {"solve-cluster", solve_cluster}, {"measure-gf", measure_gf},       {"potthoff-scan", potthoff_scan_cmd},
      {"saddle", saddle_cmd},           {"observables", observables_cmd}, {"gibbs-study", gibbs_study}};
  return t;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"solve-cluster", "measure-gf",  "potthoff-scan",
                                                 "saddle",        "observables", "gibbs-study"};
  return names;
}

int run(const Options& opt, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  Context c;
  try {
    auto it = table().find(opt.command);
    if (it == table().end()) throw ConfigError("unknown command '" + opt.command + "'");
    Json j;
    {
      std::ifstream in(opt.config);
      if (!in) throw ConfigError("config: cannot open " + opt.config);
      try {
        j = Json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
    if (j.is_object()) {
      if (!opt.out.empty()) j["output"] = opt.out;
      if (opt.seed) j["seed"] = *opt.seed;
      if (!opt.backend.empty()) j["backend"]["kind"] = opt.backend;
    }
    c.cfg = parse_config(j);
    if (opt.threads < 0) throw ConfigError("--threads: must be >= 0");
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
    c.dir = c.cfg.output;
    fs::create_directories(c.dir);

    const int code = it->second(c);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json manifest = {{"tool", "qvca"},
                     {"version", kVersion},
                     {"command", opt.command},
                     {"seed", c.cfg.seed},
                     {"threads", omp_get_max_threads()},
                     {"backend", c.cfg.backend.kind},
                     {"grid", {{"dtau", c.cfg.grid.dtau},
                               {"n_max", c.cfg.grid.n_max},
                               {"eta", c.cfg.grid.eta},
                               {"tau_max", c.cfg.grid.tau_max()},
                               {"omega_max", c.cfg.grid.omega_max()},
                               {"domega", c.cfg.grid.domega()}}},
                     {"config", c.cfg.source},
                     {"files", c.files},
                     {"exit_code", code},
                     {"wall_time_s", wall}};
    for (auto& [k, v] : c.extra.items()) manifest[k] = v;
    write_json(c.dir / "manifest.json", manifest);
    if (code == kNotConverged) log << "qvca: saddle point not converged; artifacts written to " << c.dir << '\n';
    return code;
  } catch (const ConfigError& e) {
    log << "qvca: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ResourceError& e) {
    log << "qvca: resource limit: " << e.what() << '\n';
    return kResourceError;
  } catch (const std::exception& e) {
    log << "qvca: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace qvca::cli
