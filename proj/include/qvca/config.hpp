#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "qvca/gibbs_prep.hpp"
#include "qvca/greens.hpp"
#include "qvca/vca.hpp"

namespace qvca {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

struct BackendConfig {
  std::string kind = "ed";            // ed | emulator
  std::string evolution = "exact";    // exact | trotter
  int n_T = 1;
  std::string gibbs = "exact";        // exact | riera
  GibbsPrepConfig riera;
  long shots = 0;
};

struct ScanConfig {
  double mu_min = -1, mu_max = 1;
  double delta_min = -0.5, delta_max = 0.5;
  int points = 21;
};

struct RunConfig {
  ClusterModel model;
  VariationalParams initial{0.2, 0.1, 0, 0};
  SaddleOptions solver;
  bool optimize = true;
  TimeGrid grid;
  BackendConfig backend;
  ScanConfig scan;
  std::string gibbs_system = "qubit";  // qubit (H' = sigma_n) | cluster
  std::string output = "out";
  std::uint64_t seed = 0;
  Json source;
};

namespace detail {

inline void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(where + "." + k + ": unknown key");
}

template <class T>
void read(const Json& j, const std::string& where, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

inline void positive(double x, const std::string& name) {
  if (!(x > 0)) throw ConfigError(name + ": must be positive");
}

inline void one_of(const std::string& x, const std::string& name, std::initializer_list<const char*> options) {
  for (auto* o : options)
    if (x == o) return;
  throw ConfigError(name + ": invalid value '" + x + "'");
}

}  // namespace detail

inline Field parse_field(const std::string& name) {
  for (Field f : {Field::MuPrime, Field::DeltaPrime, Field::DeltaDPrime, Field::MPrime})
    if (field_name(f) == name) return f;
  throw ConfigError("variational.active: unknown field '" + name + "'");
}

// Parses and validates every block before anything is computed.
inline RunConfig parse_config(const Json& j) {
  using namespace detail;
  RunConfig c;
  c.source = j;
  check_keys(j, "config", {"model", "variational", "grid", "backend", "solver", "scan", "gibbs_study", "output", "seed"});
  if (!j.contains("model")) throw ConfigError("config.model: required block missing");

  const Json& m = j["model"];
  check_keys(m, "model", {"dimension", "Lc", "Nc", "a", "t", "U", "mu", "T"});
  read(m, "model", "dimension", c.model.dimension);
  read(m, "model", "Lc", c.model.Lc);
  read(m, "model", "Nc", c.model.Nc);
  read(m, "model", "a", c.model.a);
  read(m, "model", "t", c.model.t);
  read(m, "model", "U", c.model.U);
  read(m, "model", "mu", c.model.mu);
  read(m, "model", "T", c.model.T);
  c.model.validate();
  if (c.model.qubits() > kMaxDenseQubits) throw ConfigError("model.Lc: cluster exceeds the dense qubit limit");

  if (j.contains("variational")) {
    const Json& v = j["variational"];
    check_keys(v, "variational", {"initial", "active", "bound", "optimize"});
    if (v.contains("initial")) {
      const Json& i = v["initial"];
      check_keys(i, "variational.initial", {"mu_prime", "delta_prime", "delta_d_prime", "M_prime"});
      read(i, "variational.initial", "mu_prime", c.initial.mu_prime);
      read(i, "variational.initial", "delta_prime", c.initial.delta_prime);
      read(i, "variational.initial", "delta_d_prime", c.initial.delta_d_prime);
      read(i, "variational.initial", "M_prime", c.initial.M_prime);
    }
    if (v.contains("active")) {
      std::vector<std::string> names;
      read(v, "variational", "active", names);
      if (names.empty()) throw ConfigError("variational.active: at least one field required");
      c.solver.active.clear();
      for (auto& n : names) c.solver.active.push_back(parse_field(n));
    }
    read(v, "variational", "bound", c.solver.bound);
    positive(c.solver.bound, "variational.bound");
    read(v, "variational", "optimize", c.optimize);
  }
  try {
    check_fields(c.model, c.initial);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("variational.initial: ") + e.what());
  }
  for (Field f : c.solver.active) {
    if (std::abs(field(c.initial, f)) > c.solver.bound)
      throw ConfigError("variational.initial." + field_name(f) + ": outside the bound");
    if (c.model.dimension == 1 && (f == Field::DeltaDPrime || f == Field::MPrime))
      throw ConfigError("variational.active: " + field_name(f) + " requires the 2x2 cluster");
  }

  if (j.contains("grid")) {
    const Json& g = j["grid"];
    check_keys(g, "grid", {"dtau", "n_max", "eta"});
    read(g, "grid", "dtau", c.grid.dtau);
    read(g, "grid", "n_max", c.grid.n_max);
    read(g, "grid", "eta", c.grid.eta);
  }
  c.grid.validate();
  if (!(c.grid.eta > 0)) throw ConfigError("grid.eta: must be positive");

  if (j.contains("backend")) {
    const Json& b = j["backend"];
    check_keys(b, "backend", {"kind", "evolution", "n_T", "gibbs", "riera", "shots"});
    read(b, "backend", "kind", c.backend.kind);
    read(b, "backend", "evolution", c.backend.evolution);
    read(b, "backend", "n_T", c.backend.n_T);
    read(b, "backend", "gibbs", c.backend.gibbs);
    read(b, "backend", "shots", c.backend.shots);
    if (b.contains("riera")) {
      const Json& r = b["riera"];
      check_keys(r, "backend.riera", {"m", "r", "q", "lambda", "target_beta", "max_runs"});
      read(r, "backend.riera", "m", c.backend.riera.m);
      read(r, "backend.riera", "r", c.backend.riera.r);
      read(r, "backend.riera", "q", c.backend.riera.q);
      read(r, "backend.riera", "lambda", c.backend.riera.lambda);
      read(r, "backend.riera", "target_beta", c.backend.riera.target_beta);
      read(r, "backend.riera", "max_runs", c.backend.riera.max_runs);
    }
  }
  one_of(c.backend.kind, "backend.kind", {"ed", "emulator"});
  one_of(c.backend.evolution, "backend.evolution", {"exact", "trotter"});
  one_of(c.backend.gibbs, "backend.gibbs", {"exact", "riera"});
  if (c.backend.n_T < 1) throw ConfigError("backend.n_T: must be >= 1");
  if (c.backend.shots < 0) throw ConfigError("backend.shots: must be >= 0");
  c.backend.riera.validate();

  if (j.contains("solver")) {
    const Json& s = j["solver"];
    check_keys(s, "solver", {"h", "eps_omega", "max_iter"});
    read(s, "solver", "h", c.solver.h);
    read(s, "solver", "eps_omega", c.solver.eps_omega);
    read(s, "solver", "max_iter", c.solver.max_iter);
  }
  positive(c.solver.h, "solver.h");
  positive(c.solver.eps_omega, "solver.eps_omega");
  if (c.solver.max_iter < 0) throw ConfigError("solver.max_iter: must be >= 0");

  if (j.contains("scan")) {
    const Json& s = j["scan"];
    check_keys(s, "scan", {"mu_min", "mu_max", "delta_min", "delta_max", "points"});
    read(s, "scan", "mu_min", c.scan.mu_min);
    read(s, "scan", "mu_max", c.scan.mu_max);
    read(s, "scan", "delta_min", c.scan.delta_min);
    read(s, "scan", "delta_max", c.scan.delta_max);
    read(s, "scan", "points", c.scan.points);
  }
  if (!(c.scan.mu_max > c.scan.mu_min)) throw ConfigError("scan.mu_max: must exceed scan.mu_min");
  if (!(c.scan.delta_max > c.scan.delta_min)) throw ConfigError("scan.delta_max: must exceed scan.delta_min");
  if (c.scan.points < 2) throw ConfigError("scan.points: must be >= 2");

  if (j.contains("gibbs_study")) {
    const Json& g = j["gibbs_study"];
    check_keys(g, "gibbs_study", {"system"});
    read(g, "gibbs_study", "system", c.gibbs_system);
  }
  one_of(c.gibbs_system, "gibbs_study.system", {"qubit", "cluster"});

  read(j, "config", "output", c.output);
  if (c.output.empty()) throw ConfigError("config.output: must not be empty");
  read(j, "config", "seed", c.seed);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace qvca
