#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "qvca/config.hpp"

namespace qvca {

// Fixed-format number so repeated runs write identical bytes.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw ResourceError("cannot write " + path.string());
    row_strings(header);
  }

  void row(const std::vector<double>& values) {
    std::vector<std::string> s;
    for (double v : values) s.push_back(fmt(v));
    row_strings(s);
  }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  std::ofstream out_;
};

inline void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// One row per omega: omega, then Re/Im of every Nambu entry in row-major order.
inline void write_green(const std::filesystem::path& path, const NambuGreensFunction& g) {
  const int n = g.rows();
  std::vector<std::string> head = {"omega[t]"};
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const std::string e = "G" + std::to_string(a) + std::to_string(b);
      head.push_back(e + "_re[1/t]");
      head.push_back(e + "_im[1/t]");
    }
  CsvWriter w(path, head);
  for (std::size_t m = 0; m < g.omega.size(); ++m) {
    std::vector<double> r = {g.omega[m]};
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        r.push_back(g.G[m](a, b).real());
        r.push_back(g.G[m](a, b).imag());
      }
    w.row(r);
  }
}

inline Json params_json(const VariationalParams& v) {
  return {{"mu_prime", v.mu_prime}, {"delta_prime", v.delta_prime}, {"delta_d_prime", v.delta_d_prime},
          {"M_prime", v.M_prime}};
}

}  // namespace qvca
