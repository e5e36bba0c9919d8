#pragma once

#include <Eigen/Dense>
#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qvca/errors.hpp"

namespace qvca {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kCanonicalTol = 1e-12;

// Single-qubit symbols accepted by the tensor-product builders.
enum class Op1 { I, X, Y, Z, Plus, Minus, Num };

// Hermitian Pauli basis element on n qubits, stored as x/z bit masks with
// P = i^{x&z} X^x Z^z per qubit (so Y = iXZ). Bit q is qubit q; qubit 0 is
// the rightmost tensor factor.
struct PauliString {
  int n = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  char factor(int q) const {
    bool bx = (x >> q) & 1U, bz = (z >> q) & 1U;
    if (bx && bz) return 'Y';
    if (bx) return 'X';
    if (bz) return 'Z';
    return 'I';
  }

  std::string str() const {
    std::string s;
    for (int q = n - 1; q >= 0; --q) s.push_back(factor(q));
    return s;
  }

  bool is_identity() const { return x == 0 && z == 0; }

  auto key() const { return std::make_pair(x, z); }
  bool operator==(const PauliString& o) const { return n == o.n && x == o.x && z == o.z; }
};

inline cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// a * b = phase * c
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  require(a.n == b.n, "pauli product: qubit count mismatch");
  PauliString c{a.n, a.x ^ b.x, a.z ^ b.z};
  int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) + 2 * std::popcount(a.z & b.x) -
          std::popcount(c.x & c.z);
  return {i_pow(e), c};
}

inline bool commutes(const PauliString& a, const PauliString& b) {
  return (std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) % 2 == 0;
}

class PauliOperator {
 public:
  using Key = std::pair<std::uint64_t, std::uint64_t>;

  PauliOperator() = default;
  explicit PauliOperator(int n) : n_(n) { require(n >= 0 && n <= 62, "pauli: qubit count out of range"); }

  static PauliOperator identity(int n, cplx c = 1.0) {
    PauliOperator p(n);
    p.add_term(PauliString{n, 0, 0}, c);
    return p;
  }

  static PauliOperator from_string(const PauliString& s, cplx c = 1.0) {
    PauliOperator p(s.n);
    p.add_term(s, c);
    return p;
  }

  // Tensor product; factors[0] is the leftmost (highest qubit).
  static PauliOperator tensor(const std::vector<Op1>& factors) {
    const int n = static_cast<int>(factors.size());
    PauliOperator acc = identity(n);
    for (int k = 0; k < n; ++k) {
      int q = n - 1 - k;
      acc = acc * single(n, q, factors[k]);
    }
    return acc;
  }

  static PauliOperator single(int n, int q, Op1 op) {
    require(q >= 0 && q < n, "pauli: qubit index out of range");
    const std::uint64_t bit = std::uint64_t{1} << q;
    PauliString I{n, 0, 0}, X{n, bit, 0}, Y{n, bit, bit}, Z{n, 0, bit};
    PauliOperator p(n);
    switch (op) {
      case Op1::I: p.add_term(I, 1.0); break;
      case Op1::X: p.add_term(X, 1.0); break;
      case Op1::Y: p.add_term(Y, 1.0); break;
      case Op1::Z: p.add_term(Z, 1.0); break;
      case Op1::Plus:
        p.add_term(X, 0.5);
        p.add_term(Y, cplx(0, 0.5));
        break;
      case Op1::Minus:
        p.add_term(X, 0.5);
        p.add_term(Y, cplx(0, -0.5));
        break;
      case Op1::Num:
        p.add_term(I, 0.5);
        p.add_term(Z, 0.5);
        break;
    }
    return p;
  }

  int qubits() const { return n_; }
  const std::map<Key, cplx>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  cplx coefficient(const PauliString& s) const {
    auto it = terms_.find(s.key());
    return it == terms_.end() ? cplx{} : it->second;
  }

  std::vector<std::pair<cplx, PauliString>> term_list() const {
    std::vector<std::pair<cplx, PauliString>> out;
    for (auto& [k, c] : terms_) out.push_back({c, PauliString{n_, k.first, k.second}});
    return out;
  }

  PauliOperator operator+(const PauliOperator& o) const {
    check_size(o);
    PauliOperator r = *this;
    for (auto& [k, c] : o.terms_) r.accumulate(k, c);
    r.prune();
    return r;
  }

  PauliOperator operator-(const PauliOperator& o) const { return *this + o * cplx(-1.0); }

  PauliOperator operator*(cplx s) const {
    PauliOperator r(n_);
    for (auto& [k, c] : terms_) r.accumulate(k, c * s);
    r.prune();
    return r;
  }

  PauliOperator operator*(const PauliOperator& o) const {
    check_size(o);
    PauliOperator r(n_);
    for (auto& [ka, ca] : terms_) {
      PauliString a{n_, ka.first, ka.second};
      for (auto& [kb, cb] : o.terms_) {
        auto [ph, s] = multiply(a, PauliString{n_, kb.first, kb.second});
        r.accumulate(s.key(), ph * ca * cb);
      }
    }
    r.prune();
    return r;
  }

  PauliOperator& operator+=(const PauliOperator& o) { return *this = *this + o; }

  PauliOperator adjoint() const {
    PauliOperator r(n_);
    for (auto& [k, c] : terms_) r.terms_[k] = std::conj(c);
    return r;
  }

  bool is_hermitian(double tol = kCanonicalTol) const {
    for (auto& [k, c] : terms_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

  bool approx_equal(const PauliOperator& o, double tol = kCanonicalTol) const {
    return (*this - o).max_abs_coefficient() <= tol;
  }

  double max_abs_coefficient() const {
    double m = 0;
    for (auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  // Sum of coefficient magnitudes; an upper bound on the operator norm.
  double one_norm() const {
    double s = 0;
    for (auto& [k, c] : terms_) s += std::abs(c);
    return s;
  }

  // Re-indexes onto a larger register, shifting qubit q to q + offset.
  PauliOperator embed(int n_total, int offset) const {
    require(offset >= 0 && offset + n_ <= n_total, "pauli: embed out of range");
    PauliOperator r(n_total);
    for (auto& [k, c] : terms_) r.terms_[{k.first << offset, k.second << offset}] = c;
    return r;
  }

  CMatrix to_matrix() const {
    const std::size_t dim = std::size_t{1} << n_;
    CMatrix m = CMatrix::Zero(dim, dim);
    for (auto& [k, c] : terms_) {
      const auto [x, z] = k;
      const cplx base = c * i_pow(std::popcount(x & z));
      for (std::size_t b = 0; b < dim; ++b) {
        double sign = (std::popcount(b & z) % 2) ? -1.0 : 1.0;
        m(b ^ x, b) += sign * base;
      }
    }
    return m;
  }

  std::string str() const {
    std::string s;
    for (auto& [k, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + std::to_string(c.real()) + (c.imag() < 0 ? "" : "+") + std::to_string(c.imag()) + "i)" +
           PauliString{n_, k.first, k.second}.str();
    }
    return s.empty() ? "0" : s;
  }

 private:
  void check_size(const PauliOperator& o) const { require(n_ == o.n_, "pauli: qubit count mismatch"); }

  void add_term(const PauliString& s, cplx c) {
    accumulate(s.key(), c);
    prune();
  }

  void accumulate(const Key& k, cplx c) { terms_[k] += c; }

  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < kCanonicalTol)
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  int n_ = 0;
  std::map<Key, cplx> terms_;
};

inline PauliOperator operator*(cplx s, const PauliOperator& p) { return p * s; }
inline PauliOperator operator*(double s, const PauliOperator& p) { return p * cplx(s); }

inline PauliOperator commutator(const PauliOperator& a, const PauliOperator& b) { return a * b - b * a; }
inline PauliOperator anticommutator(const PauliOperator& a, const PauliOperator& b) { return a * b + b * a; }

}  // namespace qvca
