#pragma once

#include <utility>
#include <vector>

#include "qvca/pauli.hpp"

namespace qvca {

enum class Spin { Up, Down };

// Register layout: spin-up orbital i on qubit i-1, spin-down orbital i on
// qubit Lc+i-1, with a sigma_z string on every lower qubit.
inline int jw_qubit(int site, Spin spin, int Lc) { return (spin == Spin::Up ? 0 : Lc) + site - 1; }

inline void check_site(int site, int Lc) {
  require(Lc >= 1, "jw: cluster size must be positive");
  require(site >= 1 && site <= Lc, "jw: site out of range");
}

inline PauliOperator jw_create(int site, Spin spin, int Lc) {
  check_site(site, Lc);
  const int n = 2 * Lc, q = jw_qubit(site, spin, Lc);
  std::vector<Op1> f(n, Op1::I);
  f[n - 1 - q] = Op1::Plus;
  for (int k = 0; k < q; ++k) f[n - 1 - k] = Op1::Z;
  return PauliOperator::tensor(f);
}

inline PauliOperator jw_annihilate(int site, Spin spin, int Lc) { return jw_create(site, spin, Lc).adjoint(); }

inline PauliOperator jw_number(int site, Spin spin, int Lc) {
  return jw_create(site, spin, Lc) * jw_annihilate(site, spin, Lc);
}

struct HermitianPair {
  PauliOperator X;
  PauliOperator Y;
};

// X = c + c^dagger, Y = -i (c - c^dagger).
inline HermitianPair jw_hermitian_pair(int site, Spin spin, int Lc) {
  PauliOperator cd = jw_create(site, spin, Lc), c = cd.adjoint();
  return {c + cd, (c - cd) * cplx(0, -1)};
}

enum class StringKind { Hop, Local, Pair };

// Building blocks on an Lc-qubit half register. Hop requires i > j; Local
// ignores j.
inline PauliOperator pauli_strings_T_D(int i, int j, int Lc, StringKind kind) {
  check_site(i, Lc);
  if (kind != StringKind::Local) check_site(j, Lc);
  switch (kind) {
    case StringKind::Local: {
      std::vector<Op1> f(Lc, Op1::I);
      f[Lc - i] = Op1::Num;
      return PauliOperator::tensor(f);
    }
    case StringKind::Hop: {
      require(i > j, "jw: hop string requires i > j");
      auto build = [&](Op1 hi, Op1 lo) {
        std::vector<Op1> f(Lc, Op1::I);
        f[Lc - i] = hi;
        for (int k = Lc - i + 1; k < Lc - j; ++k) f[k] = Op1::Z;
        f[Lc - j] = lo;
        return PauliOperator::tensor(f);
      };
      return build(Op1::Plus, Op1::Minus) + build(Op1::Minus, Op1::Plus);
    }
    case StringKind::Pair: {
      // Spans both halves: I^{Lc-j} (s z^{Lc-i+j-1} s) I^{i-1} on 2Lc qubits.
      const int n = 2 * Lc;
      auto build = [&](Op1 s) {
        std::vector<Op1> f(n, Op1::I);
        const int first = Lc - j, last = n - i;
        f[first] = s;
        for (int k = first + 1; k < last; ++k) f[k] = Op1::Z;
        f[last] = s;
        return PauliOperator::tensor(f);
      };
      return build(Op1::Plus) + build(Op1::Minus);
    }
  }
  return PauliOperator(Lc);
}

// Places an Lc-qubit operator on the spin-up (low) or spin-down (high) half.
inline PauliOperator on_half(const PauliOperator& half, Spin spin) {
  const int Lc = half.qubits();
  return half.embed(2 * Lc, spin == Spin::Up ? 0 : Lc);
}

}  // namespace qvca
