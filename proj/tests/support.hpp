#pragma once

// Fixtures and reference arithmetic shared by the test suites. Everything
// here is computed independently of the library's evaluation routines.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "poisgen/poisgen.hpp"

namespace testsupport {

using namespace poisgen;

inline const FieldSpec QQ = FieldSpec::rationals();
inline FieldSpec GF(std::uint32_t p) { return FieldSpec::prime(p); }

template <FieldElement T> T num(long long v, FieldSpec f) { return T::from_int(v, f); }

template <FieldElement T> Element<T> vec(FieldSpec f, std::initializer_list<long long> xs) {
  std::vector<T> c;
  for (long long x : xs)
    c.push_back(T::from_int(x, f));
  return Element<T>(f, std::move(c));
}

// Plain 2x2 integer matrices for the matrix-unit fixtures.
using Mat2 = std::array<std::array<long long, 2>, 2>;

inline Mat2 unit2(int idx) {
  Mat2 m{};
  m[idx / 2][idx % 2] = 1;
  return m;
}
inline Mat2 mul2(const Mat2 &a, const Mat2 &b) {
  Mat2 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        m[i][j] += a[i][k] * b[k][j];
  return m;
}
inline Mat2 sub2(const Mat2 &a, const Mat2 &b) {
  Mat2 m{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m[i][j] = a[i][j] - b[i][j];
  return m;
}

/// M2 over Q on E11, E12, E21, E22 (index 2r+c): composition and commutator.
inline TwoProductAlgebra<Rational> m2_commutator() {
  BilinearOp<Rational> br(QQ, 4), ci(QQ, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Mat2 p = mul2(unit2(i), unit2(j));
      const Mat2 c = sub2(p, mul2(unit2(j), unit2(i)));
      for (int k = 0; k < 4; ++k) {
        ci.set(i, j, k, Rational(p[k / 2][k % 2]));
        br.set(i, j, k, Rational(c[k / 2][k % 2]));
      }
    }
  return TwoProductAlgebra<Rational>(br, ci);
}

/// ad(E11) : f -> E11 f - f E11 as a 4x4 matrix (column j = image of basis j).
inline LinearMap<Rational> m2_ad_e11() {
  LinearMap<Rational> d(QQ, 4);
  for (int j = 0; j < 4; ++j) {
    const Mat2 img = sub2(mul2(unit2(0), unit2(j)), mul2(unit2(j), unit2(0)));
    for (int r = 0; r < 4; ++r)
      d.set(r, j, Rational(img[r / 2][r % 2]));
  }
  return d;
}

/// e1∘e1 = e2, e1∘e2 = e1, zero bracket.
template <FieldElement T> TwoProductAlgebra<T> nonassociative(FieldSpec f) {
  BilinearOp<T> br(f, 2), ci(f, 2);
  ci.set(0, 0, 1, T::one(f));
  ci.set(0, 1, 0, T::one(f));
  return TwoProductAlgebra<T>(br, ci);
}

/// ⟨e1,e1⟩ = e2, zero circle.
inline TwoProductAlgebra<Rational> loday_dim2() {
  BilinearOp<Rational> br(QQ, 2), ci(QQ, 2);
  br.set(0, 0, 1, Rational(1));
  return TwoProductAlgebra<Rational>(br, ci);
}

/// F3, circle k[t]/(t^2) on (1, t), [1,t] = t, D(t) = t. By hand: with
/// x = t, y = z = 1 the Jacobian is t while y∘D(x)∘z = t, so α = 1.
inline TwoProductAlgebra<Residue> f3_unique_alpha() {
  const FieldSpec f = GF(3);
  BilinearOp<Residue> br(f, 2), ci(f, 2);
  br.set(0, 1, 1, Residue(1, f));
  br.set(1, 0, 1, Residue(2, f));
  ci.set(0, 0, 0, Residue(1, f));
  ci.set(0, 1, 1, Residue(1, f));
  ci.set(1, 0, 1, Residue(1, f));
  LinearMap<Residue> d(f, 2);
  d.set(1, 1, Residue(1, f));
  return TwoProductAlgebra<Residue>(br, ci, d);
}

// ---------------------------------------------------------------------------
// Reference linear algebra over a field, written out directly.

template <FieldElement T> using Dense = std::vector<std::vector<T>>;

template <FieldElement T> Dense<T> dense(FieldSpec f, std::size_t n) {
  return Dense<T>(n, std::vector<T>(n, T::zero(f)));
}

/// Gauss-Jordan inverse; empty result if singular.
template <FieldElement T> Dense<T> inverse(Dense<T> a, FieldSpec f) {
  const std::size_t n = a.size();
  Dense<T> inv = dense<T>(f, n);
  for (std::size_t i = 0; i < n; ++i)
    inv[i][i] = T::one(f);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col].is_zero())
      ++piv;
    if (piv == n)
      return {};
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const T s = a[col][col].inverse();
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] = a[col][c] * s;
      inv[col][c] = inv[col][c] * s;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero())
        continue;
      const T m = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] = a[r][c] - m * a[col][c];
        inv[r][c] = inv[r][c] - m * inv[col][c];
      }
    }
  }
  return inv;
}

/// Rewrites the algebra in the basis f_i = Σ_r P[r][i] e_r.
template <FieldElement T> TwoProductAlgebra<T> change_basis(const TwoProductAlgebra<T> &a, const Dense<T> &P) {
  const FieldSpec f = a.field();
  const std::size_t n = a.dim();
  const Dense<T> Q = inverse(P, f);
  auto conj = [&](const BilinearOp<T> &op) {
    BilinearOp<T> out(f, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<T> old(n, T::zero(f)); // f_i * f_j in e-coordinates
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t)
              old[t] = old[t] + P[r][i] * P[s][j] * op.at(r, s, t);
        for (std::size_t k = 0; k < n; ++k) {
          T v = T::zero(f);
          for (std::size_t t = 0; t < n; ++t)
            v = v + Q[k][t] * old[t];
          out.set(i, j, k, v);
        }
      }
    return out;
  };
  std::optional<LinearMap<T>> d;
  if (a.derivation()) {
    d.emplace(f, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        T v = T::zero(f);
        for (std::size_t s = 0; s < n; ++s)
          for (std::size_t t = 0; t < n; ++t)
            v = v + Q[r][s] * a.derivation()->at(s, t) * P[t][c];
        d->set(r, c, v);
      }
  }
  return TwoProductAlgebra<T>(conj(a.bracket()), conj(a.circle()), d, a.alpha());
}

// ---------------------------------------------------------------------------
// Random generators (fixed seeds at call sites).

using Rng = std::mt19937_64;

inline long long small_int(Rng &rng, long long lo, long long hi) {
  return std::uniform_int_distribution<long long>(lo, hi)(rng);
}

template <FieldElement T> T random_scalar(Rng &rng, FieldSpec f) {
  if (f.is_finite())
    return T::from_int(small_int(rng, 0, f.characteristic() - 1), f);
  return T::from_int(small_int(rng, -3, 3), f);
}

/// Each coefficient nonzero with probability `density`.
template <FieldElement T> BilinearOp<T> random_op(Rng &rng, FieldSpec f, std::size_t n, double density = 1.0) {
  BilinearOp<T> op(f, n);
  std::bernoulli_distribution keep(density);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (keep(rng))
          op.set(i, j, k, random_scalar<T>(rng, f));
  return op;
}

template <FieldElement T> LinearMap<T> random_map(Rng &rng, FieldSpec f, std::size_t n, double density = 1.0) {
  LinearMap<T> d(f, n);
  std::bernoulli_distribution keep(density);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (keep(rng))
        d.set(r, c, random_scalar<T>(rng, f));
  return d;
}

/// Invertible matrix over Q with small entries.
inline Dense<Rational> random_invertible(Rng &rng, std::size_t n) {
  for (;;) {
    Dense<Rational> p = dense<Rational>(QQ, n);
    for (auto &row : p)
      for (auto &v : row)
        v = Rational(small_int(rng, -2, 2));
    if (!inverse(p, QQ).empty())
      return p;
  }
}

/// Lie brackets over Q by conjugating a few known ones.
inline BilinearOp<Rational> random_lie(Rng &rng, std::size_t n) {
  BilinearOp<Rational> br(QQ, n);
  auto put = [&](std::size_t i, std::size_t j, std::size_t k, long long v) {
    br.set(i, j, k, Rational(v));
    br.set(j, i, k, Rational(-v));
  };
  switch (small_int(rng, 0, n >= 3 ? 3 : 1)) {
  case 0: break;                   // abelian
  case 1: put(0, 1, 1, 1); break;  // [e1,e2] = e2
  case 2: put(0, 1, 2, 1); break;  // Heisenberg
  default:                         // so(3)
    put(0, 1, 2, 1);
    put(1, 2, 0, 1);
    put(2, 0, 1, 1);
  }
  TwoProductAlgebra<Rational> a(br, BilinearOp<Rational>(QQ, n));
  return change_basis(a, random_invertible(rng, n)).bracket();
}

/// Commutative associative products over Q: direct sums of k[t]/(t^j) and
/// null blocks, then a random basis change.
inline BilinearOp<Rational> random_commutative_associative(Rng &rng, std::size_t n) {
  BilinearOp<Rational> ci(QQ, n);
  std::size_t start = 0;
  while (start < n) {
    const std::size_t len = static_cast<std::size_t>(small_int(rng, 1, static_cast<long long>(n - start)));
    if (small_int(rng, 0, 3) > 0) // truncated polynomial ring, unit t^0
      for (std::size_t a = 0; a < len; ++a)
        for (std::size_t b = 0; a + b < len; ++b)
          ci.set(start + a, start + b, start + a + b, Rational(1));
    start += len;
  }
  TwoProductAlgebra<Rational> a(BilinearOp<Rational>(QQ, n), ci);
  return change_basis(a, random_invertible(rng, n)).circle();
}

} // namespace testsupport
