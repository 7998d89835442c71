#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poisgen/errors.hpp"
#include "poisgen/scalar.hpp"

namespace poisgen {

namespace detail {

inline void require_same_dim(std::size_t a, std::size_t b, const char *what) {
  if (a != b)
    throw InputError(std::string("dimension mismatch in ") + what + ": " +
                     std::to_string(a) + " vs " + std::to_string(b));
}

inline void require_same_field(FieldSpec a, FieldSpec b, const char *what) {
  if (a != b)
    throw InputError(std::string("field mismatch in ") + what + ": " + a.to_string() +
                     " vs " + b.to_string());
}

} // namespace detail

/// Coordinate vector with respect to the basis e_1..e_n.
template <FieldElement T> class Element {
public:
  Element(FieldSpec field, std::size_t dim) : field_(field), coords_(dim, T::zero(field)) {}
  Element(FieldSpec field, std::vector<T> coords) : field_(field), coords_(std::move(coords)) {
    for (const auto &c : coords_)
      detail::require_same_field(field_, c.field(), "element coordinates");
  }

  /// e_{index+1}
  static Element basis(FieldSpec field, std::size_t dim, std::size_t index) {
    Element e(field, dim);
    e.coords_.at(index) = T::one(field);
    return e;
  }

  FieldSpec field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return coords_.size(); }
  std::span<const T> coords() const noexcept { return coords_; }
  const T &operator[](std::size_t i) const { return coords_[i]; }
  T &operator[](std::size_t i) { return coords_[i]; }

  bool is_zero() const {
    for (const auto &c : coords_)
      if (!c.is_zero())
        return false;
    return true;
  }

  Element &operator+=(const Element &o) {
    detail::require_same_dim(dim(), o.dim(), "element sum");
    for (std::size_t i = 0; i < dim(); ++i)
      if (!o.coords_[i].is_zero())
        coords_[i] += o.coords_[i];
    return *this;
  }
  Element &operator-=(const Element &o) {
    detail::require_same_dim(dim(), o.dim(), "element difference");
    for (std::size_t i = 0; i < dim(); ++i)
      if (!o.coords_[i].is_zero())
        coords_[i] -= o.coords_[i];
    return *this;
  }
  Element &operator*=(const T &s) {
    for (auto &c : coords_)
      if (!c.is_zero())
        c *= s;
    return *this;
  }

  friend Element operator+(Element a, const Element &b) { return a += b; }
  friend Element operator-(Element a, const Element &b) { return a -= b; }
  friend Element operator*(const T &s, Element a) { return a *= s; }
  friend Element operator-(Element a) {
    for (auto &c : a.coords_)
      c = -c;
    return a;
  }
  friend bool operator==(const Element &a, const Element &b) {
    return a.field_ == b.field_ && a.coords_ == b.coords_;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < dim(); ++i) {
      if (i)
        s += ", ";
      s += coords_[i].to_string();
    }
    return s + ")";
  }

private:
  FieldSpec field_;
  std::vector<T> coords_;
};

/// Structure constants of a bilinear product: e_i * e_j = sum_k c[i][j][k] e_k.
/// Indices are 0-based in code; witnesses reported to users are 1-based.
template <FieldElement T> class BilinearOp {
public:
  BilinearOp(FieldSpec field, std::size_t dim)
      : field_(field), dim_(dim), c_(dim * dim * dim, T::zero(field)) {
    if (dim == 0)
      throw InputError("dimension must be positive");
  }

  FieldSpec field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return dim_; }

  const T &at(std::size_t i, std::size_t j, std::size_t k) const { return c_[index(i, j, k)]; }
  void set(std::size_t i, std::size_t j, std::size_t k, T value) {
    detail::require_same_field(field_, value.field(), "structure constant");
    c_[index(i, j, k)] = std::move(value);
  }

  /// Coefficients of e_i * e_j.
  std::span<const T> product(std::size_t i, std::size_t j) const {
    return std::span<const T>(c_).subspan(index(i, j, 0), dim_);
  }
  std::span<const T> coefficients() const noexcept { return c_; }

  bool is_zero() const {
    for (const auto &c : c_)
      if (!c.is_zero())
        return false;
    return true;
  }

  friend bool operator==(const BilinearOp &, const BilinearOp &) = default;

private:
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * dim_ + j) * dim_ + k;
  }

  FieldSpec field_;
  std::size_t dim_;
  std::vector<T> c_;
};

/// Square matrix acting on coordinates; column j is the image of e_j.
template <FieldElement T> class LinearMap {
public:
  LinearMap(FieldSpec field, std::size_t dim) : field_(field), dim_(dim), m_(dim * dim, T::zero(field)) {
    if (dim == 0)
      throw InputError("dimension must be positive");
  }

  static LinearMap identity(FieldSpec field, std::size_t dim) {
    LinearMap m(field, dim);
    for (std::size_t i = 0; i < dim; ++i)
      m.set(i, i, T::one(field));
    return m;
  }

  FieldSpec field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return dim_; }
  const T &at(std::size_t row, std::size_t col) const { return m_[row * dim_ + col]; }
  void set(std::size_t row, std::size_t col, T value) {
    detail::require_same_field(field_, value.field(), "matrix entry");
    m_[row * dim_ + col] = std::move(value);
  }

  Element<T> column(std::size_t col) const {
    Element<T> e(field_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      e[r] = at(r, col);
    return e;
  }

  bool is_zero() const {
    for (const auto &c : m_)
      if (!c.is_zero())
        return false;
    return true;
  }

  friend bool operator==(const LinearMap &, const LinearMap &) = default;

private:
  FieldSpec field_;
  std::size_t dim_;
  std::vector<T> m_;
};

/// A vector space carrying a bracket (square or angle, depending on which
/// definition it is checked against), a circle product, and optionally a
/// derivation D and a scalar alpha.
template <FieldElement T> class TwoProductAlgebra {
public:
  using scalar_type = T;

  TwoProductAlgebra(BilinearOp<T> bracket, BilinearOp<T> circle,
                    std::optional<LinearMap<T>> derivation = std::nullopt,
                    std::optional<T> alpha = std::nullopt)
      : bracket_(std::move(bracket)), circle_(std::move(circle)),
        derivation_(std::move(derivation)), alpha_(std::move(alpha)) {
    detail::require_same_dim(bracket_.dim(), circle_.dim(), "algebra products");
    detail::require_same_field(bracket_.field(), circle_.field(), "algebra products");
    if (derivation_) {
      detail::require_same_dim(bracket_.dim(), derivation_->dim(), "derivation");
      detail::require_same_field(bracket_.field(), derivation_->field(), "derivation");
    }
    if (alpha_)
      detail::require_same_field(bracket_.field(), alpha_->field(), "alpha");
  }

  /// All products zero, no derivation.
  static TwoProductAlgebra zero(FieldSpec field, std::size_t dim) {
    return TwoProductAlgebra(BilinearOp<T>(field, dim), BilinearOp<T>(field, dim));
  }

  FieldSpec field() const noexcept { return bracket_.field(); }
  std::size_t dim() const noexcept { return bracket_.dim(); }
  const BilinearOp<T> &bracket() const noexcept { return bracket_; }
  const BilinearOp<T> &circle() const noexcept { return circle_; }
  const std::optional<LinearMap<T>> &derivation() const noexcept { return derivation_; }
  const std::optional<T> &alpha() const noexcept { return alpha_; }

  TwoProductAlgebra with_derivation(std::optional<LinearMap<T>> d) const {
    return TwoProductAlgebra(bracket_, circle_, std::move(d), alpha_);
  }
  TwoProductAlgebra with_alpha(std::optional<T> a) const {
    return TwoProductAlgebra(bracket_, circle_, derivation_, std::move(a));
  }

  Element<T> basis(std::size_t index) const { return Element<T>::basis(field(), dim(), index); }

private:
  BilinearOp<T> bracket_;
  BilinearOp<T> circle_;
  std::optional<LinearMap<T>> derivation_;
  std::optional<T> alpha_;
};

/// Outcome of a basis-level axiom check. On failure, `witness` holds the
/// lexicographically smallest failing basis tuple (1-based) and `residual`
/// the offending left-minus-right value there.
template <FieldElement T> struct AxiomCheck {
  bool holds = true;
  std::string axiom;
  std::vector<std::size_t> witness;
  std::optional<Element<T>> residual;

  explicit operator bool() const noexcept { return holds; }

  static AxiomCheck pass(std::string axiom) { return AxiomCheck{true, std::move(axiom), {}, std::nullopt}; }
  static AxiomCheck fail(std::string axiom, std::vector<std::size_t> witness, Element<T> residual) {
    return AxiomCheck{false, std::move(axiom), std::move(witness), std::move(residual)};
  }
};

// ---------------------------------------------------------------------------
// Evaluation

template <FieldElement T>
Element<T> eval_bilinear(const BilinearOp<T> &op, const Element<T> &x, const Element<T> &y) {
  detail::require_same_dim(op.dim(), x.dim(), "bilinear evaluation");
  detail::require_same_dim(op.dim(), y.dim(), "bilinear evaluation");
  const std::size_t n = op.dim();
  Element<T> out(op.field(), n);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i].is_zero())
      continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (y[j].is_zero())
        continue;
      const auto row = op.product(i, j);
      std::optional<T> weight;
      for (std::size_t k = 0; k < n; ++k) {
        if (row[k].is_zero())
          continue;
        if (!weight)
          weight = x[i] * y[j];
        out[k] += *weight * row[k];
      }
    }
  }
  return out;
}

template <FieldElement T> Element<T> eval_linear(const LinearMap<T> &d, const Element<T> &x) {
  detail::require_same_dim(d.dim(), x.dim(), "linear map evaluation");
  const std::size_t n = d.dim();
  Element<T> out(d.field(), n);
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j].is_zero())
      continue;
    for (std::size_t i = 0; i < n; ++i)
      if (!d.at(i, j).is_zero())
        out[i] += d.at(i, j) * x[j];
  }
  return out;
}

/// (x∘y)∘z. Tails are read with left association.
template <FieldElement T>
Element<T> triple_circle(const TwoProductAlgebra<T> &a, const Element<T> &x, const Element<T> &y,
                         const Element<T> &z) {
  return eval_bilinear(a.circle(), eval_bilinear(a.circle(), x, y), z);
}

// ---------------------------------------------------------------------------
// Base axioms

template <FieldElement T> AxiomCheck<T> is_associative(const BilinearOp<T> &op) {
  const std::size_t n = op.dim();
  const FieldSpec f = op.field();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = Element<T>::basis(f, n, i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto ej = Element<T>::basis(f, n, j);
      const auto ij = eval_bilinear(op, ei, ej);
      for (std::size_t k = 0; k < n; ++k) {
        const auto ek = Element<T>::basis(f, n, k);
        auto r = eval_bilinear(op, ij, ek) - eval_bilinear(op, ei, eval_bilinear(op, ej, ek));
        if (!r.is_zero())
          return AxiomCheck<T>::fail("associativity", {i + 1, j + 1, k + 1}, std::move(r));
      }
    }
  }
  return AxiomCheck<T>::pass("associativity");
}

template <FieldElement T> AxiomCheck<T> is_commutative(const BilinearOp<T> &op) {
  const std::size_t n = op.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Element<T> r(op.field(), n);
      for (std::size_t k = 0; k < n; ++k)
        r[k] = op.at(i, j, k) - op.at(j, i, k);
      if (!r.is_zero())
        return AxiomCheck<T>::fail("commutativity", {i + 1, j + 1}, std::move(r));
    }
  return AxiomCheck<T>::pass("commutativity");
}

/// [e_i, e_i] = 0 and [e_i, e_j] = -[e_j, e_i]; equivalent to [x, x] = 0 for
/// every x in any characteristic. Witness pairs (i, j) have i <= j.
template <FieldElement T> AxiomCheck<T> is_alternating(const BilinearOp<T> &op) {
  const std::size_t n = op.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Element<T> r(op.field(), n);
      for (std::size_t k = 0; k < n; ++k)
        r[k] = i == j ? op.at(i, i, k) : op.at(i, j, k) + op.at(j, i, k);
      if (!r.is_zero())
        return AxiomCheck<T>::fail("alternating", {i + 1, j + 1}, std::move(r));
    }
  return AxiomCheck<T>::pass("alternating");
}

/// [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] = 0.
template <FieldElement T> AxiomCheck<T> satisfies_jacobi(const BilinearOp<T> &op) {
  const std::size_t n = op.dim();
  const FieldSpec f = op.field();
  auto e = [&](std::size_t i) { return Element<T>::basis(f, n, i); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        auto r = eval_bilinear(op, e(i), eval_bilinear(op, e(j), e(k))) +
                 eval_bilinear(op, e(j), eval_bilinear(op, e(k), e(i))) +
                 eval_bilinear(op, e(k), eval_bilinear(op, e(i), e(j)));
        if (!r.is_zero())
          return AxiomCheck<T>::fail("jacobi", {i + 1, j + 1, k + 1}, std::move(r));
      }
  return AxiomCheck<T>::pass("jacobi");
}

/// Alternating, then Jacobi; the result's `axiom` names the failed part.
template <FieldElement T> AxiomCheck<T> is_lie(const BilinearOp<T> &op) {
  auto alt = is_alternating(op);
  if (!alt)
    return alt;
  return satisfies_jacobi(op);
}

/// <x,<y,z>> = <<x,y>,z> - <<x,z>,y>.
template <FieldElement T> AxiomCheck<T> is_right_leibniz(const BilinearOp<T> &op) {
  const std::size_t n = op.dim();
  const FieldSpec f = op.field();
  auto e = [&](std::size_t i) { return Element<T>::basis(f, n, i); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        auto r = eval_bilinear(op, e(i), eval_bilinear(op, e(j), e(k))) -
                 eval_bilinear(op, eval_bilinear(op, e(i), e(j)), e(k)) +
                 eval_bilinear(op, eval_bilinear(op, e(i), e(k)), e(j));
        if (!r.is_zero())
          return AxiomCheck<T>::fail("right-leibniz", {i + 1, j + 1, k + 1}, std::move(r));
      }
  return AxiomCheck<T>::pass("right-leibniz");
}

/// D(e_i * e_j) = D(e_i) * e_j + e_i * D(e_j).
template <FieldElement T> AxiomCheck<T> is_derivation(const LinearMap<T> &d, const BilinearOp<T> &op) {
  detail::require_same_dim(d.dim(), op.dim(), "derivation check");
  const std::size_t n = op.dim();
  const FieldSpec f = op.field();
  for (std::size_t i = 0; i < n; ++i) {
    const auto ei = Element<T>::basis(f, n, i);
    const auto dei = d.column(i);
    for (std::size_t j = 0; j < n; ++j) {
      const auto ej = Element<T>::basis(f, n, j);
      auto r = eval_linear(d, eval_bilinear(op, ei, ej)) - eval_bilinear(op, dei, ej) -
               eval_bilinear(op, ei, d.column(j));
      if (!r.is_zero())
        return AxiomCheck<T>::fail("derivation", {i + 1, j + 1}, std::move(r));
    }
  }
  return AxiomCheck<T>::pass("derivation");
}

// ---------------------------------------------------------------------------
// Jacobians. The bracket slot holds [,] or <,> depending on the definition.

/// J[x,y,∘,z] = [x, y∘z] - [x,y]∘z - y∘[x,z]
template <FieldElement T>
Element<T> square_circle_jacobian(const TwoProductAlgebra<T> &a, const Element<T> &x,
                                  const Element<T> &y, const Element<T> &z) {
  const auto &br = a.bracket();
  const auto &ci = a.circle();
  return eval_bilinear(br, x, eval_bilinear(ci, y, z)) - eval_bilinear(ci, eval_bilinear(br, x, y), z) -
         eval_bilinear(ci, y, eval_bilinear(br, x, z));
}

/// J_l<x,y,∘,z> = <x, y∘z> - <x,y>∘z - y∘<x,z>; same formula as the square one.
template <FieldElement T>
Element<T> left_angle_jacobian(const TwoProductAlgebra<T> &a, const Element<T> &x,
                               const Element<T> &y, const Element<T> &z) {
  return square_circle_jacobian(a, x, y, z);
}

/// J_r<x,∘,y,z> = <x∘y, z> - x∘<y,z> - <x,z>∘y
template <FieldElement T>
Element<T> right_angle_jacobian(const TwoProductAlgebra<T> &a, const Element<T> &x,
                                const Element<T> &y, const Element<T> &z) {
  const auto &br = a.bracket();
  const auto &ci = a.circle();
  return eval_bilinear(br, eval_bilinear(ci, x, y), z) - eval_bilinear(ci, x, eval_bilinear(br, y, z)) -
         eval_bilinear(ci, eval_bilinear(br, x, z), y);
}

} // namespace poisgen
