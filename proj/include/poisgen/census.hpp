#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "poisgen/algebra.hpp"
#include "poisgen/errors.hpp"
#include "poisgen/scalar.hpp"
#include "poisgen/taxonomy.hpp"

namespace poisgen::census {

inline constexpr std::uint64_t default_cap = 100'000'000;

struct CensusSpec {
  FieldSpec field = FieldSpec::prime(2);
  std::size_t dim = 1;
  bool with_derivation = false;
  KindMask kinds = all_kinds_mask;
  std::uint64_t cap = default_cap;

  /// Entries per tuple: bracket n^3, circle n^3, then D n^2.
  std::size_t tuple_length() const { return 2 * dim * dim * dim + (with_derivation ? dim * dim : 0); }

  /// p^tuple_length, or nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> tuple_count() const {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < tuple_length(); ++i) {
      if (total > std::numeric_limits<std::uint64_t>::max() / field.characteristic())
        return std::nullopt;
      total *= field.characteristic();
    }
    return total;
  }

  void validate() const {
    if (!field.is_finite())
      throw InputError("census requires a finite field");
    if (dim == 0)
      throw InputError("census dimension must be positive");
    if (kinds == 0)
      throw InputError("census needs at least one kind");
    if (!with_derivation)
      for (StructureKind k : all_kinds)
        if ((kinds & kind_bit(k)) && kind_spec(k).needs_derivation)
          throw InputError(std::string(kind_name(k)) + " requires --with-derivation");
    const auto total = tuple_count();
    if (!total || *total > cap)
      throw InputError("census of " + field.to_string() + " dim " + std::to_string(dim) + " has " +
                       (total ? std::to_string(*total) : field.to_string() + "^" + std::to_string(tuple_length())) +
                       " tuples, above the cap of " + std::to_string(cap));
  }

  friend bool operator==(const CensusSpec &, const CensusSpec &) = default;
};

struct CensusResult {
  CensusSpec spec;
  std::uint64_t total_enumerated = 0;
  std::array<std::uint64_t, kind_count> counts{};
  /// First satisfying tuple (entry digits) in enumeration order.
  std::array<std::optional<std::vector<std::uint32_t>>, kind_count> witnesses;

  friend bool operator==(const CensusResult &, const CensusResult &) = default;
};

struct Visit {
  std::uint64_t index;
  std::span<const std::uint32_t> digits;
  KindMask passed;
};

struct CensusOptions {
  unsigned threads = 0; // 0: hardware concurrency
  bool prune = true;
  /// Called for every tuple in order; forces a sequential run.
  std::function<void(const Visit &)> visitor;
};

/// Digits of tuple `index`, most significant (bracket c[1][1][1]) first.
inline void decode(std::uint64_t index, std::uint32_t p, std::span<std::uint32_t> digits) {
  for (std::size_t pos = digits.size(); pos-- > 0;) {
    digits[pos] = static_cast<std::uint32_t>(index % p);
    index /= p;
  }
}

/// Algebra described by a census tuple.
inline TwoProductAlgebra<Residue> tuple_algebra(const CensusSpec &spec, std::span<const std::uint32_t> digits) {
  const std::size_t n = spec.dim;
  const std::size_t cube = n * n * n;
  BilinearOp<Residue> bracket(spec.field, n), circle(spec.field, n);
  for (std::size_t i = 0, t = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k, ++t) {
        bracket.set(i, j, k, Residue(digits[t], spec.field));
        circle.set(i, j, k, Residue(digits[cube + t], spec.field));
      }
  std::optional<LinearMap<Residue>> d;
  if (spec.with_derivation) {
    d.emplace(spec.field, n);
    for (std::size_t r = 0, t = 2 * cube; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c, ++t)
        d->set(r, c, Residue(digits[t], spec.field));
  }
  return TwoProductAlgebra<Residue>(std::move(bracket), std::move(circle), std::move(d));
}

namespace detail {

/// Verdicts of the cheap base axioms for every possible tensor, indexed by the
/// tensor's digits read as a base-p number.
struct BaseTables {
  std::vector<char> lie, right_leibniz, associative;

  explicit BaseTables(const CensusSpec &spec) {
    const std::size_t n = spec.dim;
    const std::size_t cube = n * n * n;
    const std::uint32_t p = spec.field.characteristic();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < cube; ++i)
      count *= p;
    lie.resize(count);
    right_leibniz.resize(count);
    associative.resize(count);
    std::vector<std::uint32_t> digits(cube);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      decode(idx, p, digits);
      BilinearOp<Residue> op(spec.field, n);
      for (std::size_t i = 0, t = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k, ++t)
            op.set(i, j, k, Residue(digits[t], spec.field));
      lie[idx] = is_lie(op).holds;
      right_leibniz[idx] = is_right_leibniz(op).holds;
      associative[idx] = is_associative(op).holds;
    }
  }
};

struct Partial {
  std::array<std::uint64_t, kind_count> counts{};
  std::array<std::optional<std::uint64_t>, kind_count> first;
};

inline Partial scan(const CensusSpec &spec, const BaseTables *tables, std::uint64_t begin, std::uint64_t end,
                    const std::function<void(const Visit &)> *visitor) {
  Partial out;
  const std::uint32_t p = spec.field.characteristic();
  const std::size_t n = spec.dim;
  std::uint64_t circle_space = 1, d_space = 1;
  for (std::size_t i = 0; i < n * n * n; ++i)
    circle_space *= p;
  if (spec.with_derivation)
    for (std::size_t i = 0; i < n * n; ++i)
      d_space *= p;
  std::vector<std::uint32_t> digits(spec.tuple_length());
  for (std::uint64_t t = begin; t < end; ++t) {
    KindMask candidates = spec.kinds;
    if (tables) {
      const std::uint64_t c = (t / d_space) % circle_space;
      const std::uint64_t b = t / (d_space * circle_space);
      candidates &= viable_kinds(tables->lie[b], tables->right_leibniz[b], tables->associative[c]);
    }
    KindMask passed = 0;
    if (candidates || visitor)
      decode(t, p, digits);
    if (candidates) {
      const auto algebra = tuple_algebra(spec, digits);
      Checker<Residue> checker(algebra);
      passed = passing_kinds(checker, candidates);
      for (StructureKind k : all_kinds)
        if (passed & kind_bit(k)) {
          ++out.counts[kind_index(k)];
          if (!out.first[kind_index(k)])
            out.first[kind_index(k)] = t;
        }
    }
    if (visitor)
      (*visitor)(Visit{t, digits, passed});
  }
  return out;
}

} // namespace detail

/// Enumerates every (bracket, circle[, D]) tuple over GF(p) in row-major
/// lexicographic order and counts the tuples satisfying each selected kind.
/// Tuples failing the cheap base axioms are skipped without a full check;
/// results do not depend on pruning or on the thread count.
inline CensusResult run_census(const CensusSpec &spec, const CensusOptions &options = {}) {
  spec.validate();
  const std::uint64_t total = *spec.tuple_count();
  std::optional<detail::BaseTables> tables;
  if (options.prune)
    tables.emplace(spec);
  const detail::BaseTables *tp = tables ? &*tables : nullptr;

  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  if (options.visitor || total < threads)
    threads = 1;

  std::vector<detail::Partial> parts(threads);
  if (threads == 1) {
    parts[0] = detail::scan(spec, tp, 0, total, options.visitor ? &options.visitor : nullptr);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = total / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = w + 1 == threads ? total : begin + chunk;
      pool.emplace_back([&, w, begin, end] { parts[w] = detail::scan(spec, tp, begin, end, nullptr); });
    }
  }

  CensusResult result{spec, total, {}, {}};
  for (StructureKind k : all_kinds) {
    const auto ki = kind_index(k);
    std::optional<std::uint64_t> first;
    for (const auto &part : parts) {
      result.counts[ki] += part.counts[ki];
      if (part.first[ki] && (!first || *part.first[ki] < *first))
        first = part.first[ki];
    }
    if (first) {
      std::vector<std::uint32_t> digits(spec.tuple_length());
      decode(*first, spec.field.characteristic(), digits);
      result.witnesses[ki] = std::move(digits);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Exhaustive oracle: evaluates every axiom on all element tuples, written out
// directly from the definitions rather than through the kind table.

inline constexpr std::uint64_t oracle_bound = 1'000'000;

namespace detail {

using E = Element<Residue>;

inline std::vector<E> all_elements(FieldSpec f, std::size_t n) {
  std::vector<E> out;
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < n; ++i)
    count *= f.characteristic();
  std::vector<std::uint32_t> digits(n);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    decode(idx, f.characteristic(), digits);
    E e(f, n);
    for (std::size_t i = 0; i < n; ++i)
      e[i] = Residue(digits[i], f);
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace detail

inline bool exhaustive_oracle(const TwoProductAlgebra<Residue> &a, StructureKind kind) {
  using detail::E;
  const FieldSpec f = a.field();
  if (!f.is_finite())
    throw InputError("exhaustive oracle requires a finite field");
  std::uint64_t triples = 1;
  for (std::size_t i = 0; i < 3 * a.dim(); ++i) {
    triples *= f.characteristic();
    if (triples > oracle_bound)
      throw InputError("exhaustive oracle: p^(3 dim) exceeds 10^6");
  }
  const KindSpec &spec = kind_spec(kind);
  if (spec.needs_derivation && !a.derivation())
    throw InputError(std::string(kind_name(kind)) + " requires a derivation D");

  const auto elems = detail::all_elements(f, a.dim());
  auto br = [&](const E &x, const E &y) { return eval_bilinear(a.bracket(), x, y); };
  auto ci = [&](const E &x, const E &y) { return eval_bilinear(a.circle(), x, y); };
  auto c3 = [&](const E &x, const E &y, const E &z) { return ci(ci(x, y), z); };
  auto D = [&](const E &x) { return eval_linear(*a.derivation(), x); };
  auto for_all3 = [&](auto pred) {
    for (const auto &x : elems)
      for (const auto &y : elems)
        for (const auto &z : elems)
          if (!pred(x, y, z))
            return false;
    return true;
  };

  if (spec.bracket_axiom == BracketAxiom::Lie) {
    for (const auto &x : elems)
      if (!br(x, x).is_zero())
        return false;
    if (!for_all3([&](const E &x, const E &y, const E &z) {
          return (br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y))).is_zero();
        }))
      return false;
  } else if (!for_all3([&](const E &x, const E &y, const E &z) {
               return br(x, br(y, z)) == br(br(x, y), z) - br(br(x, z), y);
             })) {
    return false;
  }
  if (!for_all3([&](const E &x, const E &y, const E &z) { return ci(ci(x, y), z) == ci(x, ci(y, z)); }))
    return false;
  if (spec.needs_derivation)
    for (const auto &x : elems)
      for (const auto &y : elems)
        if (D(br(x, y)) != br(D(x), y) + br(x, D(y)) || D(ci(x, y)) != ci(D(x), y) + ci(x, D(y)))
          return false;

  using K = StructureKind;
  auto jac = [&](const E &x, const E &y, const E &z) { return br(x, ci(y, z)) - ci(br(x, y), z) - ci(y, br(x, z)); };
  auto jac_r = [&](const E &x, const E &y, const E &z) { return br(ci(x, y), z) - ci(x, br(y, z)) - ci(br(x, z), y); };

  // identity and side conditions for one alpha
  auto holds = [&](const Residue &alpha) {
    return for_all3([&](const E &x, const E &y, const E &z) {
      auto aD = [&](const E &v) { return alpha * D(v); };
      switch (kind) {
      case K::SquareCircle:
      case K::LeftAngleCircle: return jac(x, y, z).is_zero();
      case K::RightAngleCircle: return jac_r(x, y, z).is_zero();
      case K::TailedSC1:
      case K::TailedLAC1: return jac(x, y, z) == c3(x, y, D(z)) - c3(y, x, D(z));
      case K::TailedSC2: return jac(x, y, z) == c3(y, D(x), z);
      case K::TailedSC3: return jac(x, y, z) == c3(D(y), z, x) - c3(D(y), x, z) + c3(y, aD(x), z);
      case K::TailedSC4:
        return jac(x, y, z) == c3(D(y), z, x) - c3(D(y), x, z) && c3(x, y, D(z)).is_zero() &&
               c3(x, D(y), z).is_zero();
      case K::TailedSC5: return jac(x, y, z) == c3(y, aD(x), z) + c3(D(y), z, x) - c3(D(y), x, z);
      case K::TailedSC6:
        return jac(x, y, z) == c3(aD(y), z, x) - c3(aD(y), x, z) + c3(x, y, D(z)) - c3(y, x, D(z));
      case K::TailedSC7: return jac(x, y, z) == c3(y, aD(x), z) + c3(x, y, D(z)) - c3(y, x, D(z));
      case K::TailedSC8:
        return jac(x, y, z) == c3(x, y, D(z)) - c3(y, x, D(z)) && c3(D(x), y, z).is_zero() &&
               c3(x, D(y), z).is_zero();
      case K::TailedLAC2:
        return jac(x, y, z) == c3(x, y, D(z)) - c3(y, x, D(z)) && c3(x, D(y), z).is_zero() &&
               c3(D(x), y, z).is_zero();
      case K::TailedLAC3: return jac(x, y, z) == c3(D(y), x, z) - c3(D(y), z, x);
      case K::TailedLAC4:
        return jac(x, y, z) == c3(D(y), x, z) - c3(D(y), z, x) && c3(x, y, D(z)) == c3(x, D(y), z);
      case K::TailedLAC5:
        return jac(x, y, z) == c3(x, y, D(z)) - c3(y, x, D(z)) - c3(D(y), x, z) + c3(D(y), z, x);
      case K::TailedLAC6:
        return jac(x, y, z) == c3(x, y, D(z)) - c3(y, x, D(z)) && c3(x, D(y), z) == c3(D(x), y, z);
      case K::TailedRAC1: return jac_r(x, y, z) == c3(x, z, D(y)) - c3(z, x, D(y));
      case K::TailedRAC2:
        return jac_r(x, y, z) == c3(x, z, D(y)) - c3(z, x, D(y)) && c3(x, D(y), z) == c3(D(x), y, z);
      case K::TailedRAC3: return jac_r(x, y, z) == c3(D(x), y, z) - c3(D(x), z, y);
      case K::TailedRAC4:
        return jac_r(x, y, z) == c3(D(x), y, z) - c3(D(x), z, y) && c3(x, y, D(z)).is_zero() &&
               c3(x, D(y), z).is_zero();
      }
      return false;
    });
  };

  if (spec.alpha_mode == AlphaMode::None)
    return holds(Residue::zero(f));
  const bool nonzero = spec.alpha_mode == AlphaMode::NonzeroScalar;
  if (a.alpha())
    return !(nonzero && a.alpha()->is_zero()) && holds(*a.alpha());
  for (std::uint32_t v = nonzero ? 1 : 0; v < f.characteristic(); ++v)
    if (holds(Residue(v, f)))
      return true;
  return false;
}

} // namespace poisgen::census
