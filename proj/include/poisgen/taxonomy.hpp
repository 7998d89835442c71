#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poisgen/algebra.hpp"
#include "poisgen/errors.hpp"

namespace poisgen {

enum class StructureKind : std::uint8_t {
  SquareCircle,
  LeftAngleCircle,
  RightAngleCircle,
  TailedSC1,
  TailedSC2,
  TailedSC3,
  TailedSC4,
  TailedSC5,
  TailedSC6,
  TailedSC7,
  TailedSC8,
  TailedLAC1,
  TailedLAC2,
  TailedLAC3,
  TailedLAC4,
  TailedLAC5,
  TailedLAC6,
  TailedRAC1,
  TailedRAC2,
  TailedRAC3,
  TailedRAC4,
};

inline constexpr std::size_t kind_count = 21;

inline constexpr std::size_t kind_index(StructureKind k) noexcept { return static_cast<std::size_t>(k); }

inline constexpr std::array<StructureKind, kind_count> all_kinds = [] {
  std::array<StructureKind, kind_count> out{};
  for (std::size_t i = 0; i < kind_count; ++i)
    out[i] = static_cast<StructureKind>(i);
  return out;
}();

inline constexpr std::array<std::string_view, kind_count> kind_names = {
    "square-circle", "left-angle-circle", "right-angle-circle",
    "tailed-sc-1",   "tailed-sc-2",       "tailed-sc-3",
    "tailed-sc-4",   "tailed-sc-5",       "tailed-sc-6",
    "tailed-sc-7",   "tailed-sc-8",       "tailed-lac-1",
    "tailed-lac-2",  "tailed-lac-3",      "tailed-lac-4",
    "tailed-lac-5",  "tailed-lac-6",      "tailed-rac-1",
    "tailed-rac-2",  "tailed-rac-3",      "tailed-rac-4",
};

inline constexpr std::string_view kind_name(StructureKind k) noexcept { return kind_names[kind_index(k)]; }

inline std::optional<StructureKind> parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kind_count; ++i)
    if (kind_names[i] == name)
      return static_cast<StructureKind>(i);
  return std::nullopt;
}

/// Like parse_kind, but throws an InputError listing the valid names.
inline StructureKind require_kind(std::string_view name) {
  if (auto k = parse_kind(name))
    return *k;
  std::string msg = "unknown kind '" + std::string(name) + "'; valid kinds:";
  for (auto n : kind_names)
    msg += " " + std::string(n);
  throw InputError(msg);
}

/// Set of kinds as a bitmask indexed by kind_index.
using KindMask = std::uint32_t;
inline constexpr KindMask kind_bit(StructureKind k) noexcept { return KindMask{1} << kind_index(k); }
inline constexpr KindMask all_kinds_mask = (KindMask{1} << kind_count) - 1;

enum class BracketAxiom : std::uint8_t { Lie, RightLeibniz };
enum class AlphaMode : std::uint8_t { None, AnyScalar, NonzeroScalar };
enum class JacobianForm : std::uint8_t { SquareCircle, LeftAngle, RightAngle };
enum class Slot : std::uint8_t { X, Y, Z };

/// A left-associated triple circle product of x, y, z in some order with D
/// applied to one factor, e.g. D(y)∘z∘x.
struct TripleTerm {
  std::uint8_t id;
  std::array<Slot, 3> order;
  std::uint8_t d_position;

  std::string name() const {
    std::string s;
    for (std::size_t i = 0; i < 3; ++i) {
      if (i)
        s += "∘";
      const char v = "xyz"[static_cast<int>(order[i])];
      if (i == d_position)
        s += std::string("D(") + v + ")";
      else
        s += v;
    }
    return s;
  }
};

namespace terms {
using enum Slot;
inline constexpr TripleTerm xyDz{0, {X, Y, Z}, 2};
inline constexpr TripleTerm yxDz{1, {Y, X, Z}, 2};
inline constexpr TripleTerm yDxz{2, {Y, X, Z}, 1};
inline constexpr TripleTerm Dyzx{3, {Y, Z, X}, 0};
inline constexpr TripleTerm Dyxz{4, {Y, X, Z}, 0};
inline constexpr TripleTerm xDyz{5, {X, Y, Z}, 1};
inline constexpr TripleTerm Dxyz{6, {X, Y, Z}, 0};
inline constexpr TripleTerm xzDy{7, {X, Z, Y}, 2};
inline constexpr TripleTerm zxDy{8, {Z, X, Y}, 2};
inline constexpr TripleTerm Dxzy{9, {X, Z, Y}, 0};
inline constexpr std::size_t count = 10;
} // namespace terms

struct TailTerm {
  int sign;
  bool alpha_scaled;
  TripleTerm term;
};

struct SideCondition {
  enum class Form : std::uint8_t { BothZero, Equal };
  Form form;
  TripleTerm lhs;
  TripleTerm rhs;
};

struct KindSpec {
  StructureKind kind;
  BracketAxiom bracket_axiom;
  JacobianForm jacobian;
  bool needs_derivation;
  AlphaMode alpha_mode;
  std::span<const TailTerm> tail;
  std::span<const SideCondition> side_conditions;

  std::string_view name() const noexcept { return kind_name(kind); }
};

namespace detail::tails {
using namespace terms;
using F = SideCondition::Form;
inline constexpr TailTerm sc1[] = {{+1, false, xyDz}, {-1, false, yxDz}};
inline constexpr TailTerm sc2[] = {{+1, false, yDxz}};
inline constexpr TailTerm sc3[] = {{+1, false, Dyzx}, {-1, false, Dyxz}, {+1, true, yDxz}};
inline constexpr TailTerm sc4[] = {{+1, false, Dyzx}, {-1, false, Dyxz}};
inline constexpr TailTerm sc5[] = {{+1, true, yDxz}, {+1, false, Dyzx}, {-1, false, Dyxz}};
inline constexpr TailTerm sc6[] = {{+1, true, Dyzx}, {-1, true, Dyxz}, {+1, false, xyDz}, {-1, false, yxDz}};
inline constexpr TailTerm sc7[] = {{+1, true, yDxz}, {+1, false, xyDz}, {-1, false, yxDz}};
inline constexpr TailTerm lac3[] = {{+1, false, Dyxz}, {-1, false, Dyzx}};
inline constexpr TailTerm lac5[] = {{+1, false, xyDz}, {-1, false, yxDz}, {-1, false, Dyxz}, {+1, false, Dyzx}};
inline constexpr TailTerm rac1[] = {{+1, false, xzDy}, {-1, false, zxDy}};
inline constexpr TailTerm rac3[] = {{+1, false, Dxyz}, {-1, false, Dxzy}};

inline constexpr SideCondition sc4_side[] = {{F::BothZero, xyDz, xDyz}};
inline constexpr SideCondition sc8_side[] = {{F::BothZero, Dxyz, xDyz}};
inline constexpr SideCondition lac2_side[] = {{F::BothZero, xDyz, Dxyz}};
inline constexpr SideCondition lac4_side[] = {{F::Equal, xyDz, xDyz}};
inline constexpr SideCondition lac6_side[] = {{F::Equal, xDyz, Dxyz}};
inline constexpr SideCondition rac2_side[] = {{F::Equal, xDyz, Dxyz}};
inline constexpr SideCondition rac4_side[] = {{F::BothZero, xyDz, xDyz}};
} // namespace detail::tails

inline constexpr std::array<KindSpec, kind_count> kind_specs = [] {
  using namespace detail::tails;
  using K = StructureKind;
  using B = BracketAxiom;
  using J = JacobianForm;
  using A = AlphaMode;
  return std::array<KindSpec, kind_count>{{
      {K::SquareCircle, B::Lie, J::SquareCircle, false, A::None, {}, {}},
      {K::LeftAngleCircle, B::RightLeibniz, J::LeftAngle, false, A::None, {}, {}},
      {K::RightAngleCircle, B::RightLeibniz, J::RightAngle, false, A::None, {}, {}},
      {K::TailedSC1, B::Lie, J::SquareCircle, true, A::None, sc1, {}},
      {K::TailedSC2, B::Lie, J::SquareCircle, true, A::None, sc2, {}},
      {K::TailedSC3, B::Lie, J::SquareCircle, true, A::AnyScalar, sc3, {}},
      {K::TailedSC4, B::Lie, J::SquareCircle, true, A::None, sc4, sc4_side},
      {K::TailedSC5, B::Lie, J::SquareCircle, true, A::NonzeroScalar, sc5, {}},
      {K::TailedSC6, B::Lie, J::SquareCircle, true, A::AnyScalar, sc6, {}},
      {K::TailedSC7, B::Lie, J::SquareCircle, true, A::NonzeroScalar, sc7, {}},
      {K::TailedSC8, B::Lie, J::SquareCircle, true, A::None, sc1, sc8_side},
      {K::TailedLAC1, B::RightLeibniz, J::LeftAngle, true, A::None, sc1, {}},
      {K::TailedLAC2, B::RightLeibniz, J::LeftAngle, true, A::None, sc1, lac2_side},
      {K::TailedLAC3, B::RightLeibniz, J::LeftAngle, true, A::None, lac3, {}},
      {K::TailedLAC4, B::RightLeibniz, J::LeftAngle, true, A::None, lac3, lac4_side},
      {K::TailedLAC5, B::RightLeibniz, J::LeftAngle, true, A::None, lac5, {}},
      {K::TailedLAC6, B::RightLeibniz, J::LeftAngle, true, A::None, sc1, lac6_side},
      {K::TailedRAC1, B::RightLeibniz, J::RightAngle, true, A::None, rac1, {}},
      {K::TailedRAC2, B::RightLeibniz, J::RightAngle, true, A::None, rac1, rac2_side},
      {K::TailedRAC3, B::RightLeibniz, J::RightAngle, true, A::None, rac3, {}},
      {K::TailedRAC4, B::RightLeibniz, J::RightAngle, true, A::None, rac3, rac4_side},
  }};
}();

inline constexpr const KindSpec &kind_spec(StructureKind k) noexcept { return kind_specs[kind_index(k)]; }

/// Kinds whose verdict can be true given the cheap base axioms.
inline constexpr KindMask viable_kinds(bool lie, bool right_leibniz, bool associative) noexcept {
  if (!associative)
    return 0;
  KindMask m = 0;
  for (const auto &s : kind_specs)
    if ((s.bracket_axiom == BracketAxiom::Lie && lie) ||
        (s.bracket_axiom == BracketAxiom::RightLeibniz && right_leibniz))
      m |= kind_bit(s.kind);
  return m;
}

template <FieldElement T> struct Failure {
  std::string axiom;
  std::vector<std::size_t> witness; // 1-based basis indices; empty if not tied to a tuple
  std::optional<Element<T>> residual;

  friend bool operator==(const Failure &, const Failure &) = default;
};

template <FieldElement T> struct AxiomReport {
  StructureKind kind;
  bool passed = true;
  std::optional<T> alpha_used;
  std::vector<Failure<T>> failures;
  std::vector<std::string> warnings;

  friend bool operator==(const AxiomReport &, const AxiomReport &) = default;
};

template <FieldElement T> struct AlphaSolution {
  enum class Status : std::uint8_t { NoSolution, Unique, AllScalars };
  Status status;
  std::optional<T> value; // set iff Unique
};

inline std::string_view alpha_status_name(std::uint8_t s) {
  static constexpr std::string_view names[] = {"no-solution", "unique", "all-scalars"};
  return names[s];
}

/// Evaluates and caches every basis-triple quantity the 21 definitions need,
/// so checking several kinds against one algebra shares the work. Not
/// thread-safe; use one Checker per thread.
template <FieldElement T> class Checker {
public:
  using Tensor = std::vector<Element<T>>; // n^3 entries, lexicographic (i, j, k)

  explicit Checker(const TwoProductAlgebra<T> &a) : a_(a), n_(a.dim()) {}

  const TwoProductAlgebra<T> &algebra() const noexcept { return a_; }

  const AxiomCheck<T> &alternating() { return cached(alternating_, [&] { return is_alternating(a_.bracket()); }); }
  const AxiomCheck<T> &jacobi() { return cached(jacobi_, [&] { return satisfies_jacobi(a_.bracket()); }); }
  const AxiomCheck<T> &right_leibniz() {
    return cached(right_leibniz_, [&] { return is_right_leibniz(a_.bracket()); });
  }
  const AxiomCheck<T> &associativity() {
    return cached(associativity_, [&] { return is_associative(a_.circle()); });
  }
  const AxiomCheck<T> &derivation_of_bracket() {
    return cached(der_bracket_, [&] { return is_derivation(*a_.derivation(), a_.bracket()); });
  }
  const AxiomCheck<T> &derivation_of_circle() {
    return cached(der_circle_, [&] { return is_derivation(*a_.derivation(), a_.circle()); });
  }

  const Tensor &jacobian(JacobianForm form) {
    if (form == JacobianForm::RightAngle)
      return cached(right_jacobian_, [&] {
        return tabulate([&](const auto &x, const auto &y, const auto &z) { return right_angle_jacobian(a_, x, y, z); });
      });
    return cached(square_jacobian_, [&] {
      return tabulate([&](const auto &x, const auto &y, const auto &z) { return square_circle_jacobian(a_, x, y, z); });
    });
  }

  const Tensor &term(const TripleTerm &t) {
    return cached(terms_[t.id], [&] {
      return tabulate([&](const Element<T> &x, const Element<T> &y, const Element<T> &z) {
        std::array<const Element<T> *, 3> slots{&x, &y, &z};
        std::array<Element<T>, 3> factors{*slots[static_cast<int>(t.order[0])], *slots[static_cast<int>(t.order[1])],
                                          *slots[static_cast<int>(t.order[2])]};
        factors[t.d_position] = eval_linear(*a_.derivation(), factors[t.d_position]);
        return triple_circle(a_, factors[0], factors[1], factors[2]);
      });
    });
  }

  /// The identity residual is base - alpha * coeff at every basis triple.
  std::pair<Tensor, Tensor> identity_parts(const KindSpec &spec) {
    Tensor base = jacobian(spec.jacobian);
    Tensor coeff(base.size(), Element<T>(a_.field(), n_));
    for (const auto &tt : spec.tail) {
      const Tensor &vals = term(tt.term);
      // base collects -sign*term for plain terms, coeff +sign*term for alpha terms
      Tensor &dst = tt.alpha_scaled ? coeff : base;
      const bool subtract = (tt.sign > 0) != tt.alpha_scaled;
      for (std::size_t t = 0; t < dst.size(); ++t) {
        if (vals[t].is_zero())
          continue;
        if (subtract)
          dst[t] -= vals[t];
        else
          dst[t] += vals[t];
      }
    }
    return {std::move(base), std::move(coeff)};
  }

  std::size_t dim() const noexcept { return n_; }

  std::vector<std::size_t> triple_of(std::size_t t) const {
    return {t / (n_ * n_) + 1, (t / n_) % n_ + 1, t % n_ + 1};
  }

private:
  template <class Slot_, class Fn> const auto &cached(std::optional<Slot_> &slot, Fn fn) {
    if (!slot)
      slot.emplace(fn());
    return *slot;
  }

  template <class Fn> Tensor tabulate(Fn fn) const {
    Tensor out;
    out.reserve(n_ * n_ * n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        for (std::size_t k = 0; k < n_; ++k)
          out.push_back(fn(a_.basis(i), a_.basis(j), a_.basis(k)));
    return out;
  }

  const TwoProductAlgebra<T> &a_;
  std::size_t n_;
  std::optional<AxiomCheck<T>> alternating_, jacobi_, right_leibniz_, associativity_, der_bracket_, der_circle_;
  std::optional<Tensor> square_jacobian_, right_jacobian_;
  std::array<std::optional<Tensor>, terms::count> terms_;
};

namespace detail {

template <FieldElement T>
void require_derivation(const KindSpec &spec, const TwoProductAlgebra<T> &a) {
  if (spec.needs_derivation && !a.derivation())
    throw InputError(std::string(spec.name()) + " requires a derivation D");
}

template <FieldElement T> struct AlphaSolve {
  AlphaSolution<T> solution;
  std::size_t conflict = 0;          // first basis triple contradicting the candidate
  std::optional<T> candidate;        // alpha implied by the first nonzero coefficient
};

template <FieldElement T>
AlphaSolve<T> solve_affine(const std::vector<Element<T>> &base, const std::vector<Element<T>> &coeff) {
  using Status = typename AlphaSolution<T>::Status;
  std::optional<T> alpha;
  for (std::size_t t = 0; t < base.size(); ++t) {
    for (std::size_t k = 0; k < base[t].dim(); ++k) {
      const T &c = coeff[t][k];
      const T &b = base[t][k];
      if (!alpha) {
        if (c.is_zero()) {
          if (!b.is_zero())
            return {{Status::NoSolution, std::nullopt}, t, std::nullopt};
          continue;
        }
        alpha = b * c.inverse();
        // earlier components all had c = 0 and b = 0
      } else if (!(b - *alpha * c).is_zero()) {
        return {{Status::NoSolution, std::nullopt}, t, alpha};
      }
    }
  }
  if (!alpha)
    return {{Status::AllScalars, std::nullopt}, 0, std::nullopt};
  return {{Status::Unique, alpha}, 0, alpha};
}

template <FieldElement T>
std::optional<std::size_t> first_nonzero(const std::vector<Element<T>> &tensor) {
  for (std::size_t t = 0; t < tensor.size(); ++t)
    if (!tensor[t].is_zero())
      return t;
  return std::nullopt;
}

} // namespace detail

/// Solves the kind's identity for alpha. The residual is affine in alpha, so
/// the answer is no solution, exactly one value, or every scalar. For kinds
/// demanding a nonzero alpha, a unique solution of 0 counts as no solution.
template <FieldElement T>
AlphaSolution<T> solve_alpha(Checker<T> &checker, StructureKind kind) {
  const KindSpec &spec = kind_spec(kind);
  if (spec.alpha_mode == AlphaMode::None)
    throw InputError(std::string(spec.name()) + " has no alpha clause");
  detail::require_derivation(spec, checker.algebra());
  auto [base, coeff] = checker.identity_parts(spec);
  auto sol = detail::solve_affine(base, coeff).solution;
  if (spec.alpha_mode == AlphaMode::NonzeroScalar && sol.status == AlphaSolution<T>::Status::Unique &&
      sol.value->is_zero())
    return {AlphaSolution<T>::Status::NoSolution, std::nullopt};
  return sol;
}

template <FieldElement T> AlphaSolution<T> solve_alpha(StructureKind kind, const TwoProductAlgebra<T> &a) {
  Checker<T> checker(a);
  return solve_alpha(checker, kind);
}

/// Checks every axiom of the definition and lists each failing one with its
/// smallest basis witness. Order: bracket axiom, circle associativity,
/// derivation properties, identity, side conditions.
template <FieldElement T> AxiomReport<T> check(Checker<T> &checker, StructureKind kind) {
  const KindSpec &spec = kind_spec(kind);
  const auto &a = checker.algebra();
  detail::require_derivation(spec, a);

  AxiomReport<T> report{kind, true, std::nullopt, {}, {}};
  auto record = [&](const AxiomCheck<T> &c, std::string name) {
    if (!c.holds)
      report.failures.push_back({std::move(name), c.witness, c.residual});
  };

  if (spec.bracket_axiom == BracketAxiom::Lie) {
    record(checker.alternating(), "bracket-alternating");
    record(checker.jacobi(), "bracket-jacobi");
  } else {
    record(checker.right_leibniz(), "bracket-right-leibniz");
  }
  record(checker.associativity(), "circle-associativity");
  if (spec.needs_derivation) {
    record(checker.derivation_of_bracket(), "derivation-bracket");
    record(checker.derivation_of_circle(), "derivation-circle");
  }

  const std::string identity_name = spec.needs_derivation ? "tailed-identity" : "leibniz-rule";
  auto [base, coeff] = checker.identity_parts(spec);
  std::optional<T> alpha;
  if (spec.alpha_mode == AlphaMode::None) {
    if (a.alpha())
      report.warnings.push_back("alpha ignored: " + std::string(spec.name()) + " has no alpha clause");
  } else if (a.alpha()) {
    alpha = *a.alpha();
    if (spec.alpha_mode == AlphaMode::NonzeroScalar && alpha->is_zero())
      report.failures.push_back({"alpha-nonzero", {}, std::nullopt});
  } else {
    using Status = typename AlphaSolution<T>::Status;
    auto solved = detail::solve_affine(base, coeff);
    const bool nonzero = spec.alpha_mode == AlphaMode::NonzeroScalar;
    switch (solved.solution.status) {
    case Status::AllScalars:
      alpha = nonzero ? T::one(a.field()) : T::zero(a.field());
      break;
    case Status::Unique:
      if (nonzero && solved.solution.value->is_zero()) {
        // only alpha = 0 works; show what alpha = 1 leaves behind
        const auto t = *detail::first_nonzero(coeff);
        report.failures.push_back({"alpha-nonzero", checker.triple_of(t), base[t] - coeff[t]});
      } else {
        alpha = solved.solution.value;
      }
      break;
    case Status::NoSolution: {
      const auto t = solved.conflict;
      auto residual = solved.candidate ? base[t] - *solved.candidate * coeff[t] : base[t];
      report.failures.push_back({identity_name, checker.triple_of(t), std::move(residual)});
      break;
    }
    }
  }
  report.alpha_used = alpha;

  if (alpha || spec.alpha_mode == AlphaMode::None) {
    for (std::size_t t = 0; t < base.size(); ++t) {
      Element<T> r = base[t];
      if (alpha && !alpha->is_zero())
        r -= *alpha * coeff[t];
      if (!r.is_zero()) {
        report.failures.push_back({identity_name, checker.triple_of(t), std::move(r)});
        break;
      }
    }
  }

  for (const auto &side : spec.side_conditions) {
    const auto &lhs = checker.term(side.lhs);
    const auto &rhs = checker.term(side.rhs);
    if (side.form == SideCondition::Form::BothZero) {
      for (const auto *which : {&side.lhs, &side.rhs}) {
        const auto &vals = which == &side.lhs ? lhs : rhs;
        if (auto t = detail::first_nonzero(vals))
          report.failures.push_back({"side:" + which->name() + "=0", checker.triple_of(*t), vals[*t]});
      }
    } else {
      for (std::size_t t = 0; t < lhs.size(); ++t) {
        auto diff = lhs[t] - rhs[t];
        if (!diff.is_zero()) {
          report.failures.push_back(
              {"side:" + side.lhs.name() + "=" + side.rhs.name(), checker.triple_of(t), std::move(diff)});
          break;
        }
      }
    }
  }

  report.passed = report.failures.empty();
  return report;
}

template <FieldElement T> AxiomReport<T> check(StructureKind kind, const TwoProductAlgebra<T> &a) {
  Checker<T> checker(a);
  return check(checker, kind);
}

template <FieldElement T> struct Classification {
  std::vector<StructureKind> passed;
  std::vector<StructureKind> failed;
  std::vector<StructureKind> not_applicable;
  std::vector<AxiomReport<T>> reports; // one per applicable kind, in kind order
};

/// Checks every kind in `kinds`; tailed kinds are not applicable without D.
template <FieldElement T>
Classification<T> classify(const TwoProductAlgebra<T> &a, KindMask kinds = all_kinds_mask) {
  Classification<T> out;
  Checker<T> checker(a);
  for (StructureKind k : all_kinds) {
    if (!(kinds & kind_bit(k)))
      continue;
    if (kind_spec(k).needs_derivation && !a.derivation()) {
      out.not_applicable.push_back(k);
      continue;
    }
    auto report = check(checker, k);
    (report.passed ? out.passed : out.failed).push_back(k);
    out.reports.push_back(std::move(report));
  }
  return out;
}

/// Passing kinds only, as a mask; skips failure bookkeeping where possible.
template <FieldElement T> KindMask passing_kinds(Checker<T> &checker, KindMask kinds) {
  KindMask out = 0;
  for (StructureKind k : all_kinds)
    if ((kinds & kind_bit(k)) && check(checker, k).passed)
      out |= kind_bit(k);
  return out;
}

} // namespace poisgen
