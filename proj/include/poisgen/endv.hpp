#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "poisgen/algebra.hpp"
#include "poisgen/errors.hpp"
#include "poisgen/scalar.hpp"
#include "poisgen/taxonomy.hpp"

namespace poisgen::endv {

/// V = W ⊕ U with W spanned by the first m coordinates of an n-dimensional V.
struct SpaceShape {
  std::size_t n;
  std::size_t m;

  static SpaceShape make(std::size_t n, std::size_t m) {
    if (n < 2 || m == 0 || m >= n)
      throw InputError("subspace W must be proper and nonzero: need 0 < m < n (got n=" + std::to_string(n) +
                       ", m=" + std::to_string(m) + ")");
    return {n, m};
  }

  friend bool operator==(const SpaceShape &, const SpaceShape &) = default;
};

/// Dense n×n matrix, row-major.
template <FieldElement T> class Matrix {
public:
  Matrix(FieldSpec field, std::size_t n) : field_(field), n_(n), a_(n * n, T::zero(field)) {}

  static Matrix identity(FieldSpec field, std::size_t n) {
    Matrix m(field, n);
    for (std::size_t i = 0; i < n; ++i)
      m.at(i, i) = T::one(field);
    return m;
  }
  static Matrix unit(FieldSpec field, std::size_t n, std::size_t row, std::size_t col) {
    Matrix m(field, n);
    m.at(row, col) = T::one(field);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  FieldSpec field() const noexcept { return field_; }
  T &at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  const T &at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

  friend Matrix operator*(const Matrix &x, const Matrix &y) {
    Matrix out(x.field_, x.n_);
    for (std::size_t i = 0; i < x.n_; ++i)
      for (std::size_t k = 0; k < x.n_; ++k) {
        if (x.at(i, k).is_zero())
          continue;
        for (std::size_t j = 0; j < x.n_; ++j)
          if (!y.at(k, j).is_zero())
            out.at(i, j) += x.at(i, k) * y.at(k, j);
      }
    return out;
  }
  Matrix &operator+=(const Matrix &o) {
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (!o.a_[i].is_zero())
        a_[i] += o.a_[i];
    return *this;
  }
  friend Matrix operator+(Matrix x, const Matrix &y) { return x += y; }
  friend Matrix operator-(Matrix x, const Matrix &y) {
    for (std::size_t i = 0; i < x.a_.size(); ++i)
      if (!y.a_[i].is_zero())
        x.a_[i] -= y.a_[i];
    return x;
  }
  friend Matrix operator*(const T &s, Matrix x) {
    for (auto &v : x.a_)
      if (!v.is_zero())
        v *= s;
    return x;
  }
  friend bool operator==(const Matrix &, const Matrix &) = default;

private:
  FieldSpec field_;
  std::size_t n_;
  std::vector<T> a_;
};

/// Blocks of End(V) = [[W→W, U→W], [W→U, U→U]] in that order.
enum class Block : std::uint8_t { WW, UW, WU, UU };
inline constexpr std::array<std::string_view, 4> block_names = {"WW", "UW", "WU", "UU"};

inline Block block_of(const SpaceShape &s, std::size_t row, std::size_t col) {
  const bool row_w = row < s.m;
  const bool col_w = col < s.m;
  if (row_w)
    return col_w ? Block::WW : Block::UW;
  return col_w ? Block::WU : Block::UU;
}

struct SubspaceTemplate {
  std::string id;
  std::array<bool, 4> free{}; // indexed by Block

  bool is_free(Block b) const { return free[static_cast<std::size_t>(b)]; }
};

enum class Letter : std::uint8_t { F, G, Pi, Rho };

/// Formula over {f, g, π, ρ}: a sum of coefficient-weighted words.
/// Text form: terms joined by + or -, each `[scalar*]letters` with letters
/// f, g, p (π, projection onto W) and r (ρ = 1 - π); "0" is the zero formula.
/// Example: "fpg-gpf", "2*fg", "pf-fp".
struct FormulaText {
  std::string id;     // display name, defaults to the formula
  std::string formula;
};

template <FieldElement T> struct Word {
  T coeff;
  std::vector<Letter> letters;
};

template <FieldElement T> struct Formula {
  std::string id;
  std::vector<Word<T>> words;
};

/// Parses a formula; `binary` demands exactly one f and one g per word,
/// otherwise exactly one f and no g.
template <FieldElement T> Formula<T> parse_formula(const FormulaText &text, FieldSpec field, bool binary) {
  Formula<T> out{text.id.empty() ? text.formula : text.id, {}};
  std::string s;
  for (char ch : text.formula)
    if (ch != ' ')
      s += ch;
  auto fail = [&](const std::string &why) -> void {
    throw InputError("formula '" + text.formula + "': " + why);
  };
  if (s.empty())
    fail("empty");
  if (s == "0")
    return out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') {
      negative = s[pos] == '-';
      ++pos;
    } else if (pos != 0) {
      fail("expected + or -");
    }
    T coeff = T::one(field);
    std::size_t end = pos;
    while (end < s.size() && ((s[end] >= '0' && s[end] <= '9') || s[end] == '/'))
      ++end;
    if (end > pos) {
      coeff = T::parse(s.substr(pos, end - pos), field);
      pos = end;
      if (pos < s.size() && s[pos] == '*')
        ++pos;
    }
    Word<T> w{negative ? -coeff : coeff, {}};
    while (pos < s.size() && s[pos] != '+' && s[pos] != '-') {
      switch (s[pos]) {
      case 'f': w.letters.push_back(Letter::F); break;
      case 'g': w.letters.push_back(Letter::G); break;
      case 'p': w.letters.push_back(Letter::Pi); break;
      case 'r': w.letters.push_back(Letter::Rho); break;
      case '*': break;
      default: fail(std::string("unexpected character '") + s[pos] + "'");
      }
      ++pos;
    }
    const auto fs = std::count(w.letters.begin(), w.letters.end(), Letter::F);
    const auto gs = std::count(w.letters.begin(), w.letters.end(), Letter::G);
    if (fs != 1 || gs != (binary ? 1 : 0))
      fail(binary ? "each word needs exactly one f and one g" : "each word needs exactly one f and no g");
    if (w.letters.size() > 4)
      fail("words are limited to 4 letters");
    out.words.push_back(std::move(w));
  }
  return out;
}

/// Evaluates a formula with f, g bound to matrices (g ignored for unary ones).
template <FieldElement T>
Matrix<T> evaluate(const Formula<T> &formula, const SpaceShape &shape, const Matrix<T> &f, const Matrix<T> *g) {
  const FieldSpec field = f.field();
  Matrix<T> pi(field, shape.n);
  for (std::size_t i = 0; i < shape.m; ++i)
    pi.at(i, i) = T::one(field);
  const Matrix<T> rho = Matrix<T>::identity(field, shape.n) - pi;
  Matrix<T> out(field, shape.n);
  for (const auto &w : formula.words) {
    Matrix<T> acc = Matrix<T>::identity(field, shape.n);
    for (Letter l : w.letters) {
      switch (l) {
      case Letter::F: acc = acc * f; break;
      case Letter::G: acc = acc * *g; break;
      case Letter::Pi: acc = acc * pi; break;
      case Letter::Rho: acc = acc * rho; break;
      }
    }
    out += w.coeff * acc;
  }
  return out;
}

struct Catalog {
  std::vector<SubspaceTemplate> subspaces;
  std::vector<FormulaText> brackets;
  std::vector<FormulaText> circles;
  std::vector<FormulaText> derivations;
};

inline Catalog default_catalog() {
  auto sub = [](std::string id, bool ww, bool uw, bool wu, bool uu) {
    return SubspaceTemplate{std::move(id), {ww, uw, wu, uu}};
  };
  auto f = [](std::string text) { return FormulaText{text, text}; };
  return Catalog{
      {
          sub("full", true, true, true, true),
          sub("image-in-W", true, true, false, false),
          sub("kills-W", false, true, false, true),
          sub("image-in-W-kills-W", false, true, false, false),
          sub("upper-triangular", true, true, false, true),
      },
      // brackets; the last two are angle-bracket candidates (not antisymmetric)
      {f("fg-gf"), f("fpg-gpf"), f("frg-grf"), f("0"), f("fpg-gf"), f("fg-gpf")},
      {f("fg"), f("gf"), f("fpg"), f("frg"), f("pfg"), f("fgp")},
      {f("0"), f("pf-fp"), f("rf-fr"), f("pfp"), f("fp")},
  };
}

/// Where an instantiation left the subspace.
struct Escape {
  std::string product; // "bracket", "circle" or "derivation"
  std::size_t a;       // 1-based basis indices
  std::size_t b;       // 0 for the derivation
};

template <FieldElement T> struct Instantiation {
  std::vector<std::pair<std::size_t, std::size_t>> positions; // matrix entry of each basis element
  std::optional<TwoProductAlgebra<T>> algebra;                // set iff closed
  std::optional<Escape> escape;

  bool closed() const noexcept { return algebra.has_value(); }
};

template <FieldElement T>
std::vector<std::pair<std::size_t, std::size_t>> basis_positions(const SpaceShape &shape, const SubspaceTemplate &sub) {
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  for (std::size_t r = 0; r < shape.n; ++r)
    for (std::size_t c = 0; c < shape.n; ++c)
      if (sub.is_free(block_of(shape, r, c)))
        pos.emplace_back(r, c);
  if (pos.empty())
    throw InputError("subspace template '" + sub.id + "' has no free block");
  return pos;
}

/// Builds structure constants on the span of the free elementary matrices,
/// or reports the first basis pair whose image leaves that span.
template <FieldElement T>
Instantiation<T> instantiate(const SpaceShape &shape, const SubspaceTemplate &sub, const Formula<T> &bracket,
                             const Formula<T> &circle, const Formula<T> *derivation, FieldSpec field) {
  Instantiation<T> out;
  out.positions = basis_positions<T>(shape, sub);
  const std::size_t d = out.positions.size();
  std::vector<Matrix<T>> basis;
  basis.reserve(d);
  for (auto [r, c] : out.positions)
    basis.push_back(Matrix<T>::unit(field, shape.n, r, c));

  // coordinates of a matrix in the subspace basis, or nullopt if it escapes
  auto coordinates = [&](const Matrix<T> &m) -> std::optional<Element<T>> {
    for (std::size_t r = 0; r < shape.n; ++r)
      for (std::size_t c = 0; c < shape.n; ++c)
        if (!sub.is_free(block_of(shape, r, c)) && !m.at(r, c).is_zero())
          return std::nullopt;
    Element<T> e(field, d);
    for (std::size_t k = 0; k < d; ++k)
      e[k] = m.at(out.positions[k].first, out.positions[k].second);
    return e;
  };

  BilinearOp<T> br(field, d), ci(field, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      for (auto [formula, op, name] : {std::tuple{&bracket, &br, "bracket"}, std::tuple{&circle, &ci, "circle"}}) {
        auto coords = coordinates(evaluate(*formula, shape, basis[i], &basis[j]));
        if (!coords) {
          out.escape = Escape{name, i + 1, j + 1};
          return out;
        }
        for (std::size_t k = 0; k < d; ++k)
          op->set(i, j, k, (*coords)[k]);
      }
    }
  std::optional<LinearMap<T>> dmap;
  if (derivation) {
    dmap.emplace(field, d);
    for (std::size_t j = 0; j < d; ++j) {
      auto coords = coordinates(evaluate<T>(*derivation, shape, basis[j], nullptr));
      if (!coords) {
        out.escape = Escape{"derivation", j + 1, 0};
        return out;
      }
      for (std::size_t i = 0; i < d; ++i)
        dmap->set(i, j, (*coords)[i]);
    }
  }
  out.algebra.emplace(std::move(br), std::move(ci), std::move(dmap));
  return out;
}

struct SurveyRow {
  std::string subspace;
  std::string bracket;
  std::string circle;
  std::string derivation; // "-" for the tailless row
  std::size_t dim = 0;
  bool closed = false;
  KindMask kinds_passed = 0;

  friend bool operator==(const SurveyRow &, const SurveyRow &) = default;
};

struct SurveyReport {
  SpaceShape shape;
  FieldSpec field;
  std::vector<SurveyRow> rows;
  std::array<std::uint64_t, kind_count> counts{};
  std::size_t closed_rows = 0;
  /// Every tailless row passing left-angle-circle also passes right-angle-circle.
  bool remark_check = true;
  std::size_t remark_exceptions = 0;

  friend bool operator==(const SurveyReport &, const SurveyReport &) = default;
};

inline constexpr std::string_view no_derivation = "-";

inline constexpr KindMask tailless_mask =
    kind_bit(StructureKind::SquareCircle) | kind_bit(StructureKind::LeftAngleCircle) |
    kind_bit(StructureKind::RightAngleCircle);

/// Runs every (subspace, bracket, circle) combination of the catalog. Each
/// closed combination yields one tailless row (derivation "-", tailless kinds
/// only) plus one row per derivation template (tailed kinds only). Rows are
/// sorted by template ids, so the report is independent of `threads`.
template <FieldElement T>
SurveyReport survey(const SpaceShape &shape, const Catalog &catalog, FieldSpec field, unsigned threads = 0) {
  std::vector<Formula<T>> brackets, circles, derivations;
  for (const auto &t : catalog.brackets)
    brackets.push_back(parse_formula<T>(t, field, true));
  for (const auto &t : catalog.circles)
    circles.push_back(parse_formula<T>(t, field, true));
  for (const auto &t : catalog.derivations)
    derivations.push_back(parse_formula<T>(t, field, false));
  for (const auto &s : catalog.subspaces)
    basis_positions<T>(shape, s); // validates

  struct Task {
    std::size_t s, b, c;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < catalog.subspaces.size(); ++s)
    for (std::size_t b = 0; b < brackets.size(); ++b)
      for (std::size_t c = 0; c < circles.size(); ++c)
        tasks.push_back({s, b, c});

  std::vector<std::vector<SurveyRow>> results(tasks.size());
  auto run = [&](const Task &t) {
    std::vector<SurveyRow> rows;
    const auto &sub = catalog.subspaces[t.s];
    SurveyRow proto{sub.id, brackets[t.b].id, circles[t.c].id, std::string(no_derivation), 0, false, 0};
    auto plain = instantiate<T>(shape, sub, brackets[t.b], circles[t.c], nullptr, field);
    proto.dim = plain.positions.size();
    SurveyRow tailless = proto;
    if (plain.closed()) {
      tailless.closed = true;
      Checker<T> checker(*plain.algebra);
      tailless.kinds_passed = passing_kinds(checker, tailless_mask);
    }
    rows.push_back(tailless);
    for (const auto &d : derivations) {
      SurveyRow row = proto;
      row.derivation = d.id;
      if (plain.closed()) {
        auto with_d = instantiate<T>(shape, sub, brackets[t.b], circles[t.c], &d, field);
        if (with_d.closed()) {
          row.closed = true;
          Checker<T> checker(*with_d.algebra);
          row.kinds_passed = passing_kinds(checker, all_kinds_mask & ~tailless_mask);
        }
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };

  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
      results[i] = run(tasks[i]);
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i)
      pool.emplace_back(worker);
  }

  SurveyReport report{shape, field, {}, {}, 0, true, 0};
  for (auto &rs : results)
    for (auto &r : rs)
      report.rows.push_back(std::move(r));
  std::sort(report.rows.begin(), report.rows.end(), [](const SurveyRow &x, const SurveyRow &y) {
    return std::tie(x.subspace, x.bracket, x.circle, x.derivation) <
           std::tie(y.subspace, y.bracket, y.circle, y.derivation);
  });
  for (const auto &r : report.rows) {
    if (!r.closed)
      continue;
    ++report.closed_rows;
    for (StructureKind k : all_kinds)
      if (r.kinds_passed & kind_bit(k))
        ++report.counts[kind_index(k)];
    if (r.derivation == no_derivation && (r.kinds_passed & kind_bit(StructureKind::LeftAngleCircle)) &&
        !(r.kinds_passed & kind_bit(StructureKind::RightAngleCircle))) {
      report.remark_check = false;
      ++report.remark_exceptions;
    }
  }
  return report;
}

} // namespace poisgen::endv
