#pragma once

#include <concepts>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

#include <gmpxx.h>

#include "poisgen/errors.hpp"

namespace poisgen {

/// The ground field: either the rationals or a prime field GF(p).
class FieldSpec {
public:
  static FieldSpec rationals() noexcept { return FieldSpec{0}; }

  /// Throws InputError unless p is prime.
  static FieldSpec prime(std::uint64_t p) {
    if (!is_prime(p) || p > max_prime_modulus)
      throw InputError("field modulus " + std::to_string(p) +
                       " is not a supported prime");
    return FieldSpec{static_cast<std::uint32_t>(p)};
  }

  /// "Q" or "F<p>", e.g. "F3".
  static FieldSpec parse(std::string_view text) {
    if (text == "Q")
      return rationals();
    if (text.size() >= 2 && text[0] == 'F') {
      std::uint64_t p = 0;
      for (char ch : text.substr(1)) {
        if (ch < '0' || ch > '9' || p > max_prime_modulus)
          throw InputError("malformed field '" + std::string(text) + "'");
        p = p * 10 + static_cast<std::uint64_t>(ch - '0');
      }
      return prime(p);
    }
    throw InputError("malformed field '" + std::string(text) +
                     "' (expected Q or F<p>)");
  }

  bool is_rational() const noexcept { return modulus_ == 0; }
  bool is_finite() const noexcept { return modulus_ != 0; }
  /// 0 for the rationals.
  std::uint32_t characteristic() const noexcept { return modulus_; }

  std::string to_string() const {
    return is_rational() ? std::string("Q") : "F" + std::to_string(modulus_);
  }

  friend bool operator==(FieldSpec, FieldSpec) = default;

  static constexpr std::uint64_t max_prime_modulus = 0x7fffffffULL;

  static constexpr bool is_prime(std::uint64_t n) noexcept {
    if (n < 2)
      return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0)
        return false;
    return true;
  }

private:
  explicit constexpr FieldSpec(std::uint32_t p) noexcept : modulus_(p) {}
  friend class Residue;

  std::uint32_t modulus_;
};

inline std::ostream &operator<<(std::ostream &os, FieldSpec f) {
  return os << f.to_string();
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty())
    return false;
  for (char ch : s)
    if (ch < '0' || ch > '9')
      return false;
  return true;
}

} // namespace detail

/// Element of Q, kept in lowest terms with a positive denominator.
class Rational {
public:
  Rational() = default;
  explicit Rational(long long n) : q_(static_cast<long>(n)) {}
  Rational(const mpz_class &num, const mpz_class &den) : q_(num, den) {
    if (den == 0)
      throw DomainError("zero denominator");
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

  static Rational zero(FieldSpec) { return Rational(); }
  static Rational one(FieldSpec) { return Rational(1); }
  static Rational from_int(long long n, FieldSpec) { return Rational(n); }

  /// Grammar `[-]digits[/digits]`.
  static Rational parse(std::string_view text, FieldSpec = FieldSpec::rationals()) {
    std::string_view body = text;
    bool negative = false;
    if (!body.empty() && body.front() == '-') {
      negative = true;
      body.remove_prefix(1);
    }
    const auto slash = body.find('/');
    const std::string_view num = body.substr(0, slash);
    const std::string_view den =
        slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den))
      throw InputError("malformed rational '" + std::string(text) + "'");
    mpz_class n(std::string(num), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0)
      throw InputError("zero denominator in '" + std::string(text) + "'");
    if (negative)
      n = -n;
    return Rational(n, d);
  }

  FieldSpec field() const noexcept { return FieldSpec::rationals(); }
  bool is_zero() const noexcept { return sgn(q_) == 0; }
  const mpq_class &value() const noexcept { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  Rational inverse() const {
    if (is_zero())
      throw DomainError("inverse of zero");
    return Rational(mpq_class(1) / q_);
  }

  std::string to_string() const { return q_.get_str(10); }

  Rational &operator+=(const Rational &o) { q_ += o.q_; return *this; }
  Rational &operator-=(const Rational &o) { q_ -= o.q_; return *this; }
  Rational &operator*=(const Rational &o) { q_ *= o.q_; return *this; }

  friend Rational operator+(Rational a, const Rational &b) { return a += b; }
  friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
  friend Rational operator-(const Rational &a) { return Rational(mpq_class(-a.q_)); }
  friend bool operator==(const Rational &a, const Rational &b) { return a.q_ == b.q_; }

private:
  mpq_class q_;
};

/// Element of GF(p); the residue is always in [0, p).
class Residue {
public:
  Residue(std::uint64_t value, FieldSpec f) : p_(f.modulus_) {
    if (p_ == 0)
      throw InputError("residue requires a prime field");
    v_ = static_cast<std::uint32_t>(value % p_);
  }

  static Residue zero(FieldSpec f) { return Residue(0, f); }
  static Residue one(FieldSpec f) { return Residue(1, f); }
  static Residue from_int(long long n, FieldSpec f) {
    Residue r(0, f);
    const long long m = n % static_cast<long long>(r.p_);
    r.v_ = static_cast<std::uint32_t>(m < 0 ? m + r.p_ : m);
    return r;
  }

  /// Grammar `digits`; reduced mod p.
  static Residue parse(std::string_view text, FieldSpec f) {
    if (!f.is_finite())
      throw InputError("residue syntax requires a prime field");
    if (!detail::all_digits(text))
      throw InputError("malformed residue '" + std::string(text) + "' for " +
                       f.to_string());
    std::uint64_t acc = 0;
    for (char ch : text)
      acc = (acc * 10 + static_cast<std::uint64_t>(ch - '0')) % f.characteristic();
    return Residue(acc, f);
  }

  FieldSpec field() const noexcept { return FieldSpec(p_); }
  bool is_zero() const noexcept { return v_ == 0; }
  std::uint32_t value() const noexcept { return v_; }

  Residue inverse() const {
    if (v_ == 0)
      throw DomainError("inverse of zero");
    // Fermat: v^(p-2)
    std::uint64_t result = 1, base = v_, e = p_ - 2;
    while (e) {
      if (e & 1)
        result = result * base % p_;
      base = base * base % p_;
      e >>= 1;
    }
    return raw(static_cast<std::uint32_t>(result), p_);
  }

  std::string to_string() const { return std::to_string(v_); }

  Residue &operator+=(const Residue &o) {
    same_field(o);
    const std::uint64_t s = std::uint64_t{v_} + o.v_;
    v_ = static_cast<std::uint32_t>(s >= p_ ? s - p_ : s);
    return *this;
  }
  Residue &operator-=(const Residue &o) {
    same_field(o);
    v_ = v_ >= o.v_ ? v_ - o.v_ : static_cast<std::uint32_t>(std::uint64_t{v_} + p_ - o.v_);
    return *this;
  }
  Residue &operator*=(const Residue &o) {
    same_field(o);
    v_ = static_cast<std::uint32_t>(std::uint64_t{v_} * o.v_ % p_);
    return *this;
  }

  friend Residue operator+(Residue a, const Residue &b) { return a += b; }
  friend Residue operator-(Residue a, const Residue &b) { return a -= b; }
  friend Residue operator*(Residue a, const Residue &b) { return a *= b; }
  friend Residue operator-(const Residue &a) {
    return raw(a.v_ == 0 ? 0 : a.p_ - a.v_, a.p_);
  }
  friend bool operator==(const Residue &a, const Residue &b) {
    return a.p_ == b.p_ && a.v_ == b.v_;
  }

private:
  Residue() = default;
  static Residue raw(std::uint32_t v, std::uint32_t p) {
    Residue r;
    r.v_ = v;
    r.p_ = p;
    return r;
  }
  void same_field(const Residue &o) const {
    if (p_ != o.p_)
      throw InputError("mixed-field operands: F" + std::to_string(p_) + " and F" +
                       std::to_string(o.p_));
  }

  std::uint32_t v_ = 0;
  std::uint32_t p_ = 0;
};

/// Field-tagged scalar whose field is chosen at runtime. Arithmetic between
/// different fields throws InputError.
class Scalar {
public:
  explicit Scalar(Rational r) : v_(std::move(r)) {}
  explicit Scalar(Residue r) : v_(r) {}

  static Scalar zero(FieldSpec f) { return from_int(0, f); }
  static Scalar one(FieldSpec f) { return from_int(1, f); }
  static Scalar from_int(long long n, FieldSpec f) {
    if (f.is_rational())
      return Scalar(Rational(n));
    return Scalar(Residue::from_int(n, f));
  }
  static Scalar parse(std::string_view text, FieldSpec f) {
    if (f.is_rational())
      return Scalar(Rational::parse(text));
    return Scalar(Residue::parse(text, f));
  }

  FieldSpec field() const {
    return std::visit([](const auto &x) { return x.field(); }, v_);
  }
  bool is_zero() const {
    return std::visit([](const auto &x) { return x.is_zero(); }, v_);
  }
  std::string to_string() const {
    return std::visit([](const auto &x) { return x.to_string(); }, v_);
  }
  Scalar inverse() const {
    return std::visit([](const auto &x) { return Scalar(x.inverse()); }, v_);
  }

  const std::variant<Rational, Residue> &value() const noexcept { return v_; }

  friend Scalar operator+(const Scalar &a, const Scalar &b) {
    return a.combine(b, [](const auto &x, const auto &y) { return x + y; });
  }
  friend Scalar operator-(const Scalar &a, const Scalar &b) {
    return a.combine(b, [](const auto &x, const auto &y) { return x - y; });
  }
  friend Scalar operator*(const Scalar &a, const Scalar &b) {
    return a.combine(b, [](const auto &x, const auto &y) { return x * y; });
  }
  friend Scalar operator-(const Scalar &a) {
    return std::visit([](const auto &x) { return Scalar(-x); }, a.v_);
  }
  Scalar &operator+=(const Scalar &o) { return *this = *this + o; }
  Scalar &operator-=(const Scalar &o) { return *this = *this - o; }
  Scalar &operator*=(const Scalar &o) { return *this = *this * o; }
  friend bool operator==(const Scalar &a, const Scalar &b) { return a.v_ == b.v_; }

private:
  template <class Op> Scalar combine(const Scalar &o, Op op) const {
    return std::visit(
        [&](const auto &x, const auto &y) -> Scalar {
          using X = std::decay_t<decltype(x)>;
          using Y = std::decay_t<decltype(y)>;
          if constexpr (std::is_same_v<X, Y>)
            return Scalar(op(x, y));
          else
            throw InputError("mixed-field operands: " + x.field().to_string() +
                             " and " + y.field().to_string());
        },
        v_, o.v_);
  }

  std::variant<Rational, Residue> v_;
};

/// Exact field element usable by the structure-constant machinery.
template <class T>
concept FieldElement = std::equality_comparable<T> &&
    requires(const T a, const T b, FieldSpec f, std::string_view s, long long n) {
  { T::zero(f) } -> std::same_as<T>;
  { T::one(f) } -> std::same_as<T>;
  { T::from_int(n, f) } -> std::same_as<T>;
  { T::parse(s, f) } -> std::same_as<T>;
  { a + b } -> std::same_as<T>;
  { a - b } -> std::same_as<T>;
  { a * b } -> std::same_as<T>;
  { -a } -> std::same_as<T>;
  { a.inverse() } -> std::same_as<T>;
  { a.is_zero() } -> std::same_as<bool>;
  { a.field() } -> std::same_as<FieldSpec>;
  { a.to_string() } -> std::same_as<std::string>;
};

static_assert(FieldElement<Rational>);
static_assert(FieldElement<Residue>);
static_assert(FieldElement<Scalar>);

template <FieldElement T> T field_add(const T &a, const T &b) { return a + b; }
template <FieldElement T> T field_mul(const T &a, const T &b) { return a * b; }
template <FieldElement T> T field_neg(const T &a) { return -a; }
template <FieldElement T> T field_inv(const T &a) { return a.inverse(); }

inline Scalar parse_scalar(std::string_view text, FieldSpec field) {
  return Scalar::parse(text, field);
}

inline std::ostream &operator<<(std::ostream &os, const Rational &x) { return os << x.to_string(); }
inline std::ostream &operator<<(std::ostream &os, const Residue &x) { return os << x.to_string(); }
inline std::ostream &operator<<(std::ostream &os, const Scalar &x) { return os << x.to_string(); }

} // namespace poisgen
