#pragma once

// Exact arithmetic in Q, Q_p and R: valuations, square-free parts, square
// classes and Hilbert symbols with values in (1/2)Z/Z.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace kummer {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A place of Q: a finite prime p, or the real place.
class Place {
public:
  static Place real() { return Place(0); }
  static Place prime(std::int64_t p);

  bool is_real() const { return p_ == 0; }
  /// The prime; 0 for the real place.
  std::int64_t p() const { return p_; }
  std::string to_string() const;

  friend bool operator==(const Place&, const Place&) = default;

private:
  explicit Place(std::int64_t p) : p_(p) {}
  std::int64_t p_;
};

/// An element of (1/2)Z/Z.
class HalfInt {
public:
  constexpr HalfInt() = default;
  constexpr explicit HalfInt(bool half) : half_(half) {}
  static constexpr HalfInt zero() { return HalfInt(false); }
  static constexpr HalfInt half() { return HalfInt(true); }

  constexpr bool is_half() const { return half_; }
  constexpr bool is_zero() const { return !half_; }

  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(half_ != o.half_); }
  constexpr HalfInt& operator+=(HalfInt o) { half_ = half_ != o.half_; return *this; }
  friend constexpr bool operator==(HalfInt, HalfInt) = default;

  /// "0" or "1/2".
  std::string to_string() const { return half_ ? "1/2" : "0"; }
  static HalfInt parse(const std::string& s);

private:
  bool half_ = false;
};

/// Square class in Q*: a signed square-free integer.
struct RationalClass {
  BigInt rep;
  friend bool operator==(const RationalClass&, const RationalClass&) = default;
};

/// Square class in Q_p*: valuation parity plus the class of the unit part.
/// For odd p the unit class is the Legendre bit (0 = square); for p = 2 it is
/// the residue of the unit part mod 8, one of 1, 3, 5, 7.
struct PadicClass {
  std::int64_t p = 0;
  int val_parity = 0;
  int unit = 0;
  friend bool operator==(const PadicClass&, const PadicClass&) = default;
};

/// Square class in R*: a sign.
struct RealClass {
  int sign = 1;
  friend bool operator==(const RealClass&, const RealClass&) = default;
};

using SquareClass = std::variant<RationalClass, PadicClass, RealClass>;

/// The field in which square classes are taken: Q, some Q_p, or R.
class Field {
public:
  enum class Kind { Rationals, Padic, Real };

  static Field rationals() { return Field(Kind::Rationals, 0); }
  static Field padic(std::int64_t p);
  static Field real() { return Field(Kind::Real, 0); }
  static Field completion(const Place& v) { return v.is_real() ? real() : padic(v.p()); }

  Kind kind() const { return kind_; }
  std::int64_t p() const { return p_; }
  std::string to_string() const;

  friend bool operator==(const Field&, const Field&) = default;

private:
  Field(Kind k, std::int64_t p) : kind_(k), p_(p) {}
  Kind kind_;
  std::int64_t p_;
};

bool is_prime(std::int64_t n);
/// Primes up to and including `limit` (simple sieve).
std::vector<std::int64_t> primes_up_to(std::int64_t limit);
/// Distinct prime divisors of |n|, ascending. n != 0.
std::vector<std::int64_t> prime_divisors(const BigInt& n);

/// Largest s >= 0 with s*s <= n.
BigInt isqrt(const BigInt& n);
bool is_perfect_square(const BigInt& n);

/// p-adic valuation of a nonzero integer.
int valuation(const BigInt& n, std::int64_t p);
int valuation(std::int64_t n, std::int64_t p);

/// The signed square-free s with n/s a positive square. Throws for n = 0.
BigInt squarefree_part(const BigInt& n);
std::int64_t squarefree_part(std::int64_t n);

/// 0 if u is a quadratic residue mod the odd prime p, 1 otherwise.
/// Throws if p = 2 or p | u.
int legendre_class(const BigInt& u, std::int64_t p);
int legendre_class(std::int64_t u, std::int64_t p);

RationalClass rational_class(const Rational& x);
PadicClass padic_class(const Rational& x, std::int64_t p);
RealClass real_class(const Rational& x);
/// Canonical square class of x != 0 in the given field.
SquareClass square_class(const Rational& x, const Field& field);

/// Group law of each representation. Both arguments must live in the same field.
SquareClass multiply(const SquareClass& x, const SquareClass& y);
PadicClass multiply(const PadicClass& x, const PadicClass& y);
bool is_square(const SquareClass& c);
inline bool is_square(const PadicClass& c) {
  return c.val_parity == 0 && c.unit == (c.p == 2 ? 1 : 0);
}
std::string to_string(const SquareClass& c);

/// Hilbert symbol (a,b) at the given place, valued in (1/2)Z/Z.
HalfInt hilbert(const Rational& a, const Rational& b, const Place& place);
/// Hilbert symbol on square-class representatives of the same Q_p.
HalfInt hilbert(const PadicClass& a, const PadicClass& b);
HalfInt hilbert(const RealClass& a, const RealClass& b);

/// Primes at which (a,b) can be non-trivial: 2 and the primes dividing the
/// numerators and denominators of a and b.
std::vector<std::int64_t> hilbert_support(const Rational& a, const Rational& b);

}  // namespace kummer
