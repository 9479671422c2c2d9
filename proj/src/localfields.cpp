#include "kummer/localfields.hpp"

#include <algorithm>
#include <stdexcept>

namespace kummer {

namespace {

std::int64_t mod_floor(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

std::int64_t mod_floor(const BigInt& a, std::int64_t m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

// Jacobi symbol (a/n) for odd n > 0.
int jacobi(std::uint64_t a, std::uint64_t n) {
  a %= n;
  int t = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      std::uint64_t r = n & 7;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

// Split |n| into (square-free part, cofactor) by trial division up to the
// cube root; the cofactor keeps only primes above the cube root.
std::uint64_t squarefree_abs(std::uint64_t m) {
  std::uint64_t result = 1;
  auto strip = [&](std::uint64_t d) {
    int e = 0;
    while (m % d == 0) {
      m /= d;
      ++e;
    }
    if (e & 1) result *= d;
  };
  strip(2);
  strip(3);
  for (std::uint64_t d = 5;
       static_cast<unsigned __int128>(d) * d * d <= m; d += 6) {
    strip(d);
    strip(d + 2);
  }
  // m is 1, q, q^2 or q*q' with q, q' prime.
  if (m > 1) {
    auto r = static_cast<std::uint64_t>(isqrt(BigInt(m)));
    if (r * r != m) result *= m;
  }
  return result;
}

}  // namespace

Place Place::prime(std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("place: " + std::to_string(p) + " is not prime");
  return Place(p);
}

std::string Place::to_string() const { return is_real() ? "inf" : std::to_string(p_); }

HalfInt HalfInt::parse(const std::string& s) {
  if (s == "0") return zero();
  if (s == "1/2") return half();
  throw std::invalid_argument("not an element of (1/2)Z/Z: " + s);
}

Field Field::padic(std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("field: " + std::to_string(p) + " is not prime");
  return Field(Kind::Padic, p);
}

std::string Field::to_string() const {
  switch (kind_) {
    case Kind::Rationals: return "Q";
    case Kind::Real: return "R";
    case Kind::Padic: return "Q_" + std::to_string(p_);
  }
  return "?";
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (std::int64_t d = 5; d * d <= n; d += 6)
    if (n % d == 0 || n % (d + 2) == 0) return false;
  return true;
}

std::vector<std::int64_t> primes_up_to(std::int64_t limit) {
  std::vector<std::int64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

std::vector<std::int64_t> prime_divisors(const BigInt& n) {
  if (n == 0) throw std::invalid_argument("prime_divisors: zero");
  BigInt m = abs(n);
  std::vector<std::int64_t> out;
  auto strip = [&](std::int64_t d) {
    if (m % d == 0) {
      out.push_back(d);
      while (m % d == 0) m /= d;
    }
  };
  strip(2);
  strip(3);
  for (std::int64_t d = 5; BigInt(d) * d <= m; d += 6) {
    strip(d);
    strip(d + 2);
  }
  if (m > 1) {
    if (m > std::numeric_limits<std::int64_t>::max())
      throw std::overflow_error("prime_divisors: cofactor exceeds 64 bits");
    out.push_back(static_cast<std::int64_t>(m));
  }
  std::sort(out.begin(), out.end());
  return out;
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) throw std::invalid_argument("isqrt: negative");
  return boost::multiprecision::sqrt(n);
}

bool is_perfect_square(const BigInt& n) {
  if (n < 0) return false;
  BigInt r = isqrt(n);
  return r * r == n;
}

int valuation(const BigInt& n, std::int64_t p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  BigInt m = n;
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  return v;
}

int valuation(std::int64_t n, std::int64_t p) {
  if (n == 0) throw std::invalid_argument("valuation of zero");
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

std::int64_t squarefree_part(std::int64_t n) {
  if (n == 0) throw std::invalid_argument("squarefree_part: zero");
  std::uint64_t m = n < 0 ? 0 - static_cast<std::uint64_t>(n) : static_cast<std::uint64_t>(n);
  auto s = static_cast<std::int64_t>(squarefree_abs(m));
  return n < 0 ? -s : s;
}

BigInt squarefree_part(const BigInt& n) {
  if (n == 0) throw std::invalid_argument("squarefree_part: zero");
  if (abs(n) <= std::numeric_limits<std::int64_t>::max())
    return BigInt(squarefree_part(static_cast<std::int64_t>(n)));
  BigInt m = abs(n);
  BigInt result = 1;
  auto strip = [&](std::int64_t d) {
    int e = 0;
    while (m % d == 0) {
      m /= d;
      ++e;
    }
    if (e & 1) result *= d;
  };
  strip(2);
  strip(3);
  for (std::int64_t d = 5; BigInt(d) * d * d <= m; d += 6) {
    strip(d);
    strip(d + 2);
  }
  if (m > 1 && !is_perfect_square(m)) result *= m;
  return n < 0 ? BigInt(-result) : result;
}

int legendre_class(std::int64_t u, std::int64_t p) {
  if (p == 2) throw std::invalid_argument("legendre_class: p must be odd");
  std::int64_t r = mod_floor(u, p);
  if (r == 0) throw std::invalid_argument("legendre_class: p divides u");
  return jacobi(static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(p)) == 1 ? 0 : 1;
}

int legendre_class(const BigInt& u, std::int64_t p) {
  if (p == 2) throw std::invalid_argument("legendre_class: p must be odd");
  return legendre_class(mod_floor(u, p), p);
}

namespace {

// Integer in the same square class as x: numerator times denominator.
BigInt class_integer(const Rational& x) {
  if (x == 0) throw std::invalid_argument("square class of zero");
  return numerator(x) * denominator(x);
}

PadicClass padic_class_of_integer(const BigInt& n, std::int64_t p) {
  BigInt m = n;
  int v = 0;
  while (m % p == 0) {
    m /= p;
    ++v;
  }
  PadicClass c{p, v & 1, 0};
  if (p == 2)
    c.unit = static_cast<int>(mod_floor(m, 8));
  else
    c.unit = legendre_class(m, p);
  return c;
}

}  // namespace

RationalClass rational_class(const Rational& x) { return {squarefree_part(class_integer(x))}; }

PadicClass padic_class(const Rational& x, std::int64_t p) {
  if (!is_prime(p)) throw std::invalid_argument("padic_class: p not prime");
  return padic_class_of_integer(class_integer(x), p);
}

RealClass real_class(const Rational& x) {
  if (x == 0) throw std::invalid_argument("square class of zero");
  return {x < 0 ? -1 : 1};
}

SquareClass square_class(const Rational& x, const Field& field) {
  switch (field.kind()) {
    case Field::Kind::Rationals: return rational_class(x);
    case Field::Kind::Padic: return padic_class(x, field.p());
    case Field::Kind::Real: return real_class(x);
  }
  throw std::logic_error("unreachable");
}

PadicClass multiply(const PadicClass& x, const PadicClass& y) {
  if (x.p != y.p) throw std::invalid_argument("multiply: square classes of different fields");
  PadicClass r{x.p, x.val_parity ^ y.val_parity, 0};
  r.unit = x.p == 2 ? (x.unit * y.unit) % 8 : (x.unit ^ y.unit);
  return r;
}

SquareClass multiply(const SquareClass& x, const SquareClass& y) {
  if (x.index() != y.index())
    throw std::invalid_argument("multiply: square classes of different fields");
  if (auto* rx = std::get_if<RationalClass>(&x)) {
    const BigInt& a = rx->rep;
    const BigInt& b = std::get<RationalClass>(y).rep;
    BigInt g = gcd(a, b);
    return RationalClass{(a / g) * (b / g)};
  }
  if (auto* px = std::get_if<PadicClass>(&x)) return multiply(*px, std::get<PadicClass>(y));
  return RealClass{std::get<RealClass>(x).sign * std::get<RealClass>(y).sign};
}

bool is_square(const SquareClass& c) {
  if (auto* r = std::get_if<RationalClass>(&c)) return r->rep == 1;
  if (auto* p = std::get_if<PadicClass>(&c)) return is_square(*p);
  return std::get<RealClass>(c).sign > 0;
}

std::string to_string(const SquareClass& c) {
  if (auto* r = std::get_if<RationalClass>(&c)) return r->rep.str();
  if (auto* p = std::get_if<PadicClass>(&c))
    return "Q_" + std::to_string(p->p) + "(v=" + std::to_string(p->val_parity) +
           ",u=" + std::to_string(p->unit) + ")";
  return std::get<RealClass>(c).sign > 0 ? "+" : "-";
}

HalfInt hilbert(const PadicClass& a, const PadicClass& b) {
  if (a.p != b.p) throw std::invalid_argument("hilbert: classes of different fields");
  const std::int64_t p = a.p;
  int e;
  if (p == 2) {
    auto eps = [](int u) { return ((u - 1) / 2) & 1; };
    auto omega = [](int u) { return ((u * u - 1) / 8) & 1; };
    e = eps(a.unit) * eps(b.unit) + a.val_parity * omega(b.unit) + b.val_parity * omega(a.unit);
  } else {
    int eps_p = static_cast<int>(((p - 1) / 2) & 1);
    e = a.val_parity * b.val_parity * eps_p + b.val_parity * a.unit + a.val_parity * b.unit;
  }
  return HalfInt((e & 1) != 0);
}

HalfInt hilbert(const RealClass& a, const RealClass& b) { return HalfInt(a.sign < 0 && b.sign < 0); }

HalfInt hilbert(const Rational& a, const Rational& b, const Place& place) {
  if (a == 0 || b == 0) throw std::invalid_argument("hilbert: zero argument");
  if (place.is_real()) return hilbert(real_class(a), real_class(b));
  return hilbert(padic_class(a, place.p()), padic_class(b, place.p()));
}

std::vector<std::int64_t> hilbert_support(const Rational& a, const Rational& b) {
  std::vector<std::int64_t> out{2};
  for (const BigInt& n : {numerator(a), denominator(a), numerator(b), denominator(b)}) {
    if (abs(n) == 1) continue;
    for (auto q : prime_divisors(n)) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace kummer
