#include "kummer/ellcurve.hpp"

#include <stdexcept>

namespace kummer {

CurveAB::CurveAB(std::int64_t a, std::int64_t b) : a_(a), b_(b) {
  if (a == 0 || b == 0) throw std::invalid_argument("curve: zero root");
  if (a == b) throw std::invalid_argument("curve: a = b");
}

std::vector<std::int64_t> bad_primes(const CurveAB& e) {
  BigInt d = BigInt(2) * e.a() * e.b() * (BigInt(e.a()) - e.b());
  return prime_divisors(d);
}

bool is_good_prime(const CurveAB& e, std::int64_t p) {
  if (p == 2) return false;
  return e.a() % p != 0 && e.b() % p != 0 && (e.a() - e.b()) % p != 0;
}

PointCount count_points(const CurveAB& e, std::int64_t p) {
  if (!is_prime(p) || !is_good_prime(e, p))
    throw std::invalid_argument("count_points: p = " + std::to_string(p) +
                                " is not an odd prime of good reduction");
  thread_local std::vector<std::int8_t> chi;
  chi.assign(static_cast<std::size_t>(p), -1);
  chi[0] = 0;
  for (std::int64_t i = 1; i <= (p - 1) / 2; ++i) chi[(i * i) % p] = 1;
  std::int64_t a = ((e.a() % p) + p) % p, b = ((e.b() % p) + p) % p;
  std::int64_t sum = 0;
  for (std::int64_t x = 0; x < p; ++x) {
    std::int64_t xa = x - a, xb = x - b;
    if (xa < 0) xa += p;
    if (xb < 0) xb += p;
    sum += chi[(x * xa % p) * xb % p];
  }
  PointCount pc;
  pc.count = p + 1 + sum;
  pc.ap = -sum;
  return pc;
}

Rational j_invariant(const CurveAB& e) {
  BigInt a = e.a(), b = e.b();
  BigInt c = a * a - a * b + b * b;
  BigInt num = 256 * c * c * c;
  BigInt den = a * a * b * b * (a - b) * (a - b);
  return Rational(num, den);
}

IsogenyReport isogeny_flags(const CurveAB& e, const CurveAB& e2, std::int64_t prime_bound) {
  if (prime_bound < 100) throw std::invalid_argument("isogeny_flags: prime_bound must be >= 100");
  IsogenyReport r;
  r.prime_bound = prime_bound;
  r.q_isogenous = true;
  r.geometrically_isogenous = true;
  const std::int64_t ls[] = {3, 5, 7, 11, 13};
  for (auto l : ls) r.l_torsion_hom[l] = true;
  for (auto p : primes_up_to(prime_bound)) {
    if (p == 2 || !is_good_prime(e, p) || !is_good_prime(e2, p)) continue;
    auto c1 = count_points(e, p), c2 = count_points(e2, p);
    if (c1.ap != c2.ap) r.q_isogenous = false;
    if (c1.ap * c1.ap != c2.ap * c2.ap) r.geometrically_isogenous = false;
    for (auto l : ls)
      if (p != l && (c1.count - c2.count) % l != 0) r.l_torsion_hom[l] = false;
  }
  return r;
}

}  // namespace kummer
