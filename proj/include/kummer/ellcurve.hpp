#pragma once

// Elliptic curves y^2 = x(x-a)(x-b): bad primes, naive point counts over F_p,
// j-invariants and a congruence heuristic for isogenies.

#include <cstdint>
#include <map>
#include <vector>

#include "kummer/localfields.hpp"

namespace kummer {

class CurveAB {
public:
  CurveAB(std::int64_t a, std::int64_t b);
  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  friend bool operator==(const CurveAB&, const CurveAB&) = default;

private:
  std::int64_t a_, b_;
};

/// Primes dividing 2ab(a-b), ascending.
std::vector<std::int64_t> bad_primes(const CurveAB& e);
bool is_good_prime(const CurveAB& e, std::int64_t p);

struct PointCount {
  std::int64_t count;  ///< #E(F_p), including the point at infinity
  std::int64_t ap;     ///< p + 1 - count
};

/// Exhaustive count over x in F_p. Requires p odd and of good reduction.
PointCount count_points(const CurveAB& e, std::int64_t p);

/// j = 256 (a^2 - ab + b^2)^3 / (a^2 b^2 (a-b)^2).
Rational j_invariant(const CurveAB& e);

// Necessary-condition tests only: equal traces up to the bound do not prove
// an isogeny.
struct IsogenyReport {
  bool q_isogenous = false;
  bool geometrically_isogenous = false;
  std::int64_t prime_bound = 0;
  /// For odd primes l: #E(F_p) == #E'(F_p) mod l at every tested p != l.
  std::map<std::int64_t, bool> l_torsion_hom;
};

inline constexpr std::int64_t kDefaultIsogenyPrimeBound = 1000;

/// Compares traces at all odd primes p <= prime_bound good for both curves.
/// Throws if prime_bound < 100.
IsogenyReport isogeny_flags(const CurveAB& e, const CurveAB& e2,
                            std::int64_t prime_bound = kDefaultIsogenyPrimeBound);

}  // namespace kummer
