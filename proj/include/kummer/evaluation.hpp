#pragma once

// Local evaluation of 2-torsion Brauer classes on z^2 = x(x-a)(x-b) u(u-a')(u-b'):
// evaluation at points, colourings of S(Q_p) by box subdivision, fast
// constancy criteria and the resulting BM-relevant primes.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kummer/localfields.hpp"
#include "kummer/surface.hpp"

namespace kummer {

/// max of v_p over a, b, a-b, a', b', a'-b'.
int appr_level(const KummerSurface& s, std::int64_t p);

/// Sum over the pairs of alpha of ((x-mu)(x-b), (u-nu)(u-b')) at the place.
/// Throws std::domain_error if a symbol slot vanishes or if f(x) g(u) is not a
/// nonzero square in the completion.
HalfInt evaluate_point(const KummerSurface& s, const BrauerClass& alpha, const Place& place,
                       const Rational& x, const Rational& u);

/// Residue box {v_p(X - x0) >= e, v_p(U - u0) >= e} in scaled coordinates
/// X = p^scale * x, U = p^scale * u (scale is 2 at p = 2 and 0 otherwise).
struct Box {
  std::int64_t x0 = 0;
  std::int64_t u0 = 0;
  int e = 1;
  friend bool operator==(const Box&, const Box&) = default;
};

struct Colouring {
  KummerSurface surface{1, 2, 1, 2};
  F2Vec vector = 0;
  std::int64_t p = 0;
  int scale = 0;
  std::vector<Box> boxes0;
  std::vector<Box> boxes_half;
  /// Number of boxes per level recorded as provably empty.
  std::map<int, std::int64_t> empty_count;
  /// Number of boxes per level of each colour (kept even when boxes are not stored).
  std::map<int, std::int64_t> count0, count_half;
  /// The region v_p(X) < 0 or v_p(U) < 0 has colour 0.
  bool tail0 = true;
  /// False when the run stopped at the first box of colour 1/2.
  bool complete = true;

  bool constant() const { return count_half.empty(); }
  /// True iff the coloured and empty boxes have total Haar measure 1 exactly.
  bool measure_balanced() const;
};

struct ColouringOptions {
  /// Also try the forms (w1, -L1 L2) and (-L1 L2, w2), valid on S because
  /// f(x) g(u) is a square there.
  bool rewrite = true;
  /// Stop at the first box of colour 1/2.
  bool stop_at_half = false;
  /// Keep box lists (otherwise only per-level counts).
  bool store_boxes = true;
  /// Override of the subdivision level cap; 0 means the default 2l + 8
  /// (l increased by 3 at p = 2, plus the scale).
  int level_cap = 0;
};

/// Raised when subdivision exceeds the level cap: the class does not extend
/// over S at p, or the symbols stay undecided (e.g. with rewrite off).
class ColouringError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Colouring colouring(const KummerSurface& s, const BrauerClass& alpha, std::int64_t p,
                    const ColouringOptions& opt = {});

/// Colour of the box containing the scaled integer point (X, U); nullopt when
/// the point lies in an empty box. Requires stored boxes.
class ColouringLookup {
public:
  explicit ColouringLookup(const Colouring& c);
  std::optional<HalfInt> colour(const BigInt& X, const BigInt& U) const;

private:
  struct Key {
    int e;
    std::int64_t x0, u0;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  std::int64_t p_;
  std::vector<int> levels_;
  std::unordered_map<Key, HalfInt, KeyHash> map_;
};

void write_colouring(std::ostream& os, const Colouring& c);
Colouring read_colouring(std::istream& is);

enum class Constancy { ConstantZero, NonConstant };
enum class ConstancyMethod { GoodReduction, CriterionA, CriterionB, Colouring };
std::string to_string(Constancy c);
std::string to_string(ConstancyMethod m);

struct ConstancyResult {
  Constancy verdict;
  ConstancyMethod method;
};

/// Decision order: good reduction at odd p, then the criterion for rank-one
/// classes translated to e1 (a = b != 0 mod p constant, a != b, a' != b' with
/// a non-unit coefficient non-constant), then a colouring. v must lie in the
/// local kernel at p.
ConstancyResult constancy(const KummerSurface& s, F2Vec v, std::int64_t p);
/// Same, but never takes the fast paths.
ConstancyResult constancy_by_colouring(const KummerSurface& s, F2Vec v, std::int64_t p);

/// Outcome of the rank-one criterion alone, if its hypotheses apply
/// (odd p, v of Type1).
std::optional<ConstancyResult> criterion_fast_path(const KummerSurface& s, F2Vec v,
                                                   std::int64_t p);

/// Primes dividing 2ab(a-b)a'b'(a'-b').
std::vector<std::int64_t> surface_bad_primes(const KummerSurface& s);

/// Bad primes at which the class has non-constant evaluation.
std::vector<std::int64_t> relevant_primes(const KummerSurface& s, F2Vec v);

/// The 2^(l-1) vectors in {0, 1/2}^l with coordinate sum 0, in binary order.
std::vector<std::vector<HalfInt>> admissible_vectors(std::size_t l);

}  // namespace kummer
