#pragma once

// The double-cover model z^2 = x(x-a)(x-b) u(u-a')(u-b') of Kum(E x E'),
// its Skorobogatov-Zarhin matrix and the F_2-kernel of that matrix over
// Q, Q_p and R.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kummer/localfields.hpp"

namespace kummer {

/// Coefficient quadruple (a, b, a', b'); a2/b2 stand for a', b'.
/// Coefficients are bounded by 2^30 in absolute value so that every matrix
/// entry and every translated coefficient fits in 64 bits.
class KummerSurface {
public:
  static constexpr std::int64_t kMaxCoefficient = std::int64_t{1} << 30;

  KummerSurface(std::int64_t a, std::int64_t b, std::int64_t a2, std::int64_t b2);

  std::int64_t a() const { return a_; }
  std::int64_t b() const { return b_; }
  std::int64_t a2() const { return a2_; }
  std::int64_t b2() const { return b2_; }
  std::array<std::int64_t, 4> coefficients() const { return {a_, b_, a2_, b2_}; }

  /// "(a, b, a', b')"
  std::string to_string() const;
  /// Parses "a,b,a2,b2".
  static KummerSurface parse(const std::string& s);

  friend auto operator<=>(const KummerSurface&, const KummerSurface&) = default;

private:
  std::int64_t a_, b_, a2_, b2_;
};

/// Element of F_2^4 with bit i standing for the coordinate of e_{i+1}.
using F2Vec = std::uint8_t;

constexpr F2Vec kE1 = 1, kE2 = 2, kE3 = 4, kE4 = 8;

/// "v1v2v3v4", e.g. "1000" for e_1.
std::string vec_to_string(F2Vec v);
F2Vec parse_vec(const std::string& s);
int vec_weight(F2Vec v);

struct SZMatrix {
  std::array<std::array<BigInt, 4>, 4> entries;
  /// Entrywise signed square-free parts.
  std::array<std::array<BigInt, 4>, 4> reduced;
};

SZMatrix sz_matrix(const KummerSurface& s);

/// All v in F_2^4 with mu(v) = 0 over the field, ascending; always contains 0.
std::vector<F2Vec> kernel(const KummerSurface& s, const Field& field);
/// Dimension of a subspace given by its full list of elements.
int subspace_dim(const std::vector<F2Vec>& elements);

enum class ClassType { Type1, Type2 };
std::string to_string(ClassType t);

/// Type2 iff the 2x2 matrix [[v1, v2], [v3, v4]] has rank 2 over F_2.
ClassType classify(F2Vec v);

/// A factor A_{mu,nu} = ((x - mu)(x - b), (u - nu)(u - b')) with mu in {0, a}
/// and nu in {0, a'}.
struct SymbolPair {
  std::int64_t mu = 0;
  std::int64_t nu = 0;
  friend bool operator==(const SymbolPair&, const SymbolPair&) = default;
};

struct BrauerClass {
  F2Vec vector = 0;
  std::vector<SymbolPair> pairs;
};

/// One pair per nonzero coordinate: e1 <-> (a, a'), e2 <-> (a, 0),
/// e3 <-> (0, a'), e4 <-> (0, 0).
std::vector<SymbolPair> symbol_pairs(const KummerSurface& s, F2Vec v);
BrauerClass brauer_class(const KummerSurface& s, F2Vec v);

/// Realisation of a rank-one vector v = [x - r] (x) [u - r'] as the single
/// symbol (prod_{rho != r} (x - rho), prod_{rho' != r'} (u - rho')).
struct SingleSymbol {
  std::int64_t x_root = 0;  ///< r in {0, a, b}
  std::int64_t u_root = 0;  ///< r' in {0, a', b'}
};
std::optional<SingleSymbol> single_symbol(const KummerSurface& s, F2Vec v);

/// Coordinate change relating two models of the same surface:
///  1. translate x by x_shift (a root of x(x-a)(x-b)), ordering the two
///     nonzero roots of the result as given by x_swap; likewise for u;
///  2. multiply all four coefficients by twist;
///  3. divide a, b by x_square^2 and a', b' by u_square^2;
///  4. if curve_swap, replace (a, b, a', b') by (-a', -b', -a, -b).
struct TransformRecord {
  std::int64_t x_shift = 0;
  bool x_swap = false;
  std::int64_t u_shift = 0;
  bool u_swap = false;
  std::int64_t twist = 1;
  std::int64_t x_square = 1;
  std::int64_t u_square = 1;
  bool curve_swap = false;

  std::string to_string() const;
};

KummerSurface apply_transform(const KummerSurface& s, const TransformRecord& t);
/// Image of a kernel vector of s under the transform (twists act trivially).
F2Vec map_vector(const KummerSurface& s, const TransformRecord& t, F2Vec v);

/// The 36 translation/ordering transforms of s (no twist, no swap).
std::vector<TransformRecord> orderings(const KummerSurface& s);

struct NormalForm {
  KummerSurface surface;
  TransformRecord transform;
  ClassType type;
  /// Image of the chosen kernel vector: e1 for Type1, e2+e3 for Type2.
  F2Vec vector;
};

/// Normal form with kernel vector e1 (a > b, a' < b', a, b, -a', -b' squares,
/// both pairs coprime) or, for Type2, with kernel vector e2+e3 (aa', bb',
/// (a-b)(a'-b') squares, square content removed). Among the admissible forms
/// the lexicographically smallest coefficient tuple is returned; Type1 is
/// preferred when requested type is absent. Throws std::domain_error when the
/// rational kernel has no vector of the requested type.
NormalForm canonical_form(const KummerSurface& s, std::optional<ClassType> type = std::nullopt);

/// True when s satisfies the Type1 normal-form conditions.
bool is_type1_normal(const KummerSurface& s);

}  // namespace kummer
