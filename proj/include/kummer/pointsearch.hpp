#pragma once

// Search for non-trivial rational points on w^2 = f_{ab}(x, y) f_{a'b'}(u, v),
// f_{ab}(x, y) = x y (x - a y)(x - b y): square-free table, hash join on
// square-class representatives, multiplicative paging and smooth-only search.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

#include "kummer/evaluation.hpp"
#include "kummer/localfields.hpp"
#include "kummer/surface.hpp"

namespace kummer {

struct BinaryQuartic {
  std::int64_t a = 1;
  std::int64_t b = 2;
  BinaryQuartic() = default;
  BinaryQuartic(std::int64_t a_, std::int64_t b_);
  BigInt eval(std::int64_t x, std::int64_t y) const;
};

enum class SearchMode { Full, SmoothOnly };

struct SearchTask {
  std::vector<BinaryQuartic> curves;
  std::int64_t bound = 1;
  SearchMode mode = SearchMode::Full;
  /// Page-prime lower bound C; default 2 max |a_i|, |b_i|.
  std::optional<std::int64_t> smooth_bound;
  /// Emit pairs (i, i) as well as (i, j), i < j.
  bool same_curve_pairs = true;

  std::int64_t max_coefficient() const;
  std::int64_t table_limit() const;  ///< L = B (1 + max |a_i|, |b_i|)
  std::int64_t page_bound() const;   ///< C
  void validate() const;
};

inline constexpr std::size_t kDefaultTableBudgetBytes = std::size_t{1} << 31;

class TableBudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Square-free parts and smallest prime factors of 1..L from a linear sieve.
class SquarefreeTable {
public:
  explicit SquarefreeTable(std::int64_t limit, std::size_t budget_bytes = kDefaultTableBudgetBytes);
  std::int64_t limit() const { return limit_; }
  std::int64_t operator[](std::int64_t n) const { return sqf_[static_cast<std::size_t>(n)]; }
  std::int64_t smallest_prime(std::int64_t n) const { return spf_[static_cast<std::size_t>(n)]; }
  /// Largest prime dividing the square-free part of n (1 if none).
  std::int64_t largest_odd_order_prime(std::int64_t n) const;
  const std::vector<std::int64_t>& primes() const { return primes_; }

private:
  std::int64_t limit_;
  std::vector<std::uint32_t> sqf_, spf_;
  std::vector<std::int64_t> primes_;
};

SquarefreeTable build_squarefree_table(std::int64_t limit,
                                       std::size_t budget_bytes = kDefaultTableBudgetBytes);

struct ClassRep {
  __int128 p3;      ///< signed square-free representative of f(x, y)
  std::uint64_t h;  ///< p3 truncated to 64 bits
};

/// Throws std::domain_error for a trivial point.
ClassRep form_square_class(std::int64_t x, std::int64_t y, const BinaryQuartic& c,
                           const SquarefreeTable& t);

struct Quadruple {
  std::int64_t x, y;
  int curve;  ///< 0-based
  std::uint64_t h;
};

struct Solution {
  int i, j;  ///< 1-based curve indices, i <= j
  std::int64_t x, y, u, v;
  BigInt class_rep;
  friend bool operator==(const Solution&, const Solution&) = default;
};

/// Sort order of the output: (i, j, |x|, |y|, |u|, |v|, then signs).
bool solution_less(const Solution& s, const Solution& t);

bool verify_solution(std::int64_t x, std::int64_t y, std::int64_t u, std::int64_t v,
                     const BinaryQuartic& ci, const BinaryQuartic& cj);

struct SearchStats {
  std::int64_t quadruples = 0;
  std::int64_t candidate_pairs = 0;
  std::int64_t hash_collisions = 0;  ///< pairs with equal hash failing verification
  std::int64_t pages = 0;
  std::int64_t phase1_solutions = 0;
  std::int64_t phase2_solutions = 0;
};

std::vector<Solution> naive_search(const SearchTask& task, SearchStats* stats = nullptr);
std::vector<Solution> paged_search(const SearchTask& task, SearchStats* stats = nullptr);

/// One line per solution: "i j x y u v class_rep", tab separated.
void write_solutions(std::ostream& os, const std::vector<Solution>& sols);
std::vector<Solution> read_solutions(std::istream& is);

struct Coverage {
  std::vector<std::int64_t> primes;
  /// Value vectors packed with the first prime in the highest bit.
  std::set<std::uint32_t> vectors;
  std::size_t points = 0;
};

/// Evaluates alpha at the relevant primes on all points found by paged_search
/// of the task {(a, b), (a', b')} with pairs (1, 2).
Coverage vector_coverage(const KummerSurface& s, const BrauerClass& alpha, std::int64_t bound,
                         SearchMode mode = SearchMode::Full,
                         std::optional<std::int64_t> smooth_bound = std::nullopt,
                         std::optional<std::vector<std::int64_t>> primes = std::nullopt);

/// Packs a value vector as in Coverage::vectors.
std::uint32_t pack_vector(const std::vector<HalfInt>& v);

}  // namespace kummer
