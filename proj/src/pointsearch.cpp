#include "kummer/pointsearch.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

namespace kummer {

BinaryQuartic::BinaryQuartic(std::int64_t a_, std::int64_t b_) : a(a_), b(b_) {
  if (a == 0 || b == 0 || a == b) throw std::invalid_argument("binary quartic needs a, b != 0, a != b");
}

BigInt BinaryQuartic::eval(std::int64_t x, std::int64_t y) const {
  return BigInt(x) * y * (BigInt(x) - BigInt(a) * y) * (BigInt(x) - BigInt(b) * y);
}

std::int64_t SearchTask::max_coefficient() const {
  std::int64_t m = 0;
  for (const auto& c : curves) m = std::max({m, std::abs(c.a), std::abs(c.b)});
  return m;
}

std::int64_t SearchTask::table_limit() const { return bound * (1 + max_coefficient()); }

std::int64_t SearchTask::page_bound() const {
  return smooth_bound ? *smooth_bound : 2 * max_coefficient();
}

void SearchTask::validate() const {
  if (curves.empty()) throw std::invalid_argument("search task needs at least one curve");
  if (bound < 1) throw std::invalid_argument("search bound must be positive");
  if (smooth_bound && *smooth_bound < 1) throw std::invalid_argument("smooth bound must be positive");
  if (max_coefficient() > (std::int64_t{1} << 24) || bound > (std::int64_t{1} << 24))
    throw std::invalid_argument("search task out of range");
}

SquarefreeTable::SquarefreeTable(std::int64_t limit, std::size_t budget_bytes) : limit_(limit) {
  if (limit < 1) throw std::invalid_argument("square-free table needs L >= 1");
  const auto need = static_cast<std::size_t>(limit + 1) * 2 * sizeof(std::uint32_t);
  if (limit >= (std::int64_t{1} << 32) || need > budget_bytes)
    throw TableBudgetError("square-free table of length " + std::to_string(limit) +
                           " exceeds the memory budget of " + std::to_string(budget_bytes) +
                           " bytes");
  const auto n = static_cast<std::size_t>(limit);
  sqf_.assign(n + 1, 0);
  spf_.assign(n + 1, 0);
  sqf_[1] = 1;
  spf_[1] = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(static_cast<std::int64_t>(i));
    }
    const std::uint32_t p0 = spf_[i];
    const std::uint32_t m = static_cast<std::uint32_t>(i / p0);
    sqf_[i] = sqf_[m] % p0 == 0 ? sqf_[m] / p0 : sqf_[m] * p0;
    for (auto q : primes_) {
      if (q > p0 || i * static_cast<std::size_t>(q) > n) break;
      spf_[i * static_cast<std::size_t>(q)] = static_cast<std::uint32_t>(q);
    }
  }
}

std::int64_t SquarefreeTable::largest_odd_order_prime(std::int64_t n) const {
  std::int64_t s = (*this)[n], best = 1;
  while (s > 1) {
    const std::int64_t q = smallest_prime(s);
    best = q;
    s /= q;
  }
  return best;
}

SquarefreeTable build_squarefree_table(std::int64_t limit, std::size_t budget_bytes) {
  return SquarefreeTable(limit, budget_bytes);
}

namespace {

struct Factors {
  std::int64_t v[4];
};

Factors linear_factors(std::int64_t x, std::int64_t y, const BinaryQuartic& c) {
  return {{x, y, x - c.a * y, x - c.b * y}};
}

__int128 sqf_mul(__int128 s, __int128 t) {
  const __int128 g = std::gcd(s < 0 ? -s : s, t < 0 ? -t : t);
  return (s / g) * (t / g);
}

std::int64_t signed_sqf(std::int64_t m, const SquarefreeTable& t) {
  return m < 0 ? -t[-m] : t[m];
}

}  // namespace

ClassRep form_square_class(std::int64_t x, std::int64_t y, const BinaryQuartic& c,
                           const SquarefreeTable& t) {
  const Factors f = linear_factors(x, y, c);
  std::int64_t m[4];
  for (int k = 0; k < 4; ++k) {
    if (f.v[k] == 0) throw std::domain_error("form_square_class: trivial point");
    if (std::abs(f.v[k]) > t.limit())
      throw std::out_of_range("form_square_class: factor exceeds the table");
    m[k] = signed_sqf(f.v[k], t);
  }
  const __int128 p1 = sqf_mul(m[0], m[1]);
  const __int128 p2 = sqf_mul(m[2], m[3]);
  const __int128 p3 = sqf_mul(p1, p2);
  return {p3, static_cast<std::uint64_t>(p3)};
}

bool solution_less(const Solution& s, const Solution& t) {
  auto key = [](const Solution& q) {
    return std::make_tuple(q.i, q.j, std::abs(q.x), std::abs(q.y), std::abs(q.u), std::abs(q.v),
                           q.x, q.y, q.u, q.v);
  };
  return key(s) < key(t);
}

bool verify_solution(std::int64_t x, std::int64_t y, std::int64_t u, std::int64_t v,
                     const BinaryQuartic& ci, const BinaryQuartic& cj) {
  const Factors f1 = linear_factors(x, y, ci), f2 = linear_factors(u, v, cj);
  std::int64_t r[8];
  int sign = 1;
  for (int k = 0; k < 4; ++k) {
    r[k] = f1.v[k];
    r[k + 4] = f2.v[k];
  }
  for (auto& z : r) {
    if (z == 0) return false;
    if (z < 0) {
      sign = -sign;
      z = -z;
    }
  }
  // Cancel common factors pairwise; g^2 divides the product each time.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < 8; ++s)
      for (int t = s + 1; t < 8; ++t) {
        const std::int64_t g = std::gcd(r[s], r[t]);
        if (g > 1) {
          r[s] /= g;
          r[t] /= g;
          changed = true;
        }
      }
  }
  bool ok = sign > 0;
  for (auto z : r) {
    const auto q = static_cast<std::int64_t>(isqrt(BigInt(z)));
    if (q * q != z) ok = false;
  }
  const BigInt prod = ci.eval(x, y) * cj.eval(u, v);
  const bool wide = prod > 0 && is_perfect_square(prod);
  if (wide != ok) throw std::logic_error("verify_solution: gcd check disagrees with exact product");
  return ok;
}

namespace {

std::int64_t floor_div(std::int64_t n, std::int64_t d) {
  std::int64_t q = n / d;
  if ((n % d != 0) && ((n < 0) != (d < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t n, std::int64_t d) { return -floor_div(-n, d); }

BigInt to_big(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt r = BigInt(static_cast<std::uint64_t>(u >> 64));
  r <<= 64;
  r += static_cast<std::uint64_t>(u);
  return neg ? BigInt(-r) : r;
}

// Groups quadruples by hash and appends the verified pairs.
void join(std::vector<Quadruple>& quads, const SearchTask& task, const SquarefreeTable& table,
          std::vector<Solution>& out, SearchStats* stats) {
  std::stable_sort(quads.begin(), quads.end(),
                   [](const Quadruple& p, const Quadruple& q) { return p.h < q.h; });
  if (stats) stats->quadruples += static_cast<std::int64_t>(quads.size());
  for (std::size_t lo = 0; lo < quads.size();) {
    std::size_t hi = lo;
    while (hi < quads.size() && quads[hi].h == quads[lo].h) ++hi;
    for (std::size_t s = lo; s < hi; ++s)
      for (std::size_t t = lo; t < hi; ++t) {
        const auto& P = quads[s];
        const auto& Q = quads[t];
        if (P.curve > Q.curve) continue;
        if (P.curve == Q.curve) {
          if (!task.same_curve_pairs) continue;
          if (std::make_pair(P.x, P.y) >= std::make_pair(Q.x, Q.y)) continue;
        }
        const auto& ci = task.curves[static_cast<std::size_t>(P.curve)];
        const auto& cj = task.curves[static_cast<std::size_t>(Q.curve)];
        if (stats) ++stats->candidate_pairs;
        if (!verify_solution(P.x, P.y, Q.x, Q.y, ci, cj)) {
          if (stats) ++stats->hash_collisions;
          continue;
        }
        out.push_back({P.curve + 1, Q.curve + 1, P.x, P.y, Q.x, Q.y,
                       to_big(form_square_class(P.x, P.y, ci, table).p3)});
      }
    lo = hi;
  }
}

// Points [x : y] with y > 0, x != 0, gcd = 1 and |x|, |y| <= B.
template <class F>
void for_each_point(std::int64_t B, F&& fn) {
  for (std::int64_t y = 1; y <= B; ++y)
    for (std::int64_t x = -B; x <= B; ++x)
      if (x != 0 && std::gcd(x, y) == 1) fn(x, y);
}

bool nontrivial(const Factors& f) {
  return f.v[0] != 0 && f.v[1] != 0 && f.v[2] != 0 && f.v[3] != 0;
}

void finish(std::vector<Solution>& out) {
  std::sort(out.begin(), out.end(), solution_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
}

}  // namespace

std::vector<Solution> naive_search(const SearchTask& task, SearchStats* stats) {
  task.validate();
  if (task.mode != SearchMode::Full) throw std::invalid_argument("naive_search requires Full mode");
  const SquarefreeTable table(task.table_limit());
  std::vector<Quadruple> quads;
  for_each_point(task.bound, [&](std::int64_t x, std::int64_t y) {
    for (std::size_t i = 0; i < task.curves.size(); ++i) {
      if (!nontrivial(linear_factors(x, y, task.curves[i]))) continue;
      quads.push_back({x, y, static_cast<int>(i), form_square_class(x, y, task.curves[i], table).h});
    }
  });
  std::vector<Solution> out;
  join(quads, task, table, out, stats);
  finish(out);
  return out;
}

std::vector<Solution> paged_search(const SearchTask& task, SearchStats* stats) {
  task.validate();
  const std::int64_t B = task.bound, L = task.table_limit(), C = task.page_bound();
  const SquarefreeTable table(L);
  // Page primes must be good for every curve, so that a primitive point has
  // at most one factor divisible by them.
  std::set<std::int64_t> bad;
  for (const auto& c : task.curves)
    for (auto q : prime_divisors(BigInt(2) * c.a * c.b * (BigInt(c.a) - c.b))) bad.insert(q);
  auto page_prime = [&](std::int64_t q) { return q > C && !bad.count(q); };

  std::vector<std::uint8_t> marked(static_cast<std::size_t>(L + 1), 0);
  auto is_marked = [&](std::int64_t m) { return marked[static_cast<std::size_t>(std::abs(m))] != 0; };
  std::vector<Solution> out;

  if (task.mode == SearchMode::SmoothOnly) {
    for (std::int64_t m = 2; m <= L; ++m)
      for (std::int64_t r = table[m]; r > 1; r /= table.smallest_prime(r))
        if (page_prime(table.smallest_prime(r))) {
          marked[static_cast<std::size_t>(m)] = 1;
          break;
        }
  } else {
    const auto& primes = table.primes();
    std::vector<Quadruple> quads;
    for (auto it = primes.rbegin(); it != primes.rend() && *it > C; ++it) {
      const std::int64_t q = *it;
      if (!page_prime(q)) continue;
      quads.clear();
      // Keeps the point if it is primitive, non-trivial and has no marked factor.
      auto consider = [&](std::int64_t x, std::int64_t y, std::size_t i) {
        if (y == 0 || x == 0 || std::abs(x) > B || y > B || std::gcd(x, y) != 1) return;
        const Factors f = linear_factors(x, y, task.curves[i]);
        if (!nontrivial(f)) return;
        int divisible = 0;
        for (int k = 0; k < 4; ++k) {
          if (f.v[k] % q == 0) ++divisible;
          if (is_marked(f.v[k])) return;
        }
        if (divisible != 1)
          throw std::logic_error("paging: page prime " + std::to_string(q) + " divides " +
                                 std::to_string(divisible) + " factors of a primitive point");
        quads.push_back({x, y, static_cast<int>(i), form_square_class(x, y, task.curves[i], table).h});
      };
      for (std::int64_t m = q; m <= L; m += q) {
        if (valuation(m, q) % 2 == 0 || marked[static_cast<std::size_t>(m)]) continue;
        for (std::size_t i = 0; i < task.curves.size(); ++i) {
          const auto& c = task.curves[i];
          if (m <= B) {
            for (std::int64_t y = 1; y <= B; ++y) {
              consider(m, y, i);
              consider(-m, y, i);
            }
            for (std::int64_t x = -B; x <= B; ++x) consider(x, m, i);
          }
          // x - a y = s with |x| <= B, 1 <= y <= B
          for (std::int64_t a : {c.a, c.b})
            for (std::int64_t s : {m, -m}) {
              const std::int64_t t1 = -B - s, t2 = B - s;
              std::int64_t lo, hi;
              if (a > 0) {
                lo = ceil_div(t1, a);
                hi = floor_div(t2, a);
              } else {
                lo = ceil_div(t2, a);
                hi = floor_div(t1, a);
              }
              for (std::int64_t y = std::max<std::int64_t>(lo, 1); y <= std::min(hi, B); ++y)
                consider(a * y + s, y, i);
            }
        }
        marked[static_cast<std::size_t>(m)] = 1;
      }
      // A point may represent m through two slots only if m = |x| = |y| = 1,
      // which never happens for q > 1, but the x = +-m loops can repeat (x, y).
      std::sort(quads.begin(), quads.end(), [](const Quadruple& p, const Quadruple& r) {
        return std::tie(p.curve, p.x, p.y) < std::tie(r.curve, r.x, r.y);
      });
      quads.erase(std::unique(quads.begin(), quads.end(),
                              [](const Quadruple& p, const Quadruple& r) {
                                return p.curve == r.curve && p.x == r.x && p.y == r.y;
                              }),
                  quads.end());
      const std::size_t before = out.size();
      join(quads, task, table, out, stats);
      if (stats) {
        ++stats->pages;
        stats->phase1_solutions += static_cast<std::int64_t>(out.size() - before);
      }
    }
  }

  // Smooth pass.
  std::vector<Quadruple> quads;
  for_each_point(B, [&](std::int64_t x, std::int64_t y) {
    if (is_marked(x) || is_marked(y)) return;
    for (std::size_t i = 0; i < task.curves.size(); ++i) {
      const Factors f = linear_factors(x, y, task.curves[i]);
      if (!nontrivial(f) || is_marked(f.v[2]) || is_marked(f.v[3])) continue;
      quads.push_back({x, y, static_cast<int>(i), form_square_class(x, y, task.curves[i], table).h});
    }
  });
  const std::size_t before = out.size();
  join(quads, task, table, out, stats);
  if (task.mode == SearchMode::SmoothOnly) {
    // Classes may still contain bad primes above C.
    std::erase_if(out, [&](const Solution& sol) {
      BigInt r = abs(sol.class_rep);
      for (auto q : bad)
        while (q > C && r % q == 0) r /= q;
      return r != abs(sol.class_rep);
    });
  }
  if (stats) stats->phase2_solutions += static_cast<std::int64_t>(out.size() - before);
  finish(out);
  return out;
}

void write_solutions(std::ostream& os, const std::vector<Solution>& sols) {
  for (const auto& s : sols)
    os << s.i << '\t' << s.j << '\t' << s.x << '\t' << s.y << '\t' << s.u << '\t' << s.v << '\t'
       << s.class_rep << '\n';
}

std::vector<Solution> read_solutions(std::istream& is) {
  std::vector<Solution> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Solution s;
    std::string rep;
    ls >> s.i >> s.j >> s.x >> s.y >> s.u >> s.v >> rep;
    if (!ls) throw std::runtime_error("read_solutions: bad line: " + line);
    s.class_rep = BigInt(rep);
    out.push_back(s);
  }
  return out;
}

std::uint32_t pack_vector(const std::vector<HalfInt>& v) {
  std::uint32_t m = 0;
  for (auto h : v) m = m << 1 | (h.is_half() ? 1u : 0u);
  return m;
}

Coverage vector_coverage(const KummerSurface& s, const BrauerClass& alpha, std::int64_t bound,
                         SearchMode mode, std::optional<std::int64_t> smooth_bound,
                         std::optional<std::vector<std::int64_t>> primes) {
  Coverage cov;
  cov.primes = primes ? *primes : relevant_primes(s, alpha.vector);
  if (cov.primes.size() > 31) throw std::invalid_argument("vector_coverage: too many primes");
  SearchTask task;
  task.curves = {BinaryQuartic(s.a(), s.b()), BinaryQuartic(s.a2(), s.b2())};
  task.bound = bound;
  task.mode = mode;
  task.smooth_bound = smooth_bound;
  task.same_curve_pairs = false;
  const auto sols = paged_search(task);
  cov.points = sols.size();
  for (const auto& sol : sols) {
    const Rational x(sol.x, sol.y), u(sol.u, sol.v);
    std::vector<HalfInt> vec;
    for (auto p : cov.primes) vec.push_back(evaluate_point(s, alpha, Place::prime(p), x, u));
    cov.vectors.insert(pack_vector(vec));
  }
  return cov;
}

}  // namespace kummer
