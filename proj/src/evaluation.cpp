#include "kummer/evaluation.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace kummer {

int appr_level(const KummerSurface& s, std::int64_t p) {
  int l = 0;
  for (std::int64_t c : {s.a(), s.b(), s.a() - s.b(), s.a2(), s.b2(), s.a2() - s.b2()})
    l = std::max(l, valuation(c, p));
  return l;
}

HalfInt evaluate_point(const KummerSurface& s, const BrauerClass& alpha, const Place& place,
                       const Rational& x, const Rational& u) {
  const Rational f = x * (x - s.a()) * (x - s.b());
  const Rational g = u * (u - s.a2()) * (u - s.b2());
  if (f * g == 0) throw std::domain_error("evaluate_point: point on the ramification locus");
  if (!is_square(square_class(f * g, Field::completion(place))))
    throw std::domain_error("evaluate_point: f(x) g(u) is not a square at " + place.to_string());
  HalfInt sum;
  for (const auto& pr : alpha.pairs) {
    const Rational w1 = (x - pr.mu) * (x - s.b());
    const Rational w2 = (u - pr.nu) * (u - s.b2());
    if (w1 == 0 || w2 == 0) throw std::domain_error("evaluate_point: symbol slot vanishes");
    sum += hilbert(w1, w2, place);
  }
  return sum;
}

bool Colouring::measure_balanced() const {
  int top = 0;
  for (const auto* m : {&count0, &count_half, &empty_count})
    if (!m->empty()) top = std::max(top, m->rbegin()->first);
  const BigInt q = BigInt(p) * p;
  BigInt total = 0;
  for (const auto* m : {&count0, &count_half, &empty_count})
    for (auto [e, n] : *m) total += BigInt(n) * pow(q, static_cast<unsigned>(top - e));
  return total == pow(q, static_cast<unsigned>(top));
}

namespace {

// Square classes in Q_p^* as a small xor group. Bit 0 is the valuation parity.
// Odd p: bit 1 is the Legendre bit of the unit part. p = 2: the unit
// (-1)^s 5^t mod 8 contributes s in bit 1 and t in bit 2.
using Code = std::int8_t;
constexpr Code kUndetermined = -1;

Code unit_code2(std::int64_t u8) {
  switch (u8) {
    case 1: return 0;
    case 3: return 6;
    case 5: return 4;
    case 7: return 2;
  }
  throw std::logic_error("unit_code2: even residue");
}

PadicClass decode(Code c, std::int64_t p) {
  PadicClass pc{p, c & 1, 0};
  if (p == 2) {
    const int s = c >> 1 & 1, t = c >> 2 & 1;
    pc.unit = s ? (t ? 3 : 7) : (t ? 5 : 1);
  } else {
    pc.unit = c >> 1 & 1;
  }
  return pc;
}

struct AxisInfo {
  Code lin[3];  // x - r for each root
  Code w[2];    // (x - mu)(x - b) for mu = 0, a
  Code f;       // x (x - a)(x - b)
  bool near;    // some root r with v_p(x - r) >= threshold on the whole box
};

using Wide = boost::multiprecision::int256_t;

class Engine {
public:
  Engine(const KummerSurface& s, const BrauerClass& alpha, std::int64_t p,
         const ColouringOptions& opt)
      : p_(p), opt_(opt) {
    if (!is_prime(p)) throw std::invalid_argument("colouring: p = " + std::to_string(p) + " is not prime");
    if (p > 3037000499LL)
      throw std::invalid_argument("colouring: prime too large for box subdivision");
    out_.surface = s;
    out_.vector = alpha.vector;
    out_.p = p;
    out_.scale = p == 2 ? 2 : 0;
    const std::int64_t k = p == 2 ? 4 : 1;
    xr_[0] = 0;
    xr_[1] = s.a() * k;
    xr_[2] = s.b() * k;
    ur_[0] = 0;
    ur_[1] = s.a2() * k;
    ur_[2] = s.b2() * k;
    const int l = appr_level(s, p);
    delta_ = p == 2 ? 3 : 1;
    // Neighbourhoods of the roots decided without subdivision, scaled coordinates.
    threshold_ = p == 2 ? l + 2 + 3 : l + 1;
    cap_ = opt.level_cap > 0 ? opt.level_cap : 2 * (p == 2 ? l + 3 : l) + 8 + out_.scale;
    // Largest level whose residues fit comfortably in 62 bits.
    max_repr_ = 0;
    for (__int128 q = 1; q * p <= (__int128{1} << 62); q *= p) ++max_repr_;
    for (const auto& pr : alpha.pairs) {
      const int mi = pr.mu == 0 ? 0 : 1;
      const int ni = pr.nu == 0 ? 0 : 1;
      if ((mi == 1 && pr.mu != s.a()) || (ni == 1 && pr.nu != s.a2()))
        throw std::invalid_argument("colouring: symbol pair does not match the surface");
      pairs_.push_back({mi, ni});
    }
    if (p != 2 && p < (1 << 22)) {
      chi_.assign(static_cast<std::size_t>(p), 1);
      for (std::int64_t i = 1; i < p; ++i) chi_[static_cast<std::size_t>(i * i % p)] = 0;
    }
    for (Code a = 0; a < 8; ++a)
      for (Code b = 0; b < 8; ++b)
        hil_[a][b] = (p != 2 && (a > 3 || b > 3))
                         ? false
                         : hilbert(decode(a, p), decode(b, p)).is_half();
    minus_one_ = p == 2 ? Code(2) : Code(p % 4 == 3 ? 2 : 0);
  }

  Colouring run() {
    std::vector<Box> stack{Box{0, 0, 0}};
    std::vector<AxisInfo> xs(static_cast<std::size_t>(p_)), us(static_cast<std::size_t>(p_));
    while (!stack.empty()) {
      const Box parent = stack.back();
      stack.pop_back();
      const int e = parent.e + 1;
      check_level(e);
      const std::int64_t pe = ipow(parent.e);
      for (std::int64_t i = 0; i < p_; ++i) {
        xs[static_cast<std::size_t>(i)] = axis(parent.x0 + i * pe, e, xr_);
        us[static_cast<std::size_t>(i)] = axis(parent.u0 + i * pe, e, ur_);
      }
      for (std::int64_t i = 0; i < p_; ++i)
        for (std::int64_t j = 0; j < p_; ++j) {
          const Box child{parent.x0 + i * pe, parent.u0 + j * pe, e};
          const auto& X = xs[static_cast<std::size_t>(i)];
          const auto& U = us[static_cast<std::size_t>(j)];
          int c = decide(X, U, e);
          // A half box must be shown to meet S(Q_p) before it counts.
          if (c == kHalf && (X.f == kUndetermined || U.f == kUndetermined)) {
            budget_ = kWitnessBudget;
            const int w = witness(child);
            c = w == 1 ? kHalf : w == 0 ? kEmpty : kOpen;
          }
          if (c == kEmpty) {
            ++out_.empty_count[e];
          } else if (c == kZero) {
            ++out_.count0[e];
            if (opt_.store_boxes) out_.boxes0.push_back(child);
          } else if (c == kHalf) {
            ++out_.count_half[e];
            if (opt_.store_boxes) out_.boxes_half.push_back(child);
            if (opt_.stop_at_half) {
              out_.complete = false;
              return out_;
            }
          } else {
            stack.push_back(child);
          }
        }
    }
    return out_;
  }

private:
  static constexpr int kEmpty = 0, kZero = 1, kHalf = 2, kOpen = 3;
  static constexpr long kWitnessBudget = 1 << 16;

  void check_level(int e) const {
    if (e > cap_)
      throw ColouringError("colouring did not terminate by level " + std::to_string(cap_) +
                           " at p = " + std::to_string(p_) + " for class " +
                           vec_to_string(out_.vector) + " on " + out_.surface.to_string());
    if (e > max_repr_)
      throw ColouringError("colouring exceeded 64-bit box precision at level " +
                           std::to_string(e));
  }

  std::int64_t ipow(int e) const {
    std::int64_t q = 1;
    for (int i = 0; i < e; ++i) q *= p_;
    return q;
  }

  Code unit_code(std::int64_t u) const {
    if (p_ == 2) return unit_code2(((u % 8) + 8) % 8);
    std::int64_t r = ((u % p_) + p_) % p_;
    if (!chi_.empty()) return Code(chi_[static_cast<std::size_t>(r)] << 1);
    return Code(legendre_class(r, p_) << 1);
  }

  int wide_val(Wide& n) const {
    int v = 0;
    while (n % p_ == 0) {
      n /= p_;
      ++v;
    }
    return v;
  }

  // Class of prod (d_i + y) for y in p^e Z_p, when constant by the Taylor
  // bound v(c_k) + k e >= v(c_0) + delta on the coefficients c_k.
  Code poly_class(const std::int64_t* d, int n, int e) const {
    Wide c[4] = {1, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
      for (int k = i + 1; k > 0; --k) c[k] = c[k] * d[i] + c[k - 1];
      c[0] *= d[i];
    }
    if (c[0] == 0) return kUndetermined;
    Wide unit = c[0];
    const int v0 = wide_val(unit);
    for (int k = 1; k <= n; ++k) {
      if (c[k] == 0) continue;
      Wide t = c[k];
      if (wide_val(t) + k * e < v0 + delta_) return kUndetermined;
    }
    const std::int64_t m = p_ == 2 ? 8 : p_;
    Wide r = unit % m;
    if (r < 0) r += m;
    return Code((v0 & 1) | unit_code(static_cast<std::int64_t>(r)));
  }

  Code product_class(const std::int64_t* d, const Code* lin, std::initializer_list<int> idx,
                     int e) const {
    Code acc = 0;
    bool all = true;
    for (int k : idx) {
      if (lin[k] == kUndetermined) all = false;
      else acc ^= lin[k];
    }
    if (all) return acc;
    std::int64_t dd[3];
    int n = 0;
    for (int k : idx) dd[n++] = d[k];
    return poly_class(dd, n, e);
  }

  AxisInfo axis(std::int64_t x0, int e, const std::int64_t (&roots)[3]) const {
    AxisInfo info{{kUndetermined, kUndetermined, kUndetermined}, {}, kUndetermined, false};
    std::int64_t d[3];
    for (int k = 0; k < 3; ++k) {
      d[k] = x0 - roots[k];
      std::int64_t t = d[k];
      if (t == 0) {
        if (e >= threshold_) info.near = true;
        continue;
      }
      int v = 0;
      while (t % p_ == 0) {
        t /= p_;
        ++v;
      }
      // v_p(x - r) is only known on the box when v < e.
      if (v >= threshold_ && e >= threshold_) info.near = true;
      if (v + delta_ <= e) info.lin[k] = Code((v & 1) | unit_code(t));
    }
    info.w[0] = product_class(d, info.lin, {0, 2}, e);
    info.w[1] = product_class(d, info.lin, {1, 2}, e);
    info.f = product_class(d, info.lin, {0, 1, 2}, e);
    return info;
  }

  static Code mul(Code a, Code b) {
    return (a == kUndetermined || b == kUndetermined) ? kUndetermined : Code(a ^ b);
  }

  // 0, 1 for the symbol value; -1 if undecided on the box.
  int form(Code s1, Code s2) const {
    if (s1 == 0 || s2 == 0) return 0;
    if (s1 == kUndetermined || s2 == kUndetermined) return -1;
    return hil_[s1][s2] ? 1 : 0;
  }

  int decide(const AxisInfo& X, const AxisInfo& U, int e) const {
    if (X.f != kUndetermined && U.f != kUndetermined && (X.f ^ U.f) != 0) return kEmpty;
    if (e >= threshold_ && X.near && U.near) return kZero;
    int total = 0;
    for (auto [mi, ni] : pairs_) {
      const Code w1 = X.w[mi];
      const Code w2 = U.w[ni];
      int c = form(w1, w2);
      if (c < 0 && opt_.rewrite) {
        const Code l12 = mul(mul(X.lin[1 - mi], U.lin[1 - ni]), minus_one_);
        c = form(w1, l12);
        if (c < 0) c = form(l12, w2);
      }
      if (c < 0) return kOpen;
      total ^= c;
    }
    return total ? kHalf : kZero;
  }

  // 1 if the box contains a sub-box on which f g is a determined square,
  // 0 if it is empty, -1 if the search budget ran out.
  int witness(const Box& b) {
    const int e = b.e + 1;
    if (e > max_repr_ || --budget_ < 0) return -1;
    const std::int64_t pe = ipow(b.e);
    std::vector<AxisInfo> xs, us;
    for (std::int64_t i = 0; i < p_; ++i) {
      xs.push_back(axis(b.x0 + i * pe, e, xr_));
      us.push_back(axis(b.u0 + i * pe, e, ur_));
    }
    bool open = false;
    std::vector<Box> deeper;
    for (std::int64_t i = 0; i < p_; ++i)
      for (std::int64_t j = 0; j < p_; ++j) {
        const Code f = xs[static_cast<std::size_t>(i)].f, g = us[static_cast<std::size_t>(j)].f;
        if (f != kUndetermined && g != kUndetermined) {
          if (f == g) return 1;
        } else {
          deeper.push_back({b.x0 + i * pe, b.u0 + j * pe, e});
        }
      }
    for (const auto& c : deeper) {
      const int r = witness(c);
      if (r == 1) return 1;
      if (r < 0) open = true;
      if (budget_ < 0) return -1;
    }
    return open ? -1 : 0;
  }

  std::int64_t p_;
  ColouringOptions opt_;
  Colouring out_;
  std::int64_t xr_[3], ur_[3];
  int delta_ = 1, threshold_ = 1, cap_ = 10, max_repr_ = 0;
  long budget_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::uint8_t> chi_;
  bool hil_[8][8];
  Code minus_one_ = 0;
};
}  // namespace

Colouring colouring(const KummerSurface& s, const BrauerClass& alpha, std::int64_t p,
                    const ColouringOptions& opt) {
  return Engine(s, alpha, p, opt).run();
}

std::size_t ColouringLookup::KeyHash::operator()(const Key& k) const {
  std::uint64_t h = static_cast<std::uint64_t>(k.x0) * 0x9E3779B97F4A7C15ULL;
  h ^= static_cast<std::uint64_t>(k.u0) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(k.e) * 0xC2B2AE3D27D4EB4FULL;
  return static_cast<std::size_t>(h);
}

ColouringLookup::ColouringLookup(const Colouring& c) : p_(c.p) {
  for (const auto* list : {&c.boxes0, &c.boxes_half}) {
    const HalfInt colour(list == &c.boxes_half);
    for (const auto& b : *list) {
      map_[Key{b.e, b.x0, b.u0}] = colour;
      levels_.push_back(b.e);
    }
  }
  std::sort(levels_.begin(), levels_.end());
  levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());
}

std::optional<HalfInt> ColouringLookup::colour(const BigInt& X, const BigInt& U) const {
  for (int e : levels_) {
    const BigInt q = pow(BigInt(p_), static_cast<unsigned>(e));
    BigInt xr = X % q, ur = U % q;
    if (xr < 0) xr += q;
    if (ur < 0) ur += q;
    auto it = map_.find(Key{e, static_cast<std::int64_t>(xr), static_cast<std::int64_t>(ur)});
    if (it != map_.end()) return it->second;
  }
  return std::nullopt;
}

void write_colouring(std::ostream& os, const Colouring& c) {
  os << "colouring p " << c.p << " class " << vec_to_string(c.vector) << " surface "
     << c.surface.a() << ' ' << c.surface.b() << ' ' << c.surface.a2() << ' ' << c.surface.b2()
     << " scale " << c.scale << '\n';
  for (const auto& b : c.boxes0) os << "0 " << b.x0 << ' ' << b.u0 << ' ' << b.e << '\n';
  for (const auto& b : c.boxes_half) os << "1/2 " << b.x0 << ' ' << b.u0 << ' ' << b.e << '\n';
  for (auto [e, n] : c.empty_count) os << "empty " << e << ' ' << n << '\n';
  os << "tail " << (c.tail0 ? "0" : "1/2") << '\n';
  os << "complete " << (c.complete ? 1 : 0) << '\n';
}

Colouring read_colouring(std::istream& is) {
  std::string line, word;
  if (!std::getline(is, line)) throw std::runtime_error("read_colouring: empty input");
  std::istringstream hs(line);
  std::string k1, k2, k3, k4, k5, vec;
  std::int64_t p, a, b, a2, b2;
  int scale;
  hs >> word >> k1 >> p >> k2 >> vec >> k3 >> a >> b >> a2 >> b2 >> k4 >> scale;
  if (!hs || word != "colouring" || k1 != "p" || k2 != "class" || k3 != "surface" || k4 != "scale")
    throw std::runtime_error("read_colouring: bad header: " + line);
  Colouring c;
  c.surface = KummerSurface(a, b, a2, b2);
  c.vector = parse_vec(vec);
  c.p = p;
  c.scale = scale;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    ls >> word;
    if (word == "0" || word == "1/2") {
      Box bx;
      ls >> bx.x0 >> bx.u0 >> bx.e;
      if (!ls) throw std::runtime_error("read_colouring: bad box on line " + std::to_string(lineno));
      if (word == "0") {
        c.boxes0.push_back(bx);
        ++c.count0[bx.e];
      } else {
        c.boxes_half.push_back(bx);
        ++c.count_half[bx.e];
      }
    } else if (word == "empty") {
      int e;
      std::int64_t n;
      ls >> e >> n;
      if (!ls) throw std::runtime_error("read_colouring: bad empty line " + std::to_string(lineno));
      c.empty_count[e] += n;
    } else if (word == "tail") {
      ls >> word;
      c.tail0 = word == "0";
    } else if (word == "complete") {
      int f;
      ls >> f;
      c.complete = f != 0;
    } else {
      throw std::runtime_error("read_colouring: unknown record on line " + std::to_string(lineno));
    }
  }
  return c;
}

std::string to_string(Constancy c) {
  return c == Constancy::ConstantZero ? "constant" : "non-constant";
}

std::string to_string(ConstancyMethod m) {
  switch (m) {
    case ConstancyMethod::GoodReduction: return "good-reduction";
    case ConstancyMethod::CriterionA: return "criterion-a";
    case ConstancyMethod::CriterionB: return "criterion-b";
    case ConstancyMethod::Colouring: return "colouring";
  }
  return "?";
}

namespace {

bool divides(std::int64_t p, std::int64_t n) { return n % p == 0; }

void require_local_kernel(const KummerSurface& s, F2Vec v, std::int64_t p) {
  if (v == 0 || v > 15) throw std::invalid_argument("constancy: class vector must be nonzero");
  auto ker = kernel(s, Field::padic(p));
  if (!std::binary_search(ker.begin(), ker.end(), v))
    throw std::invalid_argument("constancy: " + vec_to_string(v) + " is not in the kernel over Q_" +
                                std::to_string(p));
}

}  // namespace

std::optional<ConstancyResult> criterion_fast_path(const KummerSurface& s, F2Vec v,
                                                   std::int64_t p) {
  if (p == 2 || classify(v) != ClassType::Type1) return std::nullopt;
  for (const auto& t : orderings(s)) {
    if (map_vector(s, t, v) != kE1) continue;
    const KummerSurface n = apply_transform(s, t);
    const auto a = n.a(), b = n.b(), a2 = n.a2(), b2 = n.b2();
    if ((divides(p, a - b) && !divides(p, a)) || (divides(p, a2 - b2) && !divides(p, a2)))
      return ConstancyResult{Constancy::ConstantZero, ConstancyMethod::CriterionA};
    if (!divides(p, a - b) && !divides(p, a2 - b2) &&
        (divides(p, a) || divides(p, b) || divides(p, a2) || divides(p, b2)))
      return ConstancyResult{Constancy::NonConstant, ConstancyMethod::CriterionB};
    return std::nullopt;
  }
  throw std::logic_error("criterion_fast_path: no translation sends a rank-one vector to e1");
}

ConstancyResult constancy_by_colouring(const KummerSurface& s, F2Vec v, std::int64_t p) {
  require_local_kernel(s, v, p);
  ColouringOptions opt;
  opt.stop_at_half = true;
  opt.store_boxes = false;
  auto c = colouring(s, brauer_class(s, v), p, opt);
  return {c.constant() ? Constancy::ConstantZero : Constancy::NonConstant,
          ConstancyMethod::Colouring};
}

ConstancyResult constancy(const KummerSurface& s, F2Vec v, std::int64_t p) {
  require_local_kernel(s, v, p);
  if (p != 2) {
    bool good = true;
    for (std::int64_t c : {s.a(), s.b(), s.a() - s.b(), s.a2(), s.b2(), s.a2() - s.b2()})
      if (divides(p, c)) good = false;
    if (good) return {Constancy::ConstantZero, ConstancyMethod::GoodReduction};
  }
  if (auto r = criterion_fast_path(s, v, p)) return *r;
  return constancy_by_colouring(s, v, p);
}

std::vector<std::int64_t> surface_bad_primes(const KummerSurface& s) {
  BigInt d = BigInt(2) * s.a() * s.b() * (BigInt(s.a()) - s.b()) * s.a2() * s.b2() *
             (BigInt(s.a2()) - s.b2());
  return prime_divisors(d);
}

std::vector<std::int64_t> relevant_primes(const KummerSurface& s, F2Vec v) {
  std::vector<std::int64_t> out;
  for (auto p : surface_bad_primes(s))
    if (constancy(s, v, p).verdict == Constancy::NonConstant) out.push_back(p);
  return out;
}

std::vector<std::vector<HalfInt>> admissible_vectors(std::size_t l) {
  if (l == 0 || l > 20) throw std::invalid_argument("admissible_vectors: need 1 <= l <= 20");
  std::vector<std::vector<HalfInt>> out;
  for (std::uint32_t m = 0; m < (1u << l); ++m) {
    if (__builtin_popcount(m) % 2) continue;
    std::vector<HalfInt> vec(l);
    for (std::size_t i = 0; i < l; ++i) vec[i] = HalfInt((m >> (l - 1 - i)) & 1);
    out.push_back(std::move(vec));
  }
  return out;
}

}  // namespace kummer
