#include "kummer/surface.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace kummer {

KummerSurface::KummerSurface(std::int64_t a, std::int64_t b, std::int64_t a2, std::int64_t b2)
    : a_(a), b_(b), a2_(a2), b2_(b2) {
  for (auto c : {a, b, a2, b2}) {
    if (c == 0) throw std::invalid_argument("degenerate surface: zero coefficient");
    if (c > kMaxCoefficient || c < -kMaxCoefficient)
      throw std::invalid_argument("coefficient out of range: " + std::to_string(c));
  }
  if (a == b) throw std::invalid_argument("degenerate surface: a = b");
  if (a2 == b2) throw std::invalid_argument("degenerate surface: a' = b'");
}

std::string KummerSurface::to_string() const {
  std::ostringstream os;
  os << '(' << a_ << ", " << b_ << ", " << a2_ << ", " << b2_ << ')';
  return os.str();
}

KummerSurface KummerSurface::parse(const std::string& s) {
  std::vector<std::int64_t> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    std::int64_t c = std::stoll(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad surface coefficient: " + item);
    v.push_back(c);
  }
  if (v.size() != 4) throw std::invalid_argument("surface needs four coefficients a,b,a2,b2");
  return KummerSurface(v[0], v[1], v[2], v[3]);
}

std::string vec_to_string(F2Vec v) {
  std::string s(4, '0');
  for (int i = 0; i < 4; ++i)
    if (v >> i & 1) s[i] = '1';
  return s;
}

F2Vec parse_vec(const std::string& s) {
  if (s.size() != 4 || s.find_first_not_of("01") != std::string::npos)
    throw std::invalid_argument("class vector must be four binary digits, got '" + s + "'");
  F2Vec v = 0;
  for (int i = 0; i < 4; ++i)
    if (s[i] == '1') v |= F2Vec(1u << i);
  return v;
}

int vec_weight(F2Vec v) { return __builtin_popcount(v); }

namespace {

struct EntryFactors {
  int sign;
  std::int64_t f1, f2;
};

// Entry (i, j), i < j, of the matrix as sign * f1 * f2.
std::array<std::array<EntryFactors, 4>, 4> entry_factors(const KummerSurface& s) {
  const auto a = s.a(), b = s.b(), a2 = s.a2(), b2 = s.b2();
  std::array<std::array<EntryFactors, 4>, 4> m{};
  for (int i = 0; i < 4; ++i) m[i][i] = {1, 1, 1};
  auto set = [&](int i, int j, EntryFactors e) { m[i][j] = m[j][i] = e; };
  set(0, 1, {1, a, b});
  set(0, 2, {1, a2, b2});
  set(0, 3, {-1, a, a2});
  set(1, 2, {1, a, a2});
  set(1, 3, {1, a2, a2 - b2});
  set(2, 3, {1, a, a - b});
  return m;
}

BigInt sqf_product(const BigInt& x, const BigInt& y) {
  BigInt g = gcd(x, y);
  return (x / g) * (y / g);
}

}  // namespace

SZMatrix sz_matrix(const KummerSurface& s) {
  SZMatrix out;
  auto f = entry_factors(s);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto& e = f[i][j];
      out.entries[i][j] = BigInt(e.sign) * e.f1 * e.f2;
      out.reduced[i][j] =
          sqf_product(BigInt(e.sign * squarefree_part(e.f1)), BigInt(squarefree_part(e.f2)));
    }
  return out;
}

std::vector<F2Vec> kernel(const KummerSurface& s, const Field& field) {
  auto f = entry_factors(s);
  std::array<std::array<SquareClass, 4>, 4> cls;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto& e = f[i][j];
      if (field.kind() == Field::Kind::Rationals) {
        cls[i][j] = RationalClass{sqf_product(BigInt(e.sign * squarefree_part(e.f1)),
                                              BigInt(squarefree_part(e.f2)))};
      } else {
        cls[i][j] = multiply(square_class(Rational(e.sign * e.f1), field),
                             square_class(Rational(e.f2), field));
      }
    }
  const SquareClass one = square_class(Rational(1), field);
  std::vector<F2Vec> out;
  for (F2Vec v = 0; v < 16; ++v) {
    bool ok = true;
    for (int i = 0; i < 4 && ok; ++i) {
      SquareClass acc = one;
      for (int j = 0; j < 4; ++j)
        if (v >> j & 1) acc = multiply(acc, cls[i][j]);
      ok = is_square(acc);
    }
    if (ok) out.push_back(v);
  }
  return out;
}

int subspace_dim(const std::vector<F2Vec>& elements) {
  int d = 0;
  while ((std::size_t{1} << d) < elements.size()) ++d;
  return d;
}

std::string to_string(ClassType t) { return t == ClassType::Type1 ? "type1" : "type2"; }

ClassType classify(F2Vec v) {
  if (v == 0 || v > 15) throw std::invalid_argument("classify: vector must be nonzero");
  int v1 = v & 1, v2 = v >> 1 & 1, v3 = v >> 2 & 1, v4 = v >> 3 & 1;
  return ((v1 & v4) ^ (v2 & v3)) ? ClassType::Type2 : ClassType::Type1;
}

std::vector<SymbolPair> symbol_pairs(const KummerSurface& s, F2Vec v) {
  std::vector<SymbolPair> out;
  if (v & kE1) out.push_back({s.a(), s.a2()});
  if (v & kE2) out.push_back({s.a(), 0});
  if (v & kE3) out.push_back({0, s.a2()});
  if (v & kE4) out.push_back({0, 0});
  return out;
}

BrauerClass brauer_class(const KummerSurface& s, F2Vec v) { return {v, symbol_pairs(s, v)}; }

namespace {

// Elements of V = <[x], [x-a]> as two bits: bit0 = [x], bit1 = [x-a];
// [x-b] = [x] + [x-a].
using VElem = std::uint8_t;

VElem root_element(std::int64_t r, std::int64_t a, std::int64_t b) {
  if (r == 0) return 1;
  if (r == a) return 2;
  if (r == b) return 3;
  throw std::logic_error("not a root");
}

std::int64_t element_root(VElem e, std::int64_t a, std::int64_t b) {
  switch (e) {
    case 1: return 0;
    case 2: return a;
    case 3: return b;
  }
  throw std::logic_error("zero element has no root");
}

std::pair<std::int64_t, std::int64_t> reorder(std::int64_t a, std::int64_t b, std::int64_t shift,
                                              bool swap) {
  std::int64_t r1, r2;
  if (shift == 0) {
    r1 = a;
    r2 = b;
  } else if (shift == a) {
    r1 = -a;
    r2 = b - a;
  } else if (shift == b) {
    r1 = -b;
    r2 = a - b;
  } else {
    throw std::invalid_argument("translation must be by a root of x(x-a)(x-b)");
  }
  if (swap) std::swap(r1, r2);
  return {r1, r2};
}

// Images of the basis [x], [x-a] under x = X + shift followed by reordering.
std::array<VElem, 2> curve_map(std::int64_t a, std::int64_t b, std::int64_t shift, bool swap) {
  auto [na, nb] = reorder(a, b, shift, swap);
  return {root_element(0 - shift, na, nb), root_element(a - shift, na, nb)};
}

F2Vec tensor_map(F2Vec v, std::array<VElem, 2> px, std::array<VElem, 2> pu, bool transpose) {
  int m[2][2] = {};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (!(v >> (2 * i + j) & 1)) continue;
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) m[k][l] ^= (px[i] >> k & 1) & (pu[j] >> l & 1);
    }
  F2Vec out = 0;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      int bit = transpose ? m[l][k] : m[k][l];
      if (bit) out |= F2Vec(1u << (2 * k + l));
    }
  return out;
}

std::int64_t isqrt64(std::int64_t n) { return static_cast<std::int64_t>(isqrt(BigInt(n))); }

// Largest s with s^2 | n, n > 0.
std::int64_t square_content_root(std::int64_t n) {
  return isqrt64(n / squarefree_part(n));
}

bool is_square64(std::int64_t n) {
  if (n <= 0) return false;
  auto r = isqrt64(n);
  return r * r == n;
}

}  // namespace

std::optional<SingleSymbol> single_symbol(const KummerSurface& s, F2Vec v) {
  if (v == 0 || classify(v) != ClassType::Type1) return std::nullopt;
  VElem row0 = v & 3, row1 = v >> 2 & 3;
  VElem t = row0 ? row0 : row1;
  VElem sx = VElem((row0 ? 1 : 0) | (row1 ? 2 : 0));
  return SingleSymbol{element_root(sx, s.a(), s.b()), element_root(t, s.a2(), s.b2())};
}

std::string TransformRecord::to_string() const {
  std::ostringstream os;
  os << "x_shift=" << x_shift << " x_swap=" << x_swap << " u_shift=" << u_shift
     << " u_swap=" << u_swap << " twist=" << twist << " x_square=" << x_square
     << " u_square=" << u_square << " curve_swap=" << curve_swap;
  return os.str();
}

KummerSurface apply_transform(const KummerSurface& s, const TransformRecord& t) {
  auto [a, b] = reorder(s.a(), s.b(), t.x_shift, t.x_swap);
  auto [a2, b2] = reorder(s.a2(), s.b2(), t.u_shift, t.u_swap);
  a *= t.twist;
  b *= t.twist;
  a2 *= t.twist;
  b2 *= t.twist;
  const auto qx = t.x_square * t.x_square, qu = t.u_square * t.u_square;
  if (a % qx || b % qx || a2 % qu || b2 % qu)
    throw std::invalid_argument("transform: square divisor does not divide coefficients");
  a /= qx;
  b /= qx;
  a2 /= qu;
  b2 /= qu;
  if (t.curve_swap) return KummerSurface(-a2, -b2, -a, -b);
  return KummerSurface(a, b, a2, b2);
}

F2Vec map_vector(const KummerSurface& s, const TransformRecord& t, F2Vec v) {
  return tensor_map(v, curve_map(s.a(), s.b(), t.x_shift, t.x_swap),
                    curve_map(s.a2(), s.b2(), t.u_shift, t.u_swap), t.curve_swap);
}

std::vector<TransformRecord> orderings(const KummerSurface& s) {
  std::vector<TransformRecord> out;
  for (auto xs : {std::int64_t{0}, s.a(), s.b()})
    for (bool xw : {false, true})
      for (auto us : {std::int64_t{0}, s.a2(), s.b2()})
        for (bool uw : {false, true}) {
          TransformRecord t;
          t.x_shift = xs;
          t.x_swap = xw;
          t.u_shift = us;
          t.u_swap = uw;
          out.push_back(t);
        }
  return out;
}

bool is_type1_normal(const KummerSurface& s) {
  return s.a() > s.b() && s.a2() < s.b2() && is_square64(s.a()) && is_square64(s.b()) &&
         is_square64(-s.a2()) && is_square64(-s.b2()) && std::gcd(s.a(), s.b()) == 1 &&
         std::gcd(s.a2(), s.b2()) == 1;
}

NormalForm canonical_form(const KummerSurface& s, std::optional<ClassType> type) {
  const auto ker = kernel(s, Field::rationals());
  bool has1 = false, has2 = false;
  for (auto v : ker) {
    if (v == 0) continue;
    (classify(v) == ClassType::Type1 ? has1 : has2) = true;
  }
  if (!type) {
    if (has1) type = ClassType::Type1;
    else if (has2) type = ClassType::Type2;
    else throw std::domain_error("canonical_form: rational kernel is trivial");
  }
  if ((*type == ClassType::Type1 && !has1) || (*type == ClassType::Type2 && !has2))
    throw std::domain_error("canonical_form: no kernel vector of " + to_string(*type));

  const F2Vec target = *type == ClassType::Type1 ? kE1 : F2Vec(kE2 | kE3);
  std::optional<NormalForm> best;
  auto consider = [&](const TransformRecord& t) {
    KummerSurface out = apply_transform(s, t);
    if (*type == ClassType::Type1 && !is_type1_normal(out)) return;
    if (!best || out < best->surface) best = NormalForm{out, t, *type, target};
  };

  for (auto base : orderings(s)) {
    bool hit = false;
    for (auto v : ker)
      if (v && map_vector(s, base, v) == target) hit = true;
    if (!hit) continue;
    auto [a, b] = reorder(s.a(), s.b(), base.x_shift, base.x_swap);
    auto [a2, b2] = reorder(s.a2(), s.b2(), base.u_shift, base.u_swap);
    std::vector<std::int64_t> twists;
    if (*type == ClassType::Type1) twists = {squarefree_part(a)};
    else twists = {1, -1};
    for (auto lambda : twists) {
      TransformRecord t = base;
      t.twist = lambda;
      t.x_square = square_content_root(std::gcd(a * lambda, b * lambda));
      t.u_square = square_content_root(std::gcd(a2 * lambda, b2 * lambda));
      for (bool cs : {false, true}) {
        t.curve_swap = cs;
        consider(t);
      }
    }
  }
  if (!best) throw std::domain_error("canonical_form: no admissible normal form");
  return *best;
}

}  // namespace kummer
