#include "kummer/survey.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "kummer/evaluation.hpp"

namespace kummer {

std::string to_string(SampleType t) {
  switch (t) {
    case SampleType::Type1: return "type1";
    case SampleType::Type2: return "type2";
    case SampleType::Dim2: return "dim2";
  }
  return "?";
}

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads; results must be
// written to per-index slots so the outcome is independent of scheduling.
template <class F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::int64_t sqf_mul(std::int64_t s, std::int64_t t) {
  const std::int64_t g = std::gcd(s, t);
  return (s / g) * (t / g);
}

using RowKey = std::array<std::int64_t, 4>;

struct RowKeyHash {
  std::size_t operator()(const RowKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto x : k) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

// Square-free parts of the factor of each matrix entry that depends on
// (a, b) only, resp. on (a', b') only. Entry (0,3) carries its sign on the
// first side.
using EntryParts = std::array<std::array<std::int64_t, 4>, 4>;

EntryParts parts_first(std::int64_t a, std::int64_t b) {
  const auto ab = squarefree_part(a * b), sa = squarefree_part(a),
             aab = squarefree_part(a * (a - b));
  EntryParts m{};
  for (auto& r : m) r.fill(1);
  auto set = [&](int i, int j, std::int64_t v) { m[i][j] = m[j][i] = v; };
  set(0, 1, ab);
  set(0, 3, -sa);
  set(1, 2, sa);
  set(2, 3, aab);
  return m;
}

EntryParts parts_second(std::int64_t a2, std::int64_t b2) {
  const auto ab = squarefree_part(a2 * b2), sa = squarefree_part(a2),
             aab = squarefree_part(a2 * (a2 - b2));
  EntryParts m{};
  for (auto& r : m) r.fill(1);
  auto set = [&](int i, int j, std::int64_t v) { m[i][j] = m[j][i] = v; };
  set(0, 2, ab);
  set(0, 3, sa);
  set(1, 2, sa);
  set(1, 3, aab);
  return m;
}

RowKey row_key(const EntryParts& m, F2Vec v) {
  RowKey k;
  for (int i = 0; i < 4; ++i) {
    std::int64_t acc = 1;
    for (int j = 0; j < 4; ++j)
      if (v >> j & 1) acc = sqf_mul(acc, m[i][j]);
    k[static_cast<std::size_t>(i)] = acc;
  }
  return k;
}

}  // namespace

std::vector<KummerSurface> sample_orbit(const KummerSurface& s) {
  const auto a = s.a(), b = s.b(), a2 = s.a2(), b2 = s.b2();
  return {s, KummerSurface(-a2, -b2, -a, -b), KummerSurface(a, a - b, a2, a2 - b2),
          KummerSurface(-a2, b2 - a2, -a, b - a)};
}

KummerSurface orbit_representative(const KummerSurface& s) {
  auto orb = sample_orbit(s);
  auto key = [](const KummerSurface& t) {
    return std::array<std::int64_t, 4>{t.a(), -t.b2(), t.b(), -t.a2()};
  };
  return *std::min_element(orb.begin(), orb.end(),
                           [&](const auto& x, const auto& y) { return key(x) < key(y); });
}

std::vector<SampleRecord> enumerate_sample(std::int64_t N, const SurveyOptions& opt) {
  if (N < 1) throw std::invalid_argument("survey bound must be positive");
  if (N > 100000) throw std::invalid_argument("survey bound too large");
  std::vector<std::pair<std::int64_t, std::int64_t>> first, second;
  for (std::int64_t b = 1; b <= N; ++b)
    for (std::int64_t a = b + 1; a <= b + N; ++a)
      if (std::gcd(a, b) == 1) {
        first.emplace_back(a, b);
        second.emplace_back(-a, -b);
      }
  std::vector<EntryParts> pf(first.size()), ps(second.size());
  parallel_for(first.size(), opt.jobs, [&](std::size_t i) {
    pf[i] = parts_first(first[i].first, first[i].second);
    ps[i] = parts_second(second[i].first, second[i].second);
  });

  // Both row products of M factor as (first part) * (second part); v is a
  // kernel vector iff the two sides agree up to squares row by row.
  std::unordered_map<std::uint64_t, std::uint16_t> hits;
  for (F2Vec v = 1; v < 16; ++v) {
    std::unordered_map<RowKey, std::vector<std::uint32_t>, RowKeyHash> index;
    for (std::size_t j = 0; j < second.size(); ++j)
      index[row_key(ps[j], v)].push_back(static_cast<std::uint32_t>(j));
    for (std::size_t i = 0; i < first.size(); ++i) {
      auto it = index.find(row_key(pf[i], v));
      if (it == index.end()) continue;
      for (auto j : it->second) hits[i * second.size() + j] |= std::uint16_t(1u << v);
    }
  }

  std::vector<std::uint64_t> keys;
  for (const auto& [k, mask] : hits) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  std::vector<std::optional<SampleRecord>> slots(keys.size());
  parallel_for(keys.size(), opt.jobs, [&](std::size_t n) {
    const auto i = keys[n] / second.size(), j = keys[n] % second.size();
    const KummerSurface s(first[i].first, first[i].second, second[j].first, second[j].second);
    if (!(orbit_representative(s) == s)) return;
    if (j_invariant(CurveAB(s.a(), s.b())) == j_invariant(CurveAB(s.a2(), s.b2()))) return;
    SampleRecord r;
    r.surface = s;
    const auto ker = kernel(s, Field::rationals());
    std::uint16_t mask = 0;
    for (auto v : ker)
      if (v) {
        r.kernel_vectors.push_back(v);
        mask |= std::uint16_t(1u << v);
      }
    if (mask != hits.at(keys[n]))
      throw std::logic_error("survey: join disagrees with direct kernel on " + s.to_string());
    const int dim = subspace_dim(ker);
    if (dim >= 2) r.type = SampleType::Dim2;
    else r.type = classify(r.kernel_vectors[0]) == ClassType::Type1 ? SampleType::Type1 : SampleType::Type2;
    r.isogeny = isogeny_flags(CurveAB(s.a(), s.b()), CurveAB(s.a2(), s.b2()), opt.isogeny_bound);
    r.algebraic = r.isogeny.geometrically_isogenous && !r.isogeny.q_isogenous;
    slots[n] = std::move(r);
  });
  std::vector<SampleRecord> out;
  for (auto& s : slots)
    if (s) out.push_back(std::move(*s));
  std::sort(out.begin(), out.end(),
            [](const SampleRecord& x, const SampleRecord& y) { return x.surface < y.surface; });
  if (opt.relevant_primes) annotate_relevant_primes(out, opt.jobs);
  return out;
}

void annotate_relevant_primes(std::vector<SampleRecord>& sample, int jobs) {
  parallel_for(sample.size(), jobs, [&](std::size_t i) {
    auto& r = sample[i];
    r.relevant.clear();
    for (auto v : r.kernel_vectors) r.relevant[v] = relevant_primes(r.surface, v);
  });
}

TableCounts table_counts(const std::vector<SampleRecord>& sample) {
  // every Q-isogenous record comes off the type 1 column, whatever its type
  TableCounts t;
  std::int64_t type1_records = 0;
  for (const auto& r : sample) {
    if (r.type == SampleType::Dim2) {
      ++t.dim2;
      continue;
    }
    if (r.type == SampleType::Type2) ++t.type2;
    else ++type1_records;
    if (r.isogeny.q_isogenous) ++t.q_isogenous;
    else if (r.type == SampleType::Type1 && r.algebraic) ++t.type1_algebraic;
  }
  t.type1 = type1_records - t.q_isogenous;
  return t;
}

std::map<int, std::int64_t> relevant_prime_histogram(const std::vector<SampleRecord>& sample) {
  std::map<int, std::int64_t> h;
  for (const auto& r : sample) {
    if (r.type == SampleType::Dim2 || r.isogeny.q_isogenous) continue;
    std::set<std::int64_t> all;
    for (const auto& [v, ps] : r.relevant) all.insert(ps.begin(), ps.end());
    ++h[static_cast<int>(all.size())];
  }
  return h;
}

AsymptoticPrediction asymptotic_prediction(std::int64_t N) {
  if (N < 1) throw std::invalid_argument("asymptotic_prediction: N must be positive");
  const double s2 = std::sqrt(2.0), l = std::log(1.0 + s2), pi = std::numbers::pi;
  AsymptoticPrediction a;
  a.constant_c = 0.5 * (l + s2 - 1.0);
  const double d = 6.0 / (pi * pi);
  a.type1_factor = 0.5 * d * d * a.constant_c * a.constant_c;
  a.dim2_factor = 4.0 / (pi * pi * pi * pi) * l * l;
  const double n = static_cast<double>(N);
  a.type1_estimate = a.type1_factor * n * n;
  a.dim2_estimate = a.dim2_factor * n;
  return a;
}

namespace {

std::string relevant_field(const SampleRecord& r) {
  std::string s;
  for (const auto& [v, ps] : r.relevant) {
    if (!s.empty()) s += ';';
    s += vec_to_string(v) + ':';
    for (std::size_t k = 0; k < ps.size(); ++k) s += (k ? "," : "") + std::to_string(ps[k]);
  }
  return s.empty() ? "-" : s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

void write_sample_tsv(std::ostream& os, const std::vector<SampleRecord>& sample) {
  os << "#a\tb\ta2\tb2\tkernel\ttype\tq_isogenous\tgeom_isogenous\talgebraic\trelevant\n";
  for (const auto& r : sample) {
    std::string ker;
    for (auto v : r.kernel_vectors) ker += (ker.empty() ? "" : ",") + vec_to_string(v);
    os << r.surface.a() << '\t' << r.surface.b() << '\t' << r.surface.a2() << '\t'
       << r.surface.b2() << '\t' << ker << '\t' << to_string(r.type) << '\t'
       << r.isogeny.q_isogenous << '\t' << r.isogeny.geometrically_isogenous << '\t'
       << r.algebraic << '\t' << relevant_field(r) << '\n';
  }
}

std::vector<SampleRecord> read_sample_tsv(std::istream& is) {
  std::vector<SampleRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = split(line, '\t');
    if (f.size() != 10) throw std::runtime_error("read_sample_tsv: expected 10 columns: " + line);
    SampleRecord r;
    r.surface = KummerSurface(std::stoll(f[0]), std::stoll(f[1]), std::stoll(f[2]), std::stoll(f[3]));
    for (const auto& v : split(f[4], ',')) r.kernel_vectors.push_back(parse_vec(v));
    if (f[5] == "type1") r.type = SampleType::Type1;
    else if (f[5] == "type2") r.type = SampleType::Type2;
    else if (f[5] == "dim2") r.type = SampleType::Dim2;
    else throw std::runtime_error("read_sample_tsv: bad type " + f[5]);
    r.isogeny.q_isogenous = f[6] == "1";
    r.isogeny.geometrically_isogenous = f[7] == "1";
    r.algebraic = f[8] == "1";
    if (f[9] != "-")
      for (const auto& cls : split(f[9], ';')) {
        auto colon = cls.find(':');
        if (colon == std::string::npos) throw std::runtime_error("read_sample_tsv: bad relevant field");
        auto& ps = r.relevant[parse_vec(cls.substr(0, colon))];
        for (const auto& p : split(cls.substr(colon + 1), ',')) ps.push_back(std::stoll(p));
      }
    out.push_back(std::move(r));
  }
  return out;
}

std::string summary_json(std::int64_t N, const std::vector<SampleRecord>& sample) {
  const auto t = table_counts(sample);
  const auto a = asymptotic_prediction(N);
  nlohmann::ordered_json j;
  j["survey_bound"] = N;
  j["records"] = sample.size();
  j["table_counts"] = {{"dim2", t.dim2},
                       {"type1", t.type1},
                       {"type1_algebraic", t.type1_algebraic},
                       {"q_isogenous", t.q_isogenous},
                       {"type2", t.type2}};
  bool annotated = !sample.empty();
  for (const auto& r : sample)
    if (r.relevant.size() != r.kernel_vectors.size()) annotated = false;
  if (annotated) {
    nlohmann::ordered_json h = nlohmann::ordered_json::object();
    for (auto [k, n] : relevant_prime_histogram(sample)) h[std::to_string(k)] = n;
    j["relevant_prime_histogram"] = h;
  }
  j["asymptotic"] = {{"C", a.constant_c},
                     {"type1_factor", a.type1_factor},
                     {"dim2_factor", a.dim2_factor},
                     {"type1_estimate", a.type1_estimate},
                     {"dim2_estimate", a.dim2_estimate}};
  return j.dump(2);
}

std::uint32_t LambdaColour::packed() const {
  std::uint32_t m = static_cast<std::uint32_t>(sign_bit);
  for (auto b : odd_bits) m = m << 1 | static_cast<std::uint32_t>(b);
  return m;
}

LambdaColour lambda_colour(const BinaryQuartic& f, std::int64_t x, std::int64_t y,
                           const std::vector<std::int64_t>& odd_primes) {
  const BigInt val = f.eval(x, y);
  if (val == 0) throw std::domain_error("lambda_colour: trivial point");
  const BigInt lambda = squarefree_part(val);
  LambdaColour c;
  c.sign_bit = lambda < 0 ? 1 : 0;
  for (auto p : odd_primes) {
    if (p == 2) throw std::invalid_argument("lambda_colour: primes must be odd");
    if (lambda % p == 0)
      throw OutOfColouring("lambda_colour: lambda has odd valuation at " + std::to_string(p));
    c.odd_bits.push_back(legendre_class(lambda, p));
  }
  return c;
}

LambdaExperiment lambda_experiment(const KummerSurface& s, std::int64_t bound, SearchMode mode,
                                   std::optional<std::int64_t> smooth_bound) {
  LambdaExperiment ex;
  ex.surface = s;
  for (auto p : surface_bad_primes(s))
    if (p != 2) ex.odd_primes.push_back(p);
  SearchTask task;
  task.curves = {BinaryQuartic(s.a(), s.b()), BinaryQuartic(s.a2(), s.b2())};
  task.bound = bound;
  task.mode = mode;
  task.smooth_bound = smooth_bound;
  task.same_curve_pairs = false;
  const auto sols = paged_search(task);
  ex.points = sols.size();
  for (const auto& sol : sols) {
    try {
      const auto c1 = lambda_colour(task.curves[0], sol.x, sol.y, ex.odd_primes);
      const auto c2 = lambda_colour(task.curves[1], sol.u, sol.v, ex.odd_primes);
      const auto c3 = lambda_colour(task.curves[0], -3 * sol.x, -3 * sol.y, ex.odd_primes);
      if (!(c1 == c2) || !(c1 == c3)) ex.well_defined = false;
      ++ex.colours[c1.packed()];
    } catch (const OutOfColouring&) {
      ++ex.excluded;
    }
  }
  return ex;
}

}  // namespace kummer
