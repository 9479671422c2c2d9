#pragma once

// The sample of surfaces z^2 = x(x-a)(x-b) u(u-a')(u-b') with a > b > 0,
// a' < b' < 0 and a non-trivial kernel, its counts, relevant-prime statistics,
// asymptotic predictions and the lambda square-class colouring experiment.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kummer/ellcurve.hpp"
#include "kummer/pointsearch.hpp"
#include "kummer/surface.hpp"

namespace kummer {

enum class SampleType { Type1, Type2, Dim2 };
std::string to_string(SampleType t);

struct SampleRecord {
  KummerSurface surface{1, 2, 1, 2};
  std::vector<F2Vec> kernel_vectors;  ///< nonzero elements, ascending
  SampleType type = SampleType::Type1;
  IsogenyReport isogeny;
  /// Geometrically but not Q-isogenous: the class is algebraic.
  bool algebraic = false;
  /// Relevant primes per nonzero kernel vector; empty until annotated.
  std::map<F2Vec, std::vector<std::int64_t>> relevant;
};

struct SurveyOptions {
  int jobs = 1;
  std::int64_t isogeny_bound = kDefaultIsogenyPrimeBound;
  bool relevant_primes = true;
};

/// Orbit of (a, b, a', b') under the substitutions used for deduplication.
std::vector<KummerSurface> sample_orbit(const KummerSurface& s);
/// Minimum of the orbit ordered by (a, -b', b, -a').
KummerSurface orbit_representative(const KummerSurface& s);

/// Quadruples with gcd(a, b) = gcd(a', b') = 1, a > b > 0, a - b <= N, b <= N,
/// a' < b' < 0, a' - b' >= -N, b' >= -N, nonzero rational kernel, one per
/// orbit and curves with distinct j-invariants; lexicographic order.
std::vector<SampleRecord> enumerate_sample(std::int64_t N, const SurveyOptions& opt = {});

/// Fills SampleRecord::relevant.
void annotate_relevant_primes(std::vector<SampleRecord>& sample, int jobs = 1);

struct TableCounts {
  std::int64_t dim2 = 0;
  std::int64_t type1 = 0;             ///< Type1 records minus all Q-isogenous records
  std::int64_t type1_algebraic = 0;
  std::int64_t type2 = 0;             ///< all Type2 records
  std::int64_t q_isogenous = 0;       ///< Type1 or Type2
  friend bool operator==(const TableCounts&, const TableCounts&) = default;
};

TableCounts table_counts(const std::vector<SampleRecord>& sample);

/// Number of BM-relevant primes (union over the classes) per surface, over
/// the records that are neither Dim2 nor Q-isogenous.
std::map<int, std::int64_t> relevant_prime_histogram(const std::vector<SampleRecord>& sample);

struct AsymptoticPrediction {
  double constant_c;       ///< (log(1 + sqrt 2) + sqrt 2 - 1) / 2
  double type1_factor;     ///< (6/pi^2)^2 C^2 / 2
  double dim2_factor;      ///< 4 log^2(1 + sqrt 2) / pi^4
  double type1_estimate;   ///< type1_factor N^2
  double dim2_estimate;    ///< dim2_factor N
};

AsymptoticPrediction asymptotic_prediction(std::int64_t N);

/// One TSV row per record: a b a2 b2 kernel type q_isogenous geom_isogenous
/// algebraic relevant, relevant as "v:p,p;v:p".
void write_sample_tsv(std::ostream& os, const std::vector<SampleRecord>& sample);
std::vector<SampleRecord> read_sample_tsv(std::istream& is);

std::string summary_json(std::int64_t N, const std::vector<SampleRecord>& sample);

struct LambdaColour {
  int sign_bit = 0;
  std::vector<int> odd_bits;
  std::uint32_t packed() const;
  friend bool operator==(const LambdaColour&, const LambdaColour&) = default;
};

class OutOfColouring : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Colour of the square class lambda of f_{ab}(x, y). Throws std::domain_error
/// for trivial points and OutOfColouring when some listed prime divides
/// lambda to odd order.
LambdaColour lambda_colour(const BinaryQuartic& f, std::int64_t x, std::int64_t y,
                           const std::vector<std::int64_t>& odd_primes);

struct LambdaExperiment {
  KummerSurface surface{1, 2, 1, 2};
  std::vector<std::int64_t> odd_primes;
  std::size_t points = 0;
  std::size_t excluded = 0;
  std::map<std::uint32_t, std::size_t> colours;
  bool well_defined = true;  ///< both quartic values and rescaling gave the same colour
};

/// Odd primes dividing 2ab(a - b) a'b'(a' - b'); colours of all points
/// found up to the bound.
LambdaExperiment lambda_experiment(const KummerSurface& s, std::int64_t bound,
                                   SearchMode mode = SearchMode::Full,
                                   std::optional<std::int64_t> smooth_bound = std::nullopt);

}  // namespace kummer
