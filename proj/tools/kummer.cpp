// kummer: command-line driver for Brauer-class computations on
// z^2 = x(x-a)(x-b) u(u-a')(u-b').

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kummer/evaluation.hpp"
#include "kummer/pointsearch.hpp"
#include "kummer/survey.hpp"

using namespace kummer;
using json = nlohmann::ordered_json;

namespace {

json matrix_json(const std::array<std::array<BigInt, 4>, 4>& m) {
  json rows = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& e : r) row.push_back(static_cast<long long>(e));
    rows.push_back(row);
  }
  return rows;
}

json vectors_json(const std::vector<F2Vec>& vs) {
  json a = json::array();
  for (auto v : vs) a.push_back(vec_to_string(v));
  return a;
}

json analyze(const KummerSurface& s) {
  json j;
  j["surface"] = s.to_string();
  const auto m = sz_matrix(s);
  j["matrix"] = matrix_json(m.entries);
  j["reduced"] = matrix_json(m.reduced);
  const auto kq = kernel(s, Field::rationals());
  j["kernel"]["Q"] = vectors_json(kq);
  j["kernel"]["R"] = vectors_json(kernel(s, Field::real()));
  for (auto p : surface_bad_primes(s))
    j["kernel"]["Q_" + std::to_string(p)] = vectors_json(kernel(s, Field::padic(p)));
  j["dimension"] = subspace_dim(kq);
  json classes = json::array();
  for (auto v : kq) {
    if (!v) continue;
    json c;
    c["vector"] = vec_to_string(v);
    c["type"] = to_string(classify(v));
    json pairs = json::array();
    for (const auto& pr : symbol_pairs(s, v)) pairs.push_back({pr.mu, pr.nu});
    c["pairs"] = pairs;
    if (auto ss = single_symbol(s, v)) c["single_symbol_roots"] = {ss->x_root, ss->u_root};
    classes.push_back(c);
  }
  j["classes"] = classes;
  for (auto t : {ClassType::Type1, ClassType::Type2}) {
    try {
      auto nf = canonical_form(s, t);
      j["normal_form"][to_string(t)] = {{"surface", nf.surface.to_string()},
                                        {"transform", nf.transform.to_string()},
                                        {"vector", vec_to_string(nf.vector)}};
    } catch (const std::domain_error&) {
    }
  }
  return j;
}

// The (1, 25, -25, -36) example: kernel, matrix, local behaviour and a witness point.
int verify_example(std::ostream& os) {
  const KummerSurface s(1, 25, -25, -36);
  int failures = 0;
  auto report = [&](const std::string& what, bool ok) {
    os << (ok ? "PASS " : "FAIL ") << what << '\n';
    if (!ok) ++failures;
  };
  report("kernel over Q is {0, e1}", kernel(s, Field::rationals()) == std::vector<F2Vec>{0, kE1});
  const std::array<std::array<long long, 4>, 4> expect{
      {{1, 1, 1, 1}, {1, 1, -1, -11}, {1, -1, 1, -6}, {1, -11, -6, 1}}};
  bool same = true;
  const auto m = sz_matrix(s);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      if (m.reduced[i][k] != expect[i][k]) same = false;
  report("reduced matrix", same);
  for (std::int64_t p : {2, 3, 5, 11}) {
    const auto want = p == 5 ? Constancy::NonConstant : Constancy::ConstantZero;
    const auto r = constancy(s, kE1, p);
    report("p = " + std::to_string(p) + ": " + to_string(r.verdict) + " (" + to_string(r.method) + ")",
           r.verdict == want);
  }
  const auto v = evaluate_point(s, brauer_class(s, kE1), Place::prime(5), 17, 5);
  report("evaluation at (x, u) = (17, 5), p = 5 is " + v.to_string(), v == HalfInt::half());
  return failures;
}

std::ostream* open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return &std::cout;
  file.open(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return &file;
}

SearchMode parse_mode(const std::string& m) {
  if (m == "full") return SearchMode::Full;
  if (m == "smooth") return SearchMode::SmoothOnly;
  throw std::invalid_argument("mode must be full or smooth");
}

SearchTask task_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read task file " + path);
  const auto j = json::parse(in);
  SearchTask t;
  for (const auto& c : j.at("curves")) t.curves.emplace_back(c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>());
  t.bound = j.at("bound").get<std::int64_t>();
  if (j.contains("mode")) t.mode = parse_mode(j["mode"].get<std::string>());
  if (j.contains("smooth_bound")) t.smooth_bound = j["smooth_bound"].get<std::int64_t>();
  if (j.contains("same_curve_pairs")) t.same_curve_pairs = j["same_curve_pairs"].get<bool>();
  return t;
}

std::string vector_string(std::uint32_t packed, std::size_t l) {
  std::string s;
  for (std::size_t i = 0; i < l; ++i) s += (packed >> (l - 1 - i) & 1) ? "1/2 " : "0 ";
  if (!s.empty()) s.pop_back();
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brauer classes on Kummer surfaces z^2 = x(x-a)(x-b) u(u-a')(u-b')"};
  app.require_subcommand(1);

  std::string surface, cls, out, mode = "full", task_file;
  std::int64_t prime = 0, bound = 0, survey_bound = 0, isogeny_bound = kDefaultIsogenyPrimeBound;
  std::int64_t smooth_bound = 0;
  int jobs = 0;
  bool naive = false, no_relevant = false, no_rewrite = false;

  auto add_surface = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--surface", surface, "coefficients a,b,a2,b2");
    if (required) o->required();
  };

  auto* an = app.add_subcommand("analyze", "matrix, kernels, class types and normal forms");
  add_surface(an, true);
  an->add_option("--out", out, "output path (default stdout)");

  auto* co = app.add_subcommand("colour", "box colouring of S(Q_p) for a class");
  add_surface(co, true);
  co->add_option("--class", cls, "class vector v1v2v3v4")->required();
  co->add_option("--prime", prime, "prime p")->required();
  co->add_option("--out", out, "output path (default stdout)");
  co->add_flag("--no-rewrite", no_rewrite, "only test the symbols in their original form");

  auto* rp = app.add_subcommand("relevant-primes", "primes with non-constant local evaluation");
  add_surface(rp, true);
  rp->add_option("--class", cls, "class vector (default: every rational kernel vector)");
  rp->add_option("--out", out, "output path (default stdout)");

  auto* se = app.add_subcommand("search", "rational points on w^2 = f_ab(x,y) f_a'b'(u,v)");
  add_surface(se, false);
  se->add_option("--task", task_file, "JSON task: curves, bound, mode, smooth_bound");
  se->add_option("--bound", bound, "height bound B");
  se->add_option("--mode", mode, "full or smooth");
  se->add_option("--smooth-bound", smooth_bound, "page-prime bound C");
  se->add_flag("--naive", naive, "use the unpaged hash join");
  se->add_option("--out", out, "output path (default stdout)");

  auto* cv = app.add_subcommand("coverage", "value vectors at the relevant primes hit by rational points");
  add_surface(cv, true);
  cv->add_option("--class", cls, "class vector (default: first rational kernel vector)");
  cv->add_option("--bound", bound, "height bound B")->required();
  cv->add_option("--mode", mode, "full or smooth");
  cv->add_option("--smooth-bound", smooth_bound, "page-prime bound C");
  cv->add_option("--out", out, "output path (default stdout)");

  auto* sv = app.add_subcommand("survey", "enumerate the sample and its statistics");
  sv->add_option("--survey-bound", survey_bound, "coefficient bound N")->required();
  sv->add_option("--isogeny-bound", isogeny_bound, "primes used for the isogeny test");
  sv->add_option("--jobs", jobs, "worker threads (default KUMMER_JOBS or 1)");
  sv->add_option("--out", out, "sample TSV path; summary JSON goes to stdout");
  sv->add_flag("--no-relevant", no_relevant, "skip relevant-prime annotation");

  auto* ve = app.add_subcommand("verify-example", "checks on the surface (1, 25, -25, -36)");

  CLI11_PARSE(app, argc, argv);

  if (jobs <= 0) {
    const char* env = std::getenv("KUMMER_JOBS");
    jobs = env ? std::max(1, std::atoi(env)) : 1;
  }

  try {
    std::ofstream file;
    if (an->parsed()) {
      *open_out(out, file) << analyze(KummerSurface::parse(surface)).dump(2) << '\n';
    } else if (co->parsed()) {
      const auto s = KummerSurface::parse(surface);
      const auto v = parse_vec(cls);
      const auto ker = kernel(s, Field::padic(prime));
      if (!std::binary_search(ker.begin(), ker.end(), v))
        throw std::invalid_argument("class " + cls + " is not in the kernel over Q_" + std::to_string(prime));
      ColouringOptions opt;
      opt.rewrite = !no_rewrite;
      write_colouring(*open_out(out, file), colouring(s, brauer_class(s, v), prime, opt));
    } else if (rp->parsed()) {
      const auto s = KummerSurface::parse(surface);
      std::vector<F2Vec> vs;
      if (!cls.empty()) vs.push_back(parse_vec(cls));
      else
        for (auto v : kernel(s, Field::rationals()))
          if (v) vs.push_back(v);
      json j;
      j["surface"] = s.to_string();
      j["classes"] = json::array();
      for (auto v : vs) {
        json c;
        c["vector"] = vec_to_string(v);
        c["type"] = to_string(classify(v));
        json per = json::object(), rel = json::array();
        for (auto p : surface_bad_primes(s)) {
          const auto r = constancy(s, v, p);
          per[std::to_string(p)] = {{"verdict", to_string(r.verdict)}, {"method", to_string(r.method)}};
          if (r.verdict == Constancy::NonConstant) rel.push_back(p);
        }
        c["per_prime"] = per;
        c["relevant"] = rel;
        j["classes"].push_back(c);
      }
      *open_out(out, file) << j.dump(2) << '\n';
    } else if (se->parsed()) {
      SearchTask t;
      if (!task_file.empty()) {
        t = task_from_json(task_file);
      } else {
        if (surface.empty()) throw std::invalid_argument("search needs --surface or --task");
        const auto s = KummerSurface::parse(surface);
        t.curves = {BinaryQuartic(s.a(), s.b()), BinaryQuartic(s.a2(), s.b2())};
        t.same_curve_pairs = false;
      }
      if (bound > 0) t.bound = bound;
      if (se->count("--mode")) t.mode = parse_mode(mode);
      if (smooth_bound > 0) t.smooth_bound = smooth_bound;
      if (t.bound < 1) throw std::invalid_argument("search needs a positive --bound");
      const auto sols = naive ? naive_search(t) : paged_search(t);
      write_solutions(*open_out(out, file), sols);
    } else if (cv->parsed()) {
      const auto s = KummerSurface::parse(surface);
      F2Vec v = 0;
      if (!cls.empty()) v = parse_vec(cls);
      else
        for (auto w : kernel(s, Field::rationals()))
          if (w && !v) v = w;
      if (!v) throw std::invalid_argument("surface has no rational kernel vector");
      const auto c = vector_coverage(s, brauer_class(s, v), bound, parse_mode(mode),
                                     smooth_bound > 0 ? std::optional<std::int64_t>(smooth_bound)
                                                      : std::nullopt);
      const auto adm = admissible_vectors(std::max<std::size_t>(c.primes.size(), 1));
      json j;
      j["surface"] = s.to_string();
      j["vector"] = vec_to_string(v);
      j["bound"] = bound;
      j["primes"] = c.primes;
      j["points"] = c.points;
      j["admissible"] = c.primes.empty() ? 1 : adm.size();
      json vecs = json::array();
      for (auto p : c.vectors) vecs.push_back(vector_string(p, c.primes.size()));
      j["vectors"] = vecs;
      j["count"] = c.vectors.size();
      *open_out(out, file) << j.dump(2) << '\n';
    } else if (sv->parsed()) {
      SurveyOptions opt;
      opt.jobs = jobs;
      opt.isogeny_bound = isogeny_bound;
      opt.relevant_primes = !no_relevant;
      const auto sample = enumerate_sample(survey_bound, opt);
      if (!out.empty()) {
        std::ofstream tsv(out);
        if (!tsv) throw std::runtime_error("cannot open " + out + " for writing");
        write_sample_tsv(tsv, sample);
      }
      std::cout << summary_json(survey_bound, sample) << '\n';
    } else if (ve->parsed()) {
      const int failures = verify_example(std::cout);
      std::cout << (failures ? "FAIL" : "PASS") << '\n';
      return failures ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
