#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "turnhash/errors.hpp"
#include "turnhash/exact.hpp"
#include "turnhash/families.hpp"
#include "turnhash/io_json.hpp"
#include "turnhash/polyindex.hpp"
#include "turnhash/rng.hpp"
#include "turnhash/stepfn.hpp"
#include "turnhash/turning.hpp"

namespace {

using namespace turnhash;

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ValidationError(what + ": trailing junk in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(what + ": cannot parse '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw ValidationError(what + ": trailing junk in '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(what + ": cannot parse '" + s + "'");
  }
}

IndexVariant parse_variant(const std::string& s) {
  if (s == "mean-reduce") return IndexVariant::MeanReduce;
  if (s == "step-shift") return IndexVariant::StepShift;
  throw ValidationError("unknown variant '" + s + "' (expected mean-reduce or step-shift)");
}

Polygon similarity(const Polygon& p, std::string id, double angle, double scale,
                   double dx, double dy) {
  Polygon out;
  out.id = std::move(id);
  out.vertices.reserve(p.vertices.size());
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  for (const auto& v : p.vertices)
    out.vertices.push_back({scale * (ca * v.x - sa * v.y) + dx,
                            scale * (sa * v.x + ca * v.y) + dy});
  return out;
}

int dataset_cap(const Dataset& ds, int flag_m) {
  if (flag_m > 0) return flag_m;
  if (ds.m > 0) return ds.m;
  int m = 0;
  for (const auto& p : ds.polygons) m = std::max(m, static_cast<int>(p.vertices.size()));
  if (m < 3) throw ValidationError("cannot infer m: dataset is empty and no --m given");
  return m;
}

// ---- gen --------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::string output;
  int m = 6;
  int count = 1;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  double magnitude = 0.05;
};

int run_gen(const GenArgs& a) {
  if (a.count < 1) throw ValidationError("--count must be at least 1");
  const RngStream gen(a.seed);
  Dataset ds;
  ds.m = a.m;
  ds.polygons.reserve(a.count);
  for (int i = 0; i < a.count; ++i) {
    Polygon p;
    const std::uint64_t base = 8 * static_cast<std::uint64_t>(i);
    if (a.kind == "random") {
      p = make_random_polygon(a.m, gen, i);
    } else if (a.kind == "regular") {
      p = make_regular_polygon(a.m);
      if (i > 0)
        p = similarity(p, "", gen.uniform(base, 0.0, 6.283185307179586),
                       gen.uniform(base + 1, 0.5, 2.0),
                       gen.uniform(base + 2, -10.0, 10.0),
                       gen.uniform(base + 3, -10.0, 10.0));
    } else if (a.kind == "perturbed") {
      p = perturb_polygon(make_regular_polygon(a.m), gen, i, a.magnitude);
    } else if (a.kind == "spiral") {
      // Widening epsilon keeps the records distinct; rotation is avoided so
      // the construction's heading anchor (and its turning extremes) survive.
      const double eps = a.epsilon * (1.0 + static_cast<double>(i) / a.count);
      p = make_spiral_polygon(a.m, eps);
      if (i > 0)
        p = similarity(p, "", 0.0, gen.uniform(base + 1, 0.5, 2.0),
                       gen.uniform(base + 2, -10.0, 10.0),
                       gen.uniform(base + 3, -10.0, 10.0));
    } else {
      throw ValidationError("unknown kind '" + a.kind +
                            "' (expected random, regular, perturbed or spiral)");
    }
    p.id = a.kind + "-" + std::to_string(i);
    ds.polygons.push_back(validate(std::move(p)));
  }
  write_dataset(a.output, ds);
  return 0;
}

// ---- dist -------------------------------------------------------------------

struct DistArgs {
  std::string input;
  std::string id_a;
  std::string id_b;
  int p = 1;
};

const Polygon& find_polygon(const Dataset& ds, const std::string& id) {
  for (const auto& p : ds.polygons)
    if (p.id == id) return p;
  throw ValidationError("no polygon with id '" + id + "' in dataset");
}

int run_dist(const DistArgs& a) {
  const Dataset ds = read_dataset(a.input);
  const Polygon& P = find_polygon(ds, a.id_a);
  const Polygon& Q = find_polygon(ds, a.id_b);
  const AlignedDistance res = polygon_distance(P, Q, a.p);
  std::cout << "distance,alpha,u\n"
            << fmt9(res.distance) << ',' << fmt9(res.alpha) << ',' << fmt9(res.u)
            << '\n';
  return 0;
}

// ---- build ------------------------------------------------------------------

struct BuildArgs {
  std::string input;
  std::string output;
  std::string variant = "mean-reduce";
  int m = 0;
  int p = 1;
  double r = 0.0;
  double c = 0.0;
  double delta = 0.1;
  std::uint64_t seed = 0;
};

int run_build(const BuildArgs& a) {
  Dataset ds = read_dataset(a.input);
  PolygonIndexConfig cfg;
  cfg.m = dataset_cap(ds, a.m);
  cfg.p = a.p;
  cfg.r = a.r;
  cfg.c = a.c;
  cfg.variant = parse_variant(a.variant);
  cfg.delta = a.delta;
  cfg.seed = a.seed;
  const PolygonIndex idx(std::move(ds.polygons), cfg);
  idx.save(a.output);
  const auto& params = idx.inner().params();
  std::cout << "polygons,items,concat_k,tables_L\n"
            << idx.polygons().size() << ',' << idx.inner().items().size() << ','
            << params.concat_k << ',' << params.tables_L << '\n';
  return 0;
}

// ---- query ------------------------------------------------------------------

struct QueryArgs {
  std::string index;
  std::string input;
  std::string id;
};

int run_query(const QueryArgs& a) {
  const PolygonIndex idx = PolygonIndex::load(a.index);
  const Dataset qs = read_dataset(a.input);
  std::vector<Polygon> sel;
  if (a.id.empty())
    sel = qs.polygons;
  else
    sel.push_back(find_polygon(qs, a.id));
  const auto results = idx.query_batch(sel);
  std::cout << "query_id,hit_id,distance,candidates_scanned\n";
  for (std::size_t i = 0; i < sel.size(); ++i) {
    std::cout << sel[i].id << ',';
    if (results[i].hit)
      std::cout << results[i].hit->id << ',' << fmt9(results[i].hit->distance);
    else
      std::cout << ',';
    std::cout << ',' << results[i].candidates_scanned << '\n';
  }
  return 0;
}

// ---- eval-collision ----------------------------------------------------------

struct EvalArgs {
  std::string family = "random-point";
  std::string pair = "random:6";
  double a = 0.0;
  double b = 1.0;
  double r = 0.25;
  double c = 2.0;
  long long trials = 100000;
  std::uint64_t seed = 0;
};

StepFunction random_step(const RngStream& gen, std::uint64_t lane, int k,
                         double lo, double hi) {
  const std::uint64_t base = 2000 * lane;
  std::vector<double> cuts;
  for (int i = 0; i + 1 < k; ++i)
    cuts.push_back(gen.uniform(base + i, 0.001, 0.999));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bp{0.0};
  bp.insert(bp.end(), cuts.begin(), cuts.end());
  bp.push_back(1.0);
  std::vector<double> vals;
  for (int i = 0; i < k; ++i)
    vals.push_back(gen.uniform(base + 1000 + i, lo, hi));
  return make_step(std::move(bp), std::move(vals));
}

std::pair<StepFunction, StepFunction> parse_pair(const std::string& spec,
                                                 double lo, double hi,
                                                 const RngStream& gen) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw ValidationError("pair spec '" + spec + "' has no ':'");
  const std::string head = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (head == "const") {
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw ValidationError("const pair needs two comma-separated levels");
    const double v1 = parse_double(rest.substr(0, comma), "const level");
    const double v2 = parse_double(rest.substr(comma + 1), "const level");
    for (double v : {v1, v2})
      if (v < lo || v > hi)
        throw ValidationError("const level " + fmt9(v) + " outside the value range");
    return {make_step({0.0, 1.0}, {v1}), make_step({0.0, 1.0}, {v2})};
  }
  const long k = parse_long(rest, "piece count");
  if (k < 1) throw ValidationError("piece count must be at least 1");
  if (head == "random")
    return {random_step(gen, 0, static_cast<int>(k), lo, hi),
            random_step(gen, 1, static_cast<int>(k), lo, hi)};
  if (head == "identical") {
    StepFunction f = random_step(gen, 0, static_cast<int>(k), lo, hi);
    return {f, f};
  }
  throw ValidationError("unknown pair spec '" + head +
                        "' (expected const, random or identical)");
}

int run_eval(const EvalArgs& a) {
  if (a.trials < 1) throw ValidationError("--trials must be at least 1");
  if (!(a.b > a.a)) throw ValidationError("value range needs b > a");
  const RngStream gen(a.seed, 0x70616972);
  const auto [f, g] = parse_pair(a.pair, a.a, a.b, gen);

  double distance = 0.0;
  double theoretical = 0.0;
  long long collisions = 0;
  if (a.family == "random-point") {
    const HashFamily fam = random_point_family(a.a, a.b, a.seed, a.r, a.c);
    distance = l1_distance(f, g);
    theoretical = h1_collision_prob(distance, a.a, a.b);
    for (long long i = 0; i < a.trials; ++i) {
      const PointDraw d = h1_draw(fam, i);
      collisions += h1_apply(d, f) == h1_apply(d, g);
    }
  } else if (a.family == "mean-reduce") {
    const HashFamily fam = mean_reduce_family(a.a, a.b, a.r, a.c, a.seed);
    const StepFunction fr = prepared(fam, f);
    const StepFunction gr = prepared(fam, g);
    distance = l1_distance(fr, gr);
    theoretical = h1_collision_prob(distance, fam.a, fam.b);
    for (long long i = 0; i < a.trials; ++i) {
      const PointDraw d = h1_draw(fam, i);
      collisions += h1_apply(d, fr) == h1_apply(d, gr);
    }
  } else if (a.family == "asymmetric-two-point") {
    const HashFamily fam = asymmetric_two_point_family(a.a, a.b, a.r, a.c, a.seed);
    distance = l2_distance(f, g);
    theoretical = h2_collision_prob(distance, a.a, a.b);
    for (long long i = 0; i < a.trials; ++i) {
      const TwoPointDraw d = h2_draw(fam, i);
      collisions += h2_data_hash(d, f) == h2_query_hash(d, g);
    }
  } else if (a.family == "discrete-sample") {
    const int k = static_cast<int>(std::max(f.values.size(), g.values.size()));
    const long long n = riemann_n(a.r, a.c, k, a.a, a.b);
    if (n > 50'000'000)
      throw ParamError("embedding dimension " + std::to_string(n) + " is too large");
    const TunedParams tuned = discrete_sample_params(a.r, a.c);
    const HashFamily fam = euclidean_lsh_family(static_cast<int>(n), tuned.r_prime,
                                                tuned.c_prime, a.seed);
    distance = embedded_l2(f, g, static_cast<int>(n));
    theoretical = pstable_collision_prob(distance, fam.width);
    ProjectionTable table(fam);
    for (long long i = 0; i < a.trials; ++i) {
      table.set_draw(i);
      collisions += table.apply(f) == table.apply(g);
    }
  } else {
    throw ValidationError("unknown family '" + a.family +
                          "' (expected random-point, mean-reduce, "
                          "asymmetric-two-point or discrete-sample)");
  }

  const double empirical = static_cast<double>(collisions) / a.trials;
  std::cout << "family,trials,distance,empirical,theoretical,abs_delta\n"
            << a.family << ',' << a.trials << ',' << fmt9(distance) << ','
            << fmt9(empirical) << ',' << fmt9(theoretical) << ','
            << fmt9(std::abs(empirical - theoretical)) << '\n';
  return 0;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  std::string input;
  std::string variant = "mean-reduce";
  std::string sweep;
  int m = 0;
  int p = 1;
  double delta = 0.1;
  int reps = 50;
  std::uint64_t seed = 0;
};

std::vector<std::pair<double, double>> parse_sweep(const std::string& s) {
  std::vector<std::pair<double, double>> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string entry = s.substr(pos, comma - pos);
    const auto colon = entry.find(':');
    if (colon == std::string::npos)
      throw ValidationError("sweep entry '" + entry + "' is not r:c");
    out.emplace_back(parse_double(entry.substr(0, colon), "sweep r"),
                     parse_double(entry.substr(colon + 1), "sweep c"));
    pos = comma + 1;
  }
  return out;
}

int run_bench(const BenchArgs& a) {
  if (a.reps < 1) throw ValidationError("--reps must be at least 1");
  const Dataset ds = read_dataset(a.input);
  std::cout << "r,c,n,reps,recall,filter_precision,mean_candidates,wall_ms\n";
  const auto sweep = parse_sweep(a.sweep);
  if (sweep.empty()) return 0;
  if (ds.polygons.empty()) throw ValidationError("bench needs a non-empty dataset");

  const RngStream gen(a.seed, 0x62656e6368);
  for (const auto& [r, c] : sweep) {
    PolygonIndexConfig cfg;
    cfg.m = dataset_cap(ds, a.m);
    cfg.p = a.p;
    cfg.r = r;
    cfg.c = c;
    cfg.variant = parse_variant(a.variant);
    cfg.delta = a.delta;
    cfg.seed = a.seed;
    const PolygonIndex idx(ds.polygons, cfg);

    // Each rep queries a random similarity transform of a stored polygon, so
    // the true nearest distance is 0 and every rep has a planted answer.
    std::vector<Polygon> qs;
    qs.reserve(a.reps);
    for (int j = 0; j < a.reps; ++j) {
      const std::uint64_t base = 8 * static_cast<std::uint64_t>(j);
      const auto pick = static_cast<std::size_t>(
          gen.uniform(base, 0.0, static_cast<double>(ds.polygons.size())));
      qs.push_back(similarity(ds.polygons[std::min(pick, ds.polygons.size() - 1)],
                              "bench-" + std::to_string(j),
                              gen.uniform(base + 1, 0.0, 6.283185307179586),
                              gen.uniform(base + 2, 0.5, 2.0),
                              gen.uniform(base + 3, -10.0, 10.0),
                              gen.uniform(base + 4, -10.0, 10.0)));
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto results = idx.query_batch(qs);
    const auto t1 = std::chrono::steady_clock::now();
    std::size_t hits = 0;
    std::size_t scanned = 0;
    for (const auto& res : results) {
      hits += res.hit.has_value();
      scanned += res.candidates_scanned;
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::cout << fmt9(r) << ',' << fmt9(c) << ',' << ds.polygons.size() << ','
              << a.reps << ',' << fmt9(static_cast<double>(hits) / a.reps) << ','
              << fmt9(scanned ? static_cast<double>(hits) / scanned : 0.0) << ','
              << fmt9(static_cast<double>(scanned) / a.reps) << ','
              << fmt9(wall_ms) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-neighbor retrieval of polygons under turning-function distances"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a polygon dataset");
  gen->add_option("--kind", gen_args.kind, "random, regular, perturbed or spiral")
      ->required();
  gen->add_option("--m", gen_args.m, "vertex count")->required();
  gen->add_option("--count", gen_args.count, "number of polygons");
  gen->add_option("--seed", gen_args.seed, "rng seed");
  gen->add_option("--epsilon", gen_args.epsilon, "spiral tightness");
  gen->add_option("--magnitude", gen_args.magnitude, "perturbation size");
  gen->add_option("--output", gen_args.output, "dataset path")->required();

  DistArgs dist_args;
  CLI::App* dist = app.add_subcommand("dist", "exact distance between two stored polygons");
  dist->add_option("--input", dist_args.input, "dataset path")->required();
  dist->add_option("--id-a", dist_args.id_a, "first polygon id")->required();
  dist->add_option("--id-b", dist_args.id_b, "second polygon id")->required();
  dist->add_option("--p", dist_args.p, "1 or 2");

  BuildArgs build_args;
  CLI::App* build = app.add_subcommand("build", "build and save a polygon index");
  build->add_option("--input", build_args.input, "dataset path")->required();
  build->add_option("--output", build_args.output, "index path")->required();
  build->add_option("--m", build_args.m, "vertex cap (default: from dataset)");
  build->add_option("--p", build_args.p, "1 or 2");
  build->add_option("--r", build_args.r, "target distance")->required();
  build->add_option("--c", build_args.c, "approximation factor")->required();
  build->add_option("--variant", build_args.variant, "mean-reduce or step-shift");
  build->add_option("--delta", build_args.delta, "miss probability");
  build->add_option("--seed", build_args.seed, "rng seed");

  QueryArgs query_args;
  CLI::App* query = app.add_subcommand("query", "query a saved index");
  query->add_option("--index", query_args.index, "index path")->required();
  query->add_option("--input", query_args.input, "query polygon file")->required();
  query->add_option("--id", query_args.id, "only this record (default: all)");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval-collision", "empirical vs theoretical hash collision probability");
  eval->add_option("--family", eval_args.family,
                   "random-point, mean-reduce, asymmetric-two-point or discrete-sample");
  eval->add_option("--pair", eval_args.pair, "const:v1,v2 | random:k | identical:k");
  eval->add_option("--range-a", eval_args.a, "value range low end");
  eval->add_option("--range-b", eval_args.b, "value range high end");
  eval->add_option("--r", eval_args.r, "design distance");
  eval->add_option("--c", eval_args.c, "approximation factor");
  eval->add_option("--trials", eval_args.trials, "number of draws");
  eval->add_option("--seed", eval_args.seed, "rng seed");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "recall / scan-cost table over an (r, c) sweep");
  bench->add_option("--input", bench_args.input, "dataset path")->required();
  bench->add_option("--m", bench_args.m, "vertex cap (default: from dataset)");
  bench->add_option("--p", bench_args.p, "1 or 2");
  bench->add_option("--variant", bench_args.variant, "mean-reduce or step-shift");
  bench->add_option("--sweep", bench_args.sweep, "comma-separated r:c pairs");
  bench->add_option("--delta", bench_args.delta, "miss probability");
  bench->add_option("--reps", bench_args.reps, "queries per sweep entry");
  bench->add_option("--seed", bench_args.seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gen->parsed()) return run_gen(gen_args);
    if (dist->parsed()) return run_dist(dist_args);
    if (build->parsed()) return run_build(build_args);
    if (query->parsed()) return run_query(query_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (bench->parsed()) return run_bench(bench_args);
  } catch (const turnhash::ParamError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return 3;
  } catch (const turnhash::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
