#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "turnhash/errors.hpp"
#include "turnhash/exact.hpp"
#include "turnhash/families.hpp"
#include "turnhash/index.hpp"
#include "turnhash/index_io.hpp"
#include "turnhash/rng.hpp"
#include "turnhash/stepfn.hpp"

using namespace turnhash;

namespace {

StepFunction constant(double v) { return make_step({0.0, 1.0}, {v}); }

using StepIndex = LshIndex<StepFunction>;

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

bool same_tables(const StepIndex& a, const StepIndex& b) {
  if (a.tables().size() != b.tables().size()) return false;
  for (std::size_t t = 0; t < a.tables().size(); ++t) {
    const auto& ta = a.tables()[t];
    const auto& tb = b.tables()[t];
    if (ta.size() != tb.size()) return false;
    for (std::size_t i = 0; i < ta.size(); ++i)
      if (ta[i].key != tb[i].key || ta[i].id != tb[i].id) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("index") {

TEST_CASE("parameter derivation: frozen example and degenerate inputs") {
  const IndexParams p = derive_params(1024, 0.9, 0.5, 0.1);
  CHECK(p.concat_k == 10);  // ln(1024)/ln(2) must not round up to 11
  CHECK(p.tables_L == 7);   // ceil(ln(10) / 0.9^10)
  CHECK(p.rho == doctest::Approx(std::log(1.0 / 0.9) / std::log(2.0)));

  CHECK(derive_params(0, 0.9, 0.5, 0.1).concat_k == 1);
  CHECK(derive_params(1, 0.9, 0.5, 0.1).concat_k == 1);
  CHECK(derive_params(100, 1.0, 0.5, 0.1).tables_L == 1);
  CHECK(derive_params(100, 1.0, 0.5, 0.1).rho == 0.0);

  CHECK_THROWS_AS(derive_params(10, 0.5, 0.9, 0.1), ParamError);
  CHECK_THROWS_AS(derive_params(10, 1.1, 0.5, 0.1), ParamError);
  CHECK_THROWS_AS(derive_params(10, 0.9, 0.0, 0.1), ParamError);
  CHECK_THROWS_AS(derive_params(10, 0.9, 0.5, 0.0), ParamError);
  CHECK_THROWS_AS(derive_params(10, 0.9, 0.5, 1.0), ParamError);
}

TEST_CASE("adapter factories reject families they cannot serve") {
  const HashFamily euclid = euclidean_lsh_family(16, 0.2, 2.0, 3);
  CHECK_THROWS_AS(make_step_adapter(euclid), ParamError);
  CHECK_THROWS_AS(make_vector_adapter(random_point_family(0.0, 1.0, 3)), ParamError);

  FamilyAdapter<StepFunction> flat;
  flat.p1 = 0.5;
  flat.p2 = 0.5;
  flat.data_hash = [](const StepFunction&, std::uint64_t) { return HashValue{}; };
  flat.distance = [](const StepFunction&, const StepFunction&) { return 0.0; };
  CHECK_THROWS_AS(StepIndex({}, flat, 0.1, 2.0, 0.1, 1), ParamError);
}

TEST_CASE("empty index answers queries with no hit") {
  const HashFamily fam = random_point_family(0.0, 1.0, 5, 0.1, 2.0);
  const StepIndex idx({}, make_step_adapter(fam), 0.1, 2.0, 0.1, 5);
  const auto res = idx.query(constant(0.4));
  CHECK_FALSE(res.hit.has_value());
  CHECK(res.candidates_scanned == 0);
}

TEST_CASE("single stored function is retrieved by a nearby query") {
  const HashFamily fam = random_point_family(0.0, 1.0, 21, 0.1, 2.0);
  const StepIndex idx({constant(0.5)}, make_step_adapter(fam), 0.1, 2.0, 0.1, 21);
  CHECK(idx.params().concat_k == 1);
  const auto res = idx.query(constant(0.52));
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->id == 0);
  CHECK(res.hit->distance == doctest::Approx(0.02));
}

TEST_CASE("every stored item finds itself at distance zero") {
  const RngStream gen(343434);
  std::vector<StepFunction> items;
  for (int i = 0; i < 40; ++i)
    items.push_back(oracle::random_step(gen, i, 5 + i % 3, 0.1, 3.9));
  const HashFamily fam = random_point_family(0.0, 4.0, 88, 0.05, 2.0);
  const StepIndex idx(items, make_step_adapter(fam), 0.05, 2.0, 0.1, 88);

  const auto results = idx.query_batch(items);
  for (std::size_t i = 0; i < results.size(); ++i) {
    REQUIRE(results[i].hit.has_value());
    CHECK(results[i].hit->id == i);
    CHECK(results[i].hit->distance == 0.0);
  }

  const auto s = idx.stats();
  const std::size_t expected_entries =
      items.size() * static_cast<std::size_t>(idx.params().tables_L);
  CHECK(s.table_entries == expected_entries);
  std::size_t bucket_total = 0;
  for (const auto& [size, count] : s.bucket_size_counts)
    bucket_total += size * count;
  CHECK(bucket_total == expected_entries);
  CHECK(s.queries_run == items.size());
  std::size_t scanned = 0;
  for (const auto& r : results) scanned += r.candidates_scanned;
  CHECK(s.candidates_scanned == scanned);
}

TEST_CASE("rebuild with the same seed reproduces the tables bit for bit") {
  const RngStream gen(454545);
  std::vector<StepFunction> items;
  for (int i = 0; i < 12; ++i)
    items.push_back(oracle::random_step(gen, i, 4, 0.0, 1.0));
  const HashFamily fam = random_point_family(-0.5, 1.5, 60, 0.1, 2.0);
  const StepIndex a(items, make_step_adapter(fam), 0.1, 2.0, 0.1, 60);
  const StepIndex b(items, make_step_adapter(fam), 0.1, 2.0, 0.1, 60);
  CHECK(same_tables(a, b));

  const HashFamily fam2 = random_point_family(-0.5, 1.5, 61, 0.1, 2.0);
  const StepIndex c(items, make_step_adapter(fam2), 0.1, 2.0, 0.1, 61);
  CHECK_FALSE(same_tables(a, c));
}

TEST_CASE("query side hashes with the query hash, not the data hash") {
  FamilyAdapter<int> ad;
  ad.p1 = 0.9;
  ad.p2 = 0.5;
  ad.data_hash = [](const int& item, std::uint64_t) {
    return HashValue{item, 0};
  };
  ad.query_hash = [](const int& q, std::uint64_t) {
    return HashValue{q - 1, 0};
  };
  ad.distance = [](const int& x, const int& y) {
    return std::abs(static_cast<double>(x) - y);
  };
  const LshIndex<int> idx({5}, ad, 1.0, 2.0, 0.1, 9);

  // Only the shifted query key reaches the stored bucket.
  const auto hit = idx.query(6);
  REQUIRE(hit.hit.has_value());
  CHECK(hit.hit->id == 0);
  CHECK(hit.hit->distance == 1.0);
  CHECK_FALSE(idx.query(5).hit.has_value());

  // Distance override replaces the filter; threshold replaces c * r.
  const auto rejected = idx.query_batch(
      {6}, [](std::size_t, std::uint32_t) { return 100.0; });
  CHECK_FALSE(rejected.front().hit.has_value());
  const auto accepted = idx.query_batch(
      {6}, [](std::size_t, std::uint32_t) { return 100.0; }, 150.0);
  REQUIRE(accepted.front().hit.has_value());
  CHECK(accepted.front().hit->distance == 100.0);
}

TEST_CASE("scan budget caps work and the filter runs once per candidate id") {
  const HashFamily fam = random_point_family(0.0, 1.0, 14, 0.1, 2.0);
  const std::vector<StepFunction> items(10, constant(0.5));
  const StepIndex idx(items, make_step_adapter(fam), 0.1, 2.0, 0.1, 14);

  std::vector<int> calls(items.size(), 0);
  const auto res = idx.query_batch(
      {constant(0.5)},
      [&](std::size_t, std::uint32_t id) {
        ++calls[id];
        return 1e9;  // reject everything so the scan keeps going
      });
  const std::size_t budget = 3 * static_cast<std::size_t>(idx.params().tables_L);
  CHECK_FALSE(res.front().hit.has_value());
  // Identical items share every bucket, so the budget is hit exactly.
  CHECK(res.front().candidates_scanned == budget);
  for (int c : calls) CHECK(c == 1);
}

TEST_CASE("far-only corpus yields no answer at any seed") {
  const std::vector<StepFunction> items{constant(1.0), constant(2.0),
                                        constant(3.0), constant(3.9)};
  const StepFunction q = constant(0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const HashFamily fam = random_point_family(0.0, 4.0, seed, 0.05, 4.0);
    const StepIndex idx(items, make_step_adapter(fam), 0.05, 4.0, 0.1, seed);
    const auto res = idx.query(q);
    CHECK_FALSE(res.hit.has_value());
    CHECK(res.candidates_scanned <=
          3 * static_cast<std::size_t>(idx.params().tables_L));
  }
}

TEST_CASE("planted neighbor is found reliably and no far item is ever returned") {
  const double r = 0.05, c = 4.0;
  const RngStream gen(565656);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t seed = 9000 + trial;
    const StepFunction q =
        oracle::random_step(gen, 1000 + trial, 6, 0.05, 0.9);
    std::vector<StepFunction> items;
    std::uint64_t slot = 100000 + 4000 * trial;
    while (items.size() < 200) {
      StepFunction cand = oracle::random_step(gen, slot++, 6, 0.0, 1.0);
      if (l1_distance(cand, q) > 0.21) items.push_back(std::move(cand));
    }
    items.push_back(add_scalar(q, 0.04));  // id 200, distance 0.04 < r

    const HashFamily fam = random_point_family(0.0, 1.0, seed, r, c);
    const StepIndex idx(items, make_step_adapter(fam), r, c, 0.1, seed);
    CHECK(idx.params().concat_k == 24);
    CHECK(idx.params().tables_L == 8);

    const auto res = idx.query(q);
    if (res.hit) {
      CHECK(res.hit->id == 200);
      CHECK(l1_distance(items[res.hit->id], q) <= c * r + 1e-12);
      ++hits;
    }
  }
  // Guarantee is 90% per build; 100 deterministic trials leave wide margin.
  CHECK(hits >= 85);
}

TEST_CASE("asymmetric family retrieves through separate build and query hashes") {
  // cr = 0.2, so the constant decoys (L2 distance about 0.5) stay out of reach.
  const HashFamily fam = asymmetric_two_point_family(0.0, 1.0, 0.1, 2.0, 19);
  const StepFunction plant = make_step({0.0, 0.5, 1.0}, {0.45, 0.6});
  const std::vector<StepFunction> items{constant(0.02), plant, constant(0.98)};
  const StepIndex idx(items, make_step_adapter(fam), 0.1, 2.0, 0.01, 19);
  const StepFunction q = add_scalar(plant, 0.01);
  const auto res = idx.query(q);
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->id == 1);
  CHECK(res.hit->distance == doctest::Approx(0.01));
}

TEST_CASE("embedding adapter drives the index without materializing vectors") {
  const int dim = 64;
  const HashFamily fam = euclidean_lsh_family(dim, 0.2, 2.0, 33);
  const RngStream gen(686868);
  const StepFunction f = oracle::random_step(gen, 0, 5, -0.1, 0.1);
  const std::vector<StepFunction> items{constant(-0.8), constant(0.9), f,
                                        constant(-0.6), constant(0.7)};
  const StepIndex idx(items, make_embedding_adapter(fam), 0.2, 2.0, 0.1, 33);
  const StepFunction q = add_scalar(f, 0.01);
  const auto res = idx.query(q);
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->id == 2);
  CHECK(res.hit->distance == embedded_l2(f, q, dim));
}

TEST_CASE("an index rebuilt from its parts answers identically") {
  const RngStream gen(787878);
  std::vector<StepFunction> items;
  for (int i = 0; i < 25; ++i)
    items.push_back(oracle::random_step(gen, i, 5, 0.0, 2.0));
  const HashFamily fam = random_point_family(0.0, 2.0, 555, 0.1, 2.0);
  const StepIndex a(items, make_step_adapter(fam), 0.1, 2.0, 0.1, 555);

  const StepIndex b = StepIndex::from_parts(a.items(), make_step_adapter(fam),
                                            a.params(), a.tables());
  std::vector<StepFunction> probes;
  for (int i = 0; i < 25; i += 3) probes.push_back(add_scalar(items[i], 0.03));
  const auto ra = a.query_batch(probes);
  const auto rb = b.query_batch(probes);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    CHECK(ra[i].hit.has_value() == rb[i].hit.has_value());
    if (ra[i].hit) {
      CHECK(ra[i].hit->id == rb[i].hit->id);
      CHECK(ra[i].hit->distance == rb[i].hit->distance);
    }
    CHECK(ra[i].candidates_scanned == rb[i].candidates_scanned);
  }

  auto short_tables = a.tables();
  short_tables.pop_back();
  CHECK_THROWS_AS(StepIndex::from_parts(a.items(), make_step_adapter(fam),
                                        a.params(), short_tables),
                  ValidationError);
}

TEST_CASE("family and parameter descriptors survive the JSON round trip") {
  for (const HashFamily& fam :
       {random_point_family(-1.0, 3.0, 42, 0.2, 2.0),
        mean_reduce_family(0.0, 2.0, 0.5, 1.9, 7),
        asymmetric_two_point_family(0.0, 1.0, 0.1, 2.0, 8),
        euclidean_lsh_family(128, 0.25, 2.0, 9)}) {
    const HashFamily back = family_from_json(family_to_json(fam));
    CHECK(back.kind == fam.kind);
    CHECK(back.a == fam.a);
    CHECK(back.b == fam.b);
    CHECK(back.r == fam.r);
    CHECK(back.c == fam.c);
    CHECK(back.rng_seed == fam.rng_seed);
    CHECK(back.p1 == fam.p1);
    CHECK(back.p2 == fam.p2);
    CHECK(back.dimension == fam.dimension);
    CHECK(back.width == fam.width);
  }
  const IndexParams p = derive_params(1024, 0.9, 0.5, 0.1);
  const IndexParams q = index_params_from_json(index_params_to_json(p));
  CHECK(q.concat_k == p.concat_k);
  CHECK(q.tables_L == p.tables_L);
  CHECK(q.rho == p.rho);
  CHECK(q.delta == p.delta);
}

TEST_CASE("a saved index reloads with identical answers and re-saves byte for byte") {
  const RngStream gen(898989);
  std::vector<StepFunction> items;
  for (int i = 0; i < 30; ++i)
    items.push_back(oracle::random_step(gen, i, 4 + i % 4, 0.0, 2.0));
  const HashFamily fam = random_point_family(0.0, 2.0, 321, 0.1, 2.0);
  const StepIndex idx(items, make_step_adapter(fam), 0.1, 2.0, 0.1, 321);

  const std::string path = "step_index_roundtrip.bin";
  save_step_index(idx, fam, path);
  const LoadedStepIndex loaded = load_step_index(path);
  CHECK(loaded.family.kind == fam.kind);
  CHECK(loaded.index.params().concat_k == idx.params().concat_k);
  CHECK(same_tables(idx, loaded.index));

  std::vector<StepFunction> probes;
  for (int i = 0; i < 30; i += 4) probes.push_back(add_scalar(items[i], 0.05));
  const auto ra = idx.query_batch(probes);
  const auto rb = loaded.index.query_batch(probes);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    CHECK(ra[i].hit.has_value() == rb[i].hit.has_value());
    if (ra[i].hit) {
      CHECK(ra[i].hit->id == rb[i].hit->id);
      CHECK(ra[i].hit->distance == rb[i].hit->distance);
    }
  }

  const std::string resaved = "step_index_roundtrip2.bin";
  save_step_index(loaded.index, loaded.family, resaved);
  CHECK(slurp(path) == slurp(resaved));

  std::ofstream(path, std::ios::trunc) << "{\"format\":\"other\"}\n";
  CHECK_THROWS_AS(load_step_index(path), ValidationError);
  std::ofstream(path, std::ios::trunc) << "not json\n";
  CHECK_THROWS_AS(load_step_index(path), ValidationError);
  CHECK_THROWS_AS(load_step_index("no_such_file.bin"), ValidationError);
  std::remove(path.c_str());
  std::remove(resaved.c_str());
}

}  // TEST_SUITE
