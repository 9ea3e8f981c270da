#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "turnhash/errors.hpp"
#include "turnhash/exact.hpp"
#include "turnhash/polyindex.hpp"
#include "turnhash/rng.hpp"
#include "turnhash/turning.hpp"

using namespace turnhash;

namespace {

constexpr double kPi = 3.14159265358979323846;

Polygon with_id(Polygon p, const std::string& id) {
  p.id = id;
  return p;
}

Polygon transformed(const Polygon& p, const std::string& id, double angle,
                    double scale, double dx, double dy) {
  Polygon out;
  out.id = id;
  const double cs = std::cos(angle), sn = std::sin(angle);
  for (const Point& v : p.vertices)
    out.vertices.push_back({scale * (cs * v.x - sn * v.y) + dx,
                            scale * (sn * v.x + cs * v.y) + dy});
  return out;
}

std::vector<Polygon> random_hexagons(int count, std::uint64_t seed,
                                     const std::string& prefix) {
  const RngStream gen(seed);
  std::vector<Polygon> out;
  for (int i = 0; i < count; ++i)
    out.push_back(
        with_id(make_random_polygon(6, gen, i), prefix + std::to_string(i)));
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("polyindex") {

TEST_CASE("vertical clones put each step value at zero") {
  const StepFunction c5 = make_step({0.0, 1.0}, {5.0});
  const auto cc = clone_vertical(c5);
  REQUIRE(cc.size() == 1);
  CHECK(cc[0] == make_step({0.0, 1.0}, {0.0}));

  const StepFunction f0 = make_step({0.0, 0.4, 1.0}, {1.0, 3.0});
  const auto fc = clone_vertical(f0);
  REQUIRE(fc.size() == 2);
  CHECK(fc[0].values == std::vector<double>{0.0, 2.0});
  CHECK(fc[1].values == std::vector<double>{-2.0, 0.0});

  const RngStream gen(121212);
  for (int t = 0; t < 20; ++t) {
    const StepFunction f = oracle::random_step(gen, t, 3 + t % 5, -2.0, 7.0);
    const auto clones = clone_vertical(f);
    std::vector<double> distinct = f.values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()),
                   distinct.end());
    CHECK(clones.size() == distinct.size());
    for (const StepFunction& cl : clones) {
      CHECK(cl.minimum() <= 0.0);
      CHECK(cl.maximum() >= 0.0);
      CHECK(std::count(cl.values.begin(), cl.values.end(), 0.0) >= 1);
    }
  }
}

TEST_CASE("slide clones cover the unslid function and every discontinuity") {
  const StepFunction c2 = make_step({0.0, 1.0}, {2.0});
  const auto cc = clone_slides(c2);
  REQUIRE(cc.size() == 1);
  CHECK(cc[0].u == 0.0);
  CHECK(cc[0].fn == c2);

  const Polygon square = with_id(make_regular_polygon(4), "sq");
  const StepFunction tsq = normalize_min_zero(
      turning_function(square, first_edge_midpoint_reference(square)));
  CHECK(clone_slides(tsq).size() == 5);

  const RngStream gen(131313);
  for (int t = 0; t < 20; ++t) {
    const StepFunction f = oracle::random_step(gen, t, 2 + t % 6, 0.0, 3.0);
    const auto clones = clone_slides(f);
    const auto discs = discontinuities(f);
    CHECK(clones.size() == discs.size() + 1);
    const StepFunction ext = extend_2pi(f);
    for (std::size_t i = 0; i < clones.size(); ++i) {
      const double u = clones[i].u;
      CHECK((u == 0.0 ||
             std::find(discs.begin(), discs.end(), u) != discs.end()));
      CHECK(clones[i].fn == slide(ext, u));
      CHECK(clones[i].fn.span() <= f.span() + 2.0 * kPi + 1e-9);
    }
  }
}

TEST_CASE("some slide clone pair always realizes the full slide distance") {
  const RngStream gen(141414);
  for (int t = 0; t < 12; ++t) {
    const StepFunction f = oracle::random_step(gen, 2 * t, 3 + t % 4, 0.0, 4.0);
    const StepFunction g = oracle::random_step(gen, 2 * t + 1, 5, 0.0, 4.0);
    const auto cf = clone_slides(f);
    const auto cg = clone_slides(g);
    for (int p : {1, 2}) {
      double best = 1e300;
      for (const SlideClone& a : cf)
        for (const SlideClone& b : cg) {
          const double d = p == 1 ? d1_updown(a.fn, b.fn).distance
                                  : d2_updown(a.fn, b.fn).distance;
          best = std::min(best, d);
        }
      const double want = d_slide(f, g, p).distance;
      CHECK(best == doctest::Approx(want).epsilon(1e-9));
      CHECK(best >= want - 1e-9);  // clone pairs are genuine alignments
    }
  }
}

TEST_CASE("some vertical clone pair always realizes the shift distance") {
  const RngStream gen(151515);
  for (int t = 0; t < 15; ++t) {
    const StepFunction f = oracle::random_step(gen, 2 * t, 4 + t % 3, -1.0, 5.0);
    const StepFunction g = oracle::random_step(gen, 2 * t + 1, 6, -1.0, 5.0);
    double best = 1e300;
    for (const StepFunction& a : clone_vertical(f))
      for (const StepFunction& b : clone_vertical(g))
        best = std::min(best, l1_distance(a, b));
    CHECK(best == doctest::Approx(d1_updown(f, g).distance).epsilon(1e-9));
  }
}

TEST_CASE("config gate: the approximation bound and structural validation") {
  auto polys = random_hexagons(3, 4040, "h");
  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 1;
  cfg.r = kPi;
  cfg.c = 2.1;  // above 2 - pi/(6 pi) = 1.833...
  cfg.variant = IndexVariant::MeanReduce;
  cfg.seed = 1;
  CHECK_NOTHROW(PolygonIndex(polys, cfg));

  cfg.c = 1.5;
  CHECK_THROWS_AS(PolygonIndex(polys, cfg), ParamError);
  cfg.c = 2.1;
  cfg.p = 3;
  CHECK_THROWS_AS(PolygonIndex(polys, cfg), ParamError);
  cfg.p = 1;
  cfg.r = 0.0;
  CHECK_THROWS_AS(PolygonIndex(polys, cfg), ParamError);
  cfg.r = kPi;
  cfg.delta = 1.0;
  CHECK_THROWS_AS(PolygonIndex(polys, cfg), ParamError);
  cfg.delta = 0.1;

  // Step-shift range [-6 pi, 6 pi] still needs cr inside its width.
  cfg.variant = IndexVariant::StepShift;
  cfg.r = 13.0 * kPi;
  cfg.c = 1.1;
  CHECK_THROWS_AS(PolygonIndex(polys, cfg), ParamError);
  cfg.r = 2.0 * kPi;
  CHECK_NOTHROW(PolygonIndex(polys, cfg));

  // Octagon into an m=6 index, then a duplicate id.
  auto bad = polys;
  bad.push_back(with_id(make_regular_polygon(8), "oct"));
  cfg.variant = IndexVariant::MeanReduce;
  cfg.c = 2.1;
  CHECK_THROWS_AS(PolygonIndex(bad, cfg), ValidationError);
  auto dup = polys;
  dup.push_back(with_id(make_regular_polygon(5), polys.front().id));
  CHECK_THROWS_AS(PolygonIndex(dup, cfg), ValidationError);
}

TEST_CASE("p=2 config pins the sample dimension from (m, r, c)") {
  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 2;
  cfg.r = 1.0;
  cfg.c = 4.0;
  cfg.seed = 2;
  const PolygonIndex idx(random_hexagons(2, 5050, "h"), cfg);
  CHECK(idx.family().dimension == 22740);
  CHECK(idx.family().r == doctest::Approx(std::sqrt(2.0)));  // c^(1/4) r
  CHECK(idx.family().c == doctest::Approx(2.0));             // sqrt(c)
}

TEST_CASE("mean-reduce structure retrieves a transformed stored polygon") {
  auto polys = random_hexagons(12, 6060, "d");
  const RngStream gen(6161);
  const Polygon plant = with_id(make_random_polygon(6, gen, 99), "plant");
  polys.push_back(plant);

  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 1;
  cfg.r = 3.5 * kPi;
  cfg.c = 2.5;
  cfg.variant = IndexVariant::MeanReduce;
  cfg.delta = 0.1;
  cfg.seed = 17;
  const PolygonIndex idx(polys, cfg);

  const Polygon q = transformed(plant, "q", 1.1, 2.5, -3.0, 4.0);
  const auto res = idx.query(q);
  // cr here exceeds the D1 diameter of hexagon space, so any stored polygon
  // is an admissible answer; the planted copy guarantees one exists.
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->distance <= cfg.c * cfg.r + 1e-9);
  const auto owner = std::find_if(
      polys.begin(), polys.end(),
      [&](const Polygon& p) { return p.id == res.hit->id; });
  REQUIRE(owner != polys.end());
  CHECK(polygon_distance(*owner, q, 1).distance ==
        doctest::Approx(res.hit->distance).epsilon(1e-12));

  const std::size_t budget =
      3 * static_cast<std::size_t>(idx.inner().params().tables_L);
  CHECK(res.candidates_scanned <= (6 + 2) * budget);
}

TEST_CASE("step-shift structure retrieves through the doubled clone set") {
  auto polys = random_hexagons(8, 7070, "d");
  const RngStream gen(7171);
  const Polygon plant = with_id(make_random_polygon(6, gen, 42), "plant");
  polys.push_back(plant);

  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 1;
  cfg.r = 2.0 * kPi;
  cfg.c = 1.5;
  cfg.variant = IndexVariant::StepShift;
  cfg.delta = 0.1;
  cfg.seed = 23;
  const PolygonIndex idx(polys, cfg);
  // Doubled cloning: strictly more inner items than polygons times slides.
  CHECK(idx.inner().items().size() > 9 * 7);

  const Polygon q = transformed(plant, "q", -0.7, 0.3, 1.0, 1.0);
  const auto res = idx.query(q);
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->distance <= cfg.c * cfg.r + 1e-9);

  const std::string path = "polyindex_stepshift.bin";
  idx.save(path);
  const PolygonIndex back = PolygonIndex::load(path);
  const auto res2 = back.query(q);
  REQUIRE(res2.hit.has_value());
  CHECK(res2.hit->id == res.hit->id);
  CHECK(res2.hit->distance == res.hit->distance);
  CHECK(res2.candidates_scanned == res.candidates_scanned);
  std::remove(path.c_str());
}

TEST_CASE("p=2 structure retrieves through the implicit embedding") {
  const Polygon hex = with_id(make_regular_polygon(6), "plant");
  const Polygon q = transformed(hex, "q", 0.9, 1.7, 2.0, -1.0);

  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 2;
  cfg.r = 1.0;
  cfg.c = 4.0;
  cfg.delta = 0.1;
  cfg.seed = 31;

  // Alone, a transformed copy is found at distance ~0: zero embedded distance
  // collides on every draw.
  const PolygonIndex solo({hex}, cfg);
  const auto alone = solo.query(q);
  REQUIRE(alone.hit.has_value());
  CHECK(alone.hit->id == "plant");
  CHECK(alone.hit->distance <= 1e-6);

  // Spiral decoys sit at D2 ~ 2.2, inside cr = 4: with them stored any answer
  // is admissible, but it must carry its exact confirmed distance.
  std::vector<Polygon> polys;
  for (double eps : {0.05, 0.08, 0.12, 0.15, 0.2, 0.25})
    polys.push_back(with_id(make_spiral_polygon(6, eps),
                            "spiral" + std::to_string(eps)));
  polys.push_back(hex);
  const PolygonIndex idx(polys, cfg);
  const auto res = idx.query(q);
  REQUIRE(res.hit.has_value());
  CHECK(res.hit->distance <= cfg.c * cfg.r + 1e-9);
  const auto owner = std::find_if(
      polys.begin(), polys.end(),
      [&](const Polygon& p) { return p.id == res.hit->id; });
  REQUIRE(owner != polys.end());
  CHECK(polygon_distance(*owner, q, 2).distance ==
        doctest::Approx(res.hit->distance).epsilon(1e-9));
}

TEST_CASE("far-only corpus: every polygon query comes back empty") {
  // Spirals wind to the m-gon turning bound; a plain hexagon sits at
  // D1 ~ 1.62 from them, beyond cr = 1.5, so the post-filter rejects every
  // candidate no matter how the hashes collide.
  std::vector<Polygon> decoys{
      with_id(make_spiral_polygon(6, 0.1), "s1"),
      with_id(make_spiral_polygon(6, 0.18), "s2")};

  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 1;
  cfg.r = 1.0;
  cfg.c = 1.5;
  cfg.variant = IndexVariant::StepShift;
  cfg.delta = 0.1;
  cfg.seed = 37;

  const Polygon hex = with_id(make_regular_polygon(6), "hex");
  const std::vector<Polygon> probes{
      transformed(hex, "q1", 0.0, 1.0, 0.0, 0.0),
      transformed(hex, "q2", -1.3, 0.4, 0.0, 9.0),
      transformed(hex, "q3", 2.2, 5.0, -7.0, 0.5)};
  for (const Polygon& d : decoys)
    for (const Polygon& p : probes)
      REQUIRE(polygon_distance(d, p, 1).distance > cfg.c * cfg.r + 0.05);

  const PolygonIndex far_only(decoys, cfg);
  for (const auto& r : far_only.query_batch(probes))
    CHECK_FALSE(r.hit.has_value());
}

TEST_CASE("polygon index survives the save/load/save round trip byte for byte") {
  auto polys = random_hexagons(10, 9090, "h");
  PolygonIndexConfig cfg;
  cfg.m = 6;
  cfg.p = 1;
  cfg.r = 3.5 * kPi;
  cfg.c = 2.5;
  cfg.variant = IndexVariant::MeanReduce;
  cfg.delta = 0.1;
  cfg.seed = 47;
  const PolygonIndex idx(polys, cfg);

  const std::string p1 = "polyindex_rt1.bin";
  const std::string p2 = "polyindex_rt2.bin";
  idx.save(p1);
  const PolygonIndex back = PolygonIndex::load(p1);
  CHECK(back.config().m == cfg.m);
  CHECK(back.config().seed == cfg.seed);
  CHECK(back.polygons().size() == polys.size());
  CHECK(back.owners() == idx.owners());

  std::vector<Polygon> probes;
  for (int i = 0; i < 3; ++i)
    probes.push_back(
        transformed(polys[static_cast<std::size_t>(i)], "p", 0.3 * i, 1.5, i, -i));
  const auto ra = idx.query_batch(probes);
  const auto rb = back.query_batch(probes);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    CHECK(ra[i].hit.has_value() == rb[i].hit.has_value());
    if (ra[i].hit) {
      CHECK(ra[i].hit->id == rb[i].hit->id);
      CHECK(ra[i].hit->distance == rb[i].hit->distance);
    }
    CHECK(ra[i].candidates_scanned == rb[i].candidates_scanned);
  }

  back.save(p2);
  CHECK(slurp(p1) == slurp(p2));

  std::ofstream(p1, std::ios::trunc) << "{\"format\":\"turnhash-index\"}\n";
  CHECK_THROWS_AS(PolygonIndex::load(p1), ValidationError);
  CHECK_THROWS_AS(PolygonIndex::load("missing_polyindex.bin"), ValidationError);
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

}  // TEST_SUITE
