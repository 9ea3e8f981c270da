#include "turnhash/polyindex.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <json.hpp>

#include "turnhash/errors.hpp"
#include "turnhash/index_io.hpp"

namespace turnhash {

std::vector<SlideClone> clone_slides(const StepFunction& f) {
  const StepFunction ext = extend_2pi(f);
  std::vector<SlideClone> clones{{slide(ext, 0.0), 0.0}};
  for (double u : discontinuities(f)) clones.push_back({slide(ext, u), u});
  return clones;
}

std::vector<StepFunction> clone_vertical(const StepFunction& f) {
  std::vector<double> levels = f.values;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<StepFunction> clones;
  clones.reserve(levels.size());
  for (double v : levels) clones.push_back(add_scalar(f, -v));
  return clones;
}

namespace {

const char* variant_name(IndexVariant v) {
  return v == IndexVariant::MeanReduce ? "mean-reduce" : "step-shift";
}

IndexVariant variant_from_name(const std::string& name) {
  if (name == "mean-reduce") return IndexVariant::MeanReduce;
  if (name == "step-shift") return IndexVariant::StepShift;
  throw ValidationError("polygon index file: unknown variant '" + name + "'");
}

}  // namespace

void PolygonIndex::init_family() {
  const double omega = bounds_.b_m;
  if (config_.p == 2) {
    const long long dim =
        riemann_n(config_.r, config_.c, config_.m + 2, -omega, omega);
    if (dim > 50'000'000)
      throw ParamError("polygon index: sample dimension explodes at this (r, c)");
    const TunedParams tuned = discrete_sample_params(config_.r, config_.c);
    family_ = euclidean_lsh_family(static_cast<int>(dim), tuned.r_prime,
                                   tuned.c_prime, config_.seed);
  } else if (config_.variant == IndexVariant::MeanReduce) {
    family_ = mean_reduce_family(0.0, omega, config_.r, config_.c, config_.seed);
  } else {
    family_ = random_point_family(-omega, omega, config_.seed, config_.r,
                                  config_.c);
  }
}

std::vector<StepFunction> PolygonIndex::clone_items(const Polygon& poly) const {
  const StepFunction t0 = normalize_min_zero(
      turning_function(poly, first_edge_midpoint_reference(poly)));
  const double omega = bounds_.b_m;
  std::vector<StepFunction> items;
  for (const SlideClone& sc : clone_slides(t0)) {
    if (config_.p == 1 && config_.variant == IndexVariant::StepShift) {
      for (StepFunction& v : clone_vertical(sc.fn)) items.push_back(std::move(v));
    } else {
      items.push_back(mean_reduce(sc.fn));
    }
  }
  for (const StepFunction& item : items) {
    if (item.minimum() < -omega - 1e-9 || item.maximum() > omega + 1e-9)
      throw ValidationError(
          "polygon index: clone leaves the declared hash range; polygon '" +
          poly.id + "' is out of contract for m=" + std::to_string(config_.m));
  }
  return items;
}

FamilyAdapter<StepFunction> PolygonIndex::adapter() const {
  if (config_.p == 2) return make_embedding_adapter(family_);
  if (config_.variant == IndexVariant::StepShift)
    return make_step_adapter(family_);
  // Items are mean-reduced once up front, so hash them directly instead of
  // re-reducing on every draw like the generic adapter would.
  FamilyAdapter<StepFunction> ad;
  ad.p1 = family_.p1;
  ad.p2 = family_.p2;
  ad.data_hash = [fam = family_](const StepFunction& f, std::uint64_t i) {
    return h1_apply(h1_draw(fam, i), f);
  };
  ad.distance = [](const StepFunction& a, const StepFunction& b) {
    return d1_updown(a, b).distance;
  };
  return ad;
}

double PolygonIndex::inner_delta() const {
  // A query fans out to at most m+2 slide clones, squared again by vertical
  // cloning for StepShift; each inner query gets an equal share of delta.
  const double fanout = config_.m + 2;
  return config_.p == 1 && config_.variant == IndexVariant::StepShift
             ? config_.delta / (fanout * fanout)
             : config_.delta / fanout;
}

PolygonIndex::PolygonIndex(std::vector<Polygon> polygons,
                           const PolygonIndexConfig& cfg)
    : config_(cfg), bounds_(gon_bounds(cfg.m)) {
  if (cfg.p != 1 && cfg.p != 2)
    throw ParamError("polygon index: p must be 1 or 2");
  if (!(cfg.r > 0.0 && cfg.c > 1.0))
    throw ParamError("polygon index: requires r > 0 and c > 1");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ParamError("polygon index: delta must lie in (0, 1)");
  init_family();

  polygons_.reserve(polygons.size());
  std::unordered_set<std::string> seen;
  for (Polygon& p : polygons) {
    Polygon v = validate(std::move(p));
    if (static_cast<int>(v.vertices.size()) > cfg.m)
      throw ValidationError("polygon '" + v.id + "' has more than " +
                            std::to_string(cfg.m) + " vertices");
    if (!seen.insert(v.id).second)
      throw ValidationError("duplicate polygon id '" + v.id + "'");
    polygons_.push_back(std::move(v));
  }

  std::vector<StepFunction> items;
  for (std::size_t i = 0; i < polygons_.size(); ++i) {
    for (StepFunction& f : clone_items(polygons_[i])) {
      items.push_back(std::move(f));
      owner_.push_back(static_cast<std::uint32_t>(i));
    }
  }

  const double inner_r = config_.p == 2 ? family_.r : config_.r;
  const double inner_c = config_.p == 2 ? family_.c : config_.c;
  inner_.emplace(std::move(items), adapter(), inner_r, inner_c, inner_delta(),
                 cfg.seed);
}

std::vector<PolygonQueryResult> PolygonIndex::query_batch(
    const std::vector<Polygon>& qs) const {
  std::vector<Polygon> valid;
  valid.reserve(qs.size());
  std::vector<StepFunction> flat;
  std::vector<std::size_t> q_of;
  std::vector<std::pair<std::size_t, std::size_t>> span(qs.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    valid.push_back(validate(qs[qi]));
    if (static_cast<int>(valid.back().vertices.size()) > config_.m)
      throw ValidationError("query polygon '" + valid.back().id +
                            "' has more than " + std::to_string(config_.m) +
                            " vertices");
    const std::size_t start = flat.size();
    for (StepFunction& f : clone_items(valid.back())) {
      flat.push_back(std::move(f));
      q_of.push_back(qi);
    }
    span[qi] = {start, flat.size()};
  }

  // All clones of one query share the same exact-distance verdict per stored
  // polygon; memoize it so the oracle runs once per (query, polygon) pair.
  std::unordered_map<std::uint64_t, double> memo;
  const auto exact_dist = [&](std::size_t flat_qi, std::uint32_t id) {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(q_of[flat_qi]) << 32) | owner_[id];
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double d =
        polygon_distance(polygons_[owner_[id]], valid[q_of[flat_qi]], config_.p)
            .distance;
    memo.emplace(key, d);
    return d;
  };
  const auto inner_res =
      inner_->query_batch(flat, exact_dist, config_.c * config_.r);

  std::vector<PolygonQueryResult> results(qs.size());
  for (std::size_t qi = 0; qi < qs.size(); ++qi) {
    PolygonQueryResult& out = results[qi];
    for (std::size_t i = span[qi].first; i < span[qi].second; ++i) {
      out.candidates_scanned += inner_res[i].candidates_scanned;
      if (!out.hit && inner_res[i].hit)
        out.hit = PolygonHit{polygons_[owner_[inner_res[i].hit->id]].id,
                             inner_res[i].hit->distance};
    }
  }
  return results;
}

PolygonQueryResult PolygonIndex::query(const Polygon& q) const {
  return query_batch({q}).front();
}

void PolygonIndex::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  const nlohmann::json header = {
      {"format", "turnhash-polyindex"},
      {"version", 1},
      {"config",
       {{"m", config_.m},
        {"p", config_.p},
        {"r", config_.r},
        {"c", config_.c},
        {"variant", variant_name(config_.variant)},
        {"delta", config_.delta},
        {"seed", config_.seed}}},
      {"bounds",
       {{"a_m", bounds_.a_m},
        {"b_m", bounds_.b_m},
        {"lambda_m", bounds_.lambda_m},
        {"span_bound", bounds_.span_bound}}},
      {"family", family_to_json(family_)},
      {"params", index_params_to_json(inner_->params())},
      {"polygons", polygons_.size()},
      {"items", inner_->items().size()}};
  os << header.dump() << '\n';
  for (const Polygon& p : polygons_) {
    wire::put_string(os, p.id);
    wire::put_u32(os, static_cast<std::uint32_t>(p.vertices.size()));
    for (const Point& v : p.vertices) {
      wire::put_f64(os, v.x);
      wire::put_f64(os, v.y);
    }
  }
  for (std::size_t i = 0; i < inner_->items().size(); ++i) {
    wire::put_u32(os, owner_[i]);
    wire::put_step(os, inner_->items()[i]);
  }
  wire::put_tables(os, inner_->tables());
  if (!os) throw ValidationError("write failed for '" + path + "'");
}

PolygonIndex PolygonIndex::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("polygon index file: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("polygon index file: header line is not valid JSON");
  }
  if (header.value("format", "") != "turnhash-polyindex")
    throw ValidationError("polygon index file: wrong format tag");
  if (header.value("version", 0) != 1)
    throw ValidationError("polygon index file: unsupported version");

  PolygonIndex out;
  const auto& cj = header.at("config");
  out.config_.m = cj.at("m").get<int>();
  out.config_.p = cj.at("p").get<int>();
  out.config_.r = cj.at("r").get<double>();
  out.config_.c = cj.at("c").get<double>();
  out.config_.variant = variant_from_name(cj.at("variant").get<std::string>());
  out.config_.delta = cj.at("delta").get<double>();
  out.config_.seed = cj.at("seed").get<std::uint64_t>();
  out.bounds_ = gon_bounds(out.config_.m);
  if (std::abs(header.at("bounds").at("b_m").get<double>() - out.bounds_.b_m) >
      1e-12)
    throw ValidationError("polygon index file: recorded bounds disagree with m");
  out.family_ = family_from_json(header.at("family"));
  const IndexParams params = index_params_from_json(header.at("params"));

  const std::size_t n_polys = header.at("polygons").get<std::size_t>();
  const std::size_t n_items = header.at("items").get<std::size_t>();
  out.polygons_.reserve(n_polys);
  for (std::size_t i = 0; i < n_polys; ++i) {
    Polygon p;
    p.id = wire::get_string(is);
    const std::uint32_t count = wire::get_u32(is);
    p.vertices.resize(count);
    for (Point& v : p.vertices) {
      v.x = wire::get_f64(is);
      v.y = wire::get_f64(is);
    }
    out.polygons_.push_back(validate(std::move(p)));
  }
  std::vector<StepFunction> items;
  items.reserve(n_items);
  out.owner_.reserve(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    out.owner_.push_back(wire::get_u32(is));
    items.push_back(wire::get_step(is));
  }
  auto tables = wire::get_tables(is, static_cast<std::size_t>(params.tables_L));
  out.inner_.emplace(LshIndex<StepFunction>::from_parts(
      std::move(items), out.adapter(), params, std::move(tables)));
  return out;
}

}  // namespace turnhash
