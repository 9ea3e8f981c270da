#include "turnhash/io_json.hpp"

#include <fstream>
#include <unordered_set>

#include "turnhash/errors.hpp"

namespace turnhash {

using nlohmann::json;

json step_to_json(const StepFunction& f) {
  return json{{"breakpoints", f.breakpoints},
              {"values", f.values},
              {"domain_end", f.domain_end}};
}

StepFunction step_from_json(const json& j) {
  try {
    StepFunction f = make_step(j.at("breakpoints").get<std::vector<double>>(),
                               j.at("values").get<std::vector<double>>());
    const double end = j.value("domain_end", 1.0);
    if (f.domain_end != end)
      throw ValidationError("step function: domain_end disagrees with last breakpoint");
    return f;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("step function: bad JSON: ") + e.what());
  }
}

json polygon_to_json(const Polygon& p) {
  json verts = json::array();
  for (const auto& v : p.vertices) verts.push_back(json::array({v.x, v.y}));
  return json{{"id", p.id}, {"vertices", std::move(verts)}};
}

Polygon polygon_from_json(const json& j) {
  try {
    Polygon p;
    p.id = j.at("id").get<std::string>();
    for (const auto& v : j.at("vertices")) {
      if (!v.is_array() || v.size() != 2)
        throw ValidationError("polygon '" + p.id + "': vertex is not an [x, y] pair");
      p.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return p;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("polygon record: bad JSON: ") + e.what());
  }
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("dataset: cannot open " + path);
  Dataset ds;
  std::unordered_set<std::string> seen;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("dataset: bad JSON line: ") + e.what());
    }
    if (first && j.is_object() && j.value("format", "") == "turnhash-dataset") {
      ds.m = j.value("m", 0);
      first = false;
      continue;
    }
    first = false;
    Polygon p = validate(polygon_from_json(j));
    if (ds.m > 0 && static_cast<int>(p.vertices.size()) > ds.m)
      throw ValidationError("dataset: polygon '" + p.id + "' has " +
                            std::to_string(p.vertices.size()) +
                            " vertices, above the declared cap " +
                            std::to_string(ds.m));
    if (!seen.insert(p.id).second)
      throw ValidationError("dataset: duplicate id '" + p.id + "'");
    ds.polygons.push_back(std::move(p));
  }
  return ds;
}

void write_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("dataset: cannot write " + path);
  if (ds.m > 0) {
    out << json{{"format", "turnhash-dataset"},
                {"version", 1},
                {"m", ds.m},
                {"count", ds.polygons.size()}}
               .dump()
        << '\n';
  }
  for (const auto& p : ds.polygons) out << polygon_to_json(p).dump() << '\n';
  if (!out) throw ValidationError("dataset: write failed for " + path);
}

}  // namespace turnhash
