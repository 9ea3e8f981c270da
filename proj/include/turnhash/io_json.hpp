#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "turnhash/stepfn.hpp"
#include "turnhash/turning.hpp"

namespace turnhash {

// {"breakpoints":[...],"values":[...],"domain_end":1}
nlohmann::json step_to_json(const StepFunction& f);
StepFunction step_from_json(const nlohmann::json& j);

// {"id":"...","vertices":[[x,y],...]}
nlohmann::json polygon_to_json(const Polygon& p);
Polygon polygon_from_json(const nlohmann::json& j);

// JSON-lines polygon file. The first line may be a metadata header
// {"format":"turnhash-dataset",...} declaring the vertex-count cap m;
// every other line is one polygon record.
struct Dataset {
  int m = 0;  // declared cap; 0 when the file carries no header
  std::vector<Polygon> polygons;
};

// Reads, validates every record, and enforces unique ids; when the header
// declares m, rejects records with more vertices than that.
Dataset read_dataset(const std::string& path);

// Writes a header (when ds.m > 0) followed by one record per line.
void write_dataset(const std::string& path, const Dataset& ds);

}  // namespace turnhash
