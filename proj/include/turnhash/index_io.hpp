#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "turnhash/index.hpp"

namespace turnhash {

// Index files are one JSON header line (format tag, version, family, params,
// counts) followed by a raw little-endian binary payload. Files are
// self-contained: reloading rebuilds the hash draws from the persisted seeds,
// so a loaded index answers queries exactly like the original.

nlohmann::json family_to_json(const HashFamily& fam);
HashFamily family_from_json(const nlohmann::json& j);

nlohmann::json index_params_to_json(const IndexParams& p);
IndexParams index_params_from_json(const nlohmann::json& j);

// Adapter a persisted family reconstructs to: the embedding adapter for
// DiscreteSample, the plain step adapter otherwise.
FamilyAdapter<StepFunction> adapter_for(const HashFamily& fam);

void save_step_index(const LshIndex<StepFunction>& idx, const HashFamily& fam,
                     const std::string& path);

struct LoadedStepIndex {
  HashFamily family;
  LshIndex<StepFunction> index;
};

LoadedStepIndex load_step_index(const std::string& path);

// Binary primitives shared by the index file formats.
namespace wire {

void put_u32(std::ostream& os, std::uint32_t v);
void put_u64(std::ostream& os, std::uint64_t v);
void put_f64(std::ostream& os, double v);
void put_string(std::ostream& os, const std::string& s);
void put_step(std::ostream& os, const StepFunction& f);
void put_tables(std::ostream& os,
                const std::vector<std::vector<IndexEntry>>& tables);

std::uint32_t get_u32(std::istream& is);
std::uint64_t get_u64(std::istream& is);
double get_f64(std::istream& is);
std::string get_string(std::istream& is);
StepFunction get_step(std::istream& is);
std::vector<std::vector<IndexEntry>> get_tables(std::istream& is,
                                                std::size_t count);

}  // namespace wire

}  // namespace turnhash
