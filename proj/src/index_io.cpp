#include "turnhash/index_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "turnhash/errors.hpp"

namespace turnhash {

namespace wire {

namespace {

template <class T>
void put_raw(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw ValidationError("index file: truncated binary payload");
  return v;
}

}  // namespace

void put_u32(std::ostream& os, std::uint32_t v) { put_raw(os, v); }
void put_u64(std::ostream& os, std::uint64_t v) { put_raw(os, v); }
void put_f64(std::ostream& os, double v) { put_raw(os, v); }

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_step(std::ostream& os, const StepFunction& f) {
  put_u32(os, static_cast<std::uint32_t>(f.piece_count()));
  for (double b : f.breakpoints) put_f64(os, b);
  for (double v : f.values) put_f64(os, v);
}

void put_tables(std::ostream& os,
                const std::vector<std::vector<IndexEntry>>& tables) {
  for (const auto& table : tables) {
    put_u64(os, table.size());
    for (const IndexEntry& e : table) {
      put_u64(os, e.key);
      put_u32(os, e.id);
    }
  }
}

std::uint32_t get_u32(std::istream& is) { return get_raw<std::uint32_t>(is); }
std::uint64_t get_u64(std::istream& is) { return get_raw<std::uint64_t>(is); }
double get_f64(std::istream& is) { return get_raw<double>(is); }

std::string get_string(std::istream& is) {
  const std::uint32_t n = get_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw ValidationError("index file: truncated string");
  return s;
}

StepFunction get_step(std::istream& is) {
  const std::uint32_t pieces = get_u32(is);
  if (pieces == 0) throw ValidationError("index file: empty step function");
  std::vector<double> breaks(pieces + 1);
  std::vector<double> values(pieces);
  for (double& b : breaks) b = get_f64(is);
  for (double& v : values) v = get_f64(is);
  return make_step(std::move(breaks), std::move(values));
}

std::vector<std::vector<IndexEntry>> get_tables(std::istream& is,
                                                std::size_t count) {
  std::vector<std::vector<IndexEntry>> tables(count);
  for (auto& table : tables) {
    table.resize(get_u64(is));
    for (IndexEntry& e : table) {
      e.key = get_u64(is);
      e.id = get_u32(is);
    }
  }
  return tables;
}

}  // namespace wire

namespace {

constexpr int kIndexFormatVersion = 1;

const char* kind_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::RandomPoint: return "random-point";
    case FamilyKind::MeanReduce: return "mean-reduce";
    case FamilyKind::AsymmetricTwoPoint: return "asymmetric-two-point";
    case FamilyKind::DiscreteSample: return "discrete-sample";
  }
  throw ValidationError("unknown family kind");
}

FamilyKind kind_from_name(const std::string& name) {
  if (name == "random-point") return FamilyKind::RandomPoint;
  if (name == "mean-reduce") return FamilyKind::MeanReduce;
  if (name == "asymmetric-two-point") return FamilyKind::AsymmetricTwoPoint;
  if (name == "discrete-sample") return FamilyKind::DiscreteSample;
  throw ValidationError("index file: unknown family kind '" + name + "'");
}

nlohmann::json check_header(const std::string& line, const char* format) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw ValidationError("index file: header line is not valid JSON");
  }
  if (!j.is_object() || j.value("format", "") != format)
    throw ValidationError(std::string("index file: expected format '") +
                          format + "'");
  if (j.value("version", 0) != kIndexFormatVersion)
    throw ValidationError("index file: unsupported version");
  return j;
}

}  // namespace

nlohmann::json family_to_json(const HashFamily& fam) {
  return {{"kind", kind_name(fam.kind)}, {"a", fam.a},
          {"b", fam.b},                  {"r", fam.r},
          {"c", fam.c},                  {"seed", fam.rng_seed},
          {"p1", fam.p1},                {"p2", fam.p2},
          {"dimension", fam.dimension},  {"width", fam.width}};
}

HashFamily family_from_json(const nlohmann::json& j) {
  HashFamily fam;
  fam.kind = kind_from_name(j.at("kind").get<std::string>());
  fam.a = j.at("a").get<double>();
  fam.b = j.at("b").get<double>();
  fam.r = j.at("r").get<double>();
  fam.c = j.at("c").get<double>();
  fam.rng_seed = j.at("seed").get<std::uint64_t>();
  fam.p1 = j.at("p1").get<double>();
  fam.p2 = j.at("p2").get<double>();
  fam.dimension = j.at("dimension").get<int>();
  fam.width = j.at("width").get<double>();
  return fam;
}

nlohmann::json index_params_to_json(const IndexParams& p) {
  return {{"r", p.r},
          {"c", p.c},
          {"p1", p.p1},
          {"p2", p.p2},
          {"rho", p.rho},
          {"concat_k", p.concat_k},
          {"tables_L", p.tables_L},
          {"delta", p.delta},
          {"seed", p.seed}};
}

IndexParams index_params_from_json(const nlohmann::json& j) {
  IndexParams p;
  p.r = j.at("r").get<double>();
  p.c = j.at("c").get<double>();
  p.p1 = j.at("p1").get<double>();
  p.p2 = j.at("p2").get<double>();
  p.rho = j.at("rho").get<double>();
  p.concat_k = j.at("concat_k").get<int>();
  p.tables_L = j.at("tables_L").get<int>();
  p.delta = j.at("delta").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

FamilyAdapter<StepFunction> adapter_for(const HashFamily& fam) {
  return fam.kind == FamilyKind::DiscreteSample ? make_embedding_adapter(fam)
                                                : make_step_adapter(fam);
}

void save_step_index(const LshIndex<StepFunction>& idx, const HashFamily& fam,
                     const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ValidationError("cannot open '" + path + "' for writing");
  const nlohmann::json header = {{"format", "turnhash-index"},
                                 {"version", kIndexFormatVersion},
                                 {"family", family_to_json(fam)},
                                 {"params", index_params_to_json(idx.params())},
                                 {"items", idx.items().size()}};
  os << header.dump() << '\n';
  for (const StepFunction& f : idx.items()) wire::put_step(os, f);
  wire::put_tables(os, idx.tables());
  if (!os) throw ValidationError("write failed for '" + path + "'");
}

LoadedStepIndex load_step_index(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line))
    throw ValidationError("index file: missing header line");
  const nlohmann::json header = check_header(line, "turnhash-index");

  const HashFamily fam = family_from_json(header.at("family"));
  const IndexParams params = index_params_from_json(header.at("params"));
  const std::size_t n = header.at("items").get<std::size_t>();

  std::vector<StepFunction> items;
  items.reserve(n);
  for (std::size_t i = 0; i < n; ++i) items.push_back(wire::get_step(is));
  auto tables =
      wire::get_tables(is, static_cast<std::size_t>(params.tables_L));
  return {fam, LshIndex<StepFunction>::from_parts(
                   std::move(items), adapter_for(fam), params,
                   std::move(tables))};
}

}  // namespace turnhash
