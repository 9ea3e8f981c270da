#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "turnhash/exact.hpp"
#include "turnhash/index.hpp"
#include "turnhash/turning.hpp"

namespace turnhash {

// Near-neighbor retrieval of polygons under the turning-function distances.
// Every polygon is reduced to a set of clone step functions chosen so that
// for some data-clone/query-clone pair the plain vertical distance equals the
// full slide-and-shift distance; the clones go into a generic hash index and
// every candidate is confirmed against the exact polygon distance before it
// can be returned.

// Slide alignments: one clone per discontinuity (shifted to sit at x = 0)
// plus the unslid function.
struct SlideClone {
  StepFunction fn;
  double u = 0.0;
};

std::vector<SlideClone> clone_slides(const StepFunction& f);

// Vertical alignments: f - v for each distinct step value v, so each clone
// has a step sitting exactly at y = 0.
std::vector<StepFunction> clone_vertical(const StepFunction& f);

// How the p = 1 structure aligns vertically: MeanReduce hashes mean-reduced
// clones and needs c > 2 - r/omega; StepShift multiplies the clone set
// instead and works for any c > 1. p = 2 always mean-reduces (exact there).
enum class IndexVariant { MeanReduce, StepShift };

struct PolygonIndexConfig {
  int m = 3;       // max vertex count of stored and query polygons
  int p = 1;       // which L_p the distances use (1 or 2)
  double r = 0.0;  // target distance
  double c = 1.0;  // approximation factor; hits are within c * r
  IndexVariant variant = IndexVariant::MeanReduce;
  double delta = 0.1;  // per-query miss probability
  std::uint64_t seed = 0;
};

struct PolygonHit {
  std::string id;
  double distance = 0.0;  // exact polygon distance, always <= c * r
};

struct PolygonQueryResult {
  std::optional<PolygonHit> hit;
  std::size_t candidates_scanned = 0;
};

class PolygonIndex {
 public:
  PolygonIndex(std::vector<Polygon> polygons, const PolygonIndexConfig& cfg);

  PolygonQueryResult query(const Polygon& q) const;
  std::vector<PolygonQueryResult> query_batch(
      const std::vector<Polygon>& qs) const;

  const PolygonIndexConfig& config() const { return config_; }
  const GonBounds& bounds() const { return bounds_; }
  const HashFamily& family() const { return family_; }
  const std::vector<Polygon>& polygons() const { return polygons_; }
  const LshIndex<StepFunction>& inner() const { return *inner_; }
  // Which polygon each inner item was cloned from.
  const std::vector<std::uint32_t>& owners() const { return owner_; }

  void save(const std::string& path) const;
  static PolygonIndex load(const std::string& path);

 private:
  PolygonIndex() = default;

  void init_family();
  std::vector<StepFunction> clone_items(const Polygon& poly) const;
  FamilyAdapter<StepFunction> adapter() const;
  double inner_delta() const;

  PolygonIndexConfig config_;
  GonBounds bounds_;
  HashFamily family_;
  std::vector<Polygon> polygons_;
  std::vector<std::uint32_t> owner_;
  std::optional<LshIndex<StepFunction>> inner_;
};

}  // namespace turnhash
