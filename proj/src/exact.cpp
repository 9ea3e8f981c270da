#include "turnhash/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "turnhash/errors.hpp"

namespace turnhash {

namespace {

void require_unit(const StepFunction& f, const StepFunction& g, const char* op) {
  if (f.domain_end != 1.0 || g.domain_end != 1.0)
    throw ValidationError(std::string(op) + ": domain mismatch, operands must live on [0,1]");
}

// (gap value, width) pieces of g - f over the merged partition
std::vector<std::pair<double, double>> gap_pieces(const StepFunction& f,
                                                  const StepFunction& g) {
  std::vector<std::pair<double, double>> out;
  std::size_t i = 0, j = 0;
  double left = 0.0;
  while (i < f.piece_count() && j < g.piece_count()) {
    const double right = std::min(f.breakpoints[i + 1], g.breakpoints[j + 1]);
    out.emplace_back(g.values[j] - f.values[i], right - left);
    if (f.breakpoints[i + 1] <= right) ++i;
    if (g.breakpoints[j + 1] <= right) ++j;
    left = right;
  }
  return out;
}

}  // namespace

AlignedDistance d1_updown(const StepFunction& f, const StepFunction& g) {
  require_unit(f, g, "d1_updown");
  auto pieces = gap_pieces(f, g);
  std::sort(pieces.begin(), pieces.end());
  double total = 0.0;
  for (const auto& [v, w] : pieces) total += w;
  double alpha = pieces.back().first;
  double cum = 0.0;
  for (const auto& [v, w] : pieces) {
    cum += w;
    if (cum >= total / 2.0) {  // lower weighted median
      alpha = v;
      break;
    }
  }
  double acc = 0.0;
  for (const auto& [v, w] : pieces) acc += w * std::abs(v - alpha);
  return {acc, alpha, 0.0};
}

AlignedDistance d2_updown(const StepFunction& f, const StepFunction& g) {
  require_unit(f, g, "d2_updown");
  return {l2_distance(mean_reduce(f), mean_reduce(g)), mean(g) - mean(f), 0.0};
}

AlignedDistance d_slide(const StepFunction& f, const StepFunction& g, int p) {
  require_unit(f, g, "d_slide");
  if (p != 1 && p != 2) throw ParamError("d_slide: p must be 1 or 2");

  std::vector<double> df = discontinuities(f);
  std::vector<double> dg = discontinuities(g);
  df.push_back(0.0);
  dg.push_back(0.0);
  std::vector<double> candidates;
  candidates.reserve(df.size() * dg.size());
  for (double a : df)
    for (double b : dg) {
      double u = a - b;
      if (u < 0.0) u += 1.0;
      candidates.push_back(u);
    }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](double x, double y) { return y - x <= 1e-12; }),
                   candidates.end());

  const StepFunction ext = extend_2pi(f);
  AlignedDistance best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (double u : candidates) {
    const StepFunction slid = slide(ext, u);
    const AlignedDistance d = (p == 1) ? d1_updown(slid, g) : d2_updown(slid, g);
    if (d.distance < best.distance) best = {d.distance, d.alpha, u};
  }
  return best;
}

AlignedDistance polygon_distance(const Polygon& P, const Polygon& Q, int p) {
  const StepFunction tp = turning_function(P, first_edge_midpoint_reference(P));
  const StepFunction tq = turning_function(Q, first_edge_midpoint_reference(Q));
  return d_slide(tp, tq, p);
}

}  // namespace turnhash
