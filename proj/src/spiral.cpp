#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "turnhash/errors.hpp"
#include "turnhash/turning.hpp"

namespace turnhash {

namespace {

constexpr double kPi = std::numbers::pi;

Point rotated(Point p, double ang) {
  const double c = std::cos(ang), s = std::sin(ang);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

// Thin strip around a folded fan of k needle segments with geometrically
// decaying lengths. Every hairpin turns left by pi - gamma, both cap tips are
// sharp left spikes, so the boundary climbs by (k+1)pi minus small deficits
// before descending back. 2k vertices: the two cap tips sit on the path, the
// fold vertices sit slightly off it along the wedge bisector (outer side on
// the way up, inner side on the way down).
std::vector<Point> fan_strip(int k, double gamma) {
  const double nu = 0.35;       // length decay; < 1/2 keeps the layers nested
  const double off_frac = 0.02; // fold-vertex offset as a fraction of the short side

  std::vector<Point> path{{0.0, 0.0}};
  std::vector<double> heading(k), len(k);
  for (int i = 0; i < k; ++i) {
    heading[i] = i * (kPi - gamma);
    len[i] = std::pow(nu, i);
    path.push_back({path[i].x + len[i] * std::cos(heading[i]),
                    path[i].y + len[i] * std::sin(heading[i])});
  }

  std::vector<Point> outer(k + 1), inner(k + 1);
  outer[0] = path[0];
  outer[k] = path[k];
  for (int i = 1; i < k; ++i) {
    const double w = heading[i - 1] + kPi - gamma / 2.0;  // wedge bisector
    const double off = off_frac * len[i];
    outer[i] = {path[i].x - off * std::cos(w), path[i].y - off * std::sin(w)};
    inner[i] = {path[i].x + off * std::cos(w), path[i].y + off * std::sin(w)};
  }

  std::vector<Point> verts;
  verts.push_back(inner[1]);
  for (int i = 0; i <= k; ++i) verts.push_back(outer[i]);
  for (int i = k - 1; i >= 2; --i) verts.push_back(inner[i]);
  return verts;
}

}  // namespace

Polygon make_spiral_polygon(int m, double epsilon, bool mirrored) {
  if (m < 3) throw ParamError("make_spiral_polygon: m must be at least 3");
  if (epsilon < 1e-6)
    throw ParamError("make_spiral_polygon: epsilon below 1e-6 exceeds double-precision headroom");
  const double eps = std::min(epsilon, 0.4);
  const GonBounds gb = gon_bounds(m);

  std::vector<Point> verts;
  std::size_t start = 0;  // index of the vertex whose outgoing edge is the reference
  if (m == 3) {
    // any triangle works: its turning function spans exactly 2pi, so only the
    // anchor heading of the reference edge matters
    for (int i = 0; i < 3; ++i)
      verts.push_back({std::cos(2.0 * kPi * i / 3.0), std::sin(2.0 * kPi * i / 3.0)});
  } else {
    const int k = (m % 2 == 0 ? m : m - 1) / 2;
    const double gamma = eps / (8.0 * m);
    verts = fan_strip(k, gamma);

    if (m % 2 == 1) {
      // extra vertex: barely-off-midpoint bump on the long first up-edge
      const Point a = verts[1], b = verts[2];
      const double ex = b.x - a.x, ey = b.y - a.y;
      const double bump = gamma / 200.0;  // perpendicular offset per unit edge length
      verts.insert(verts.begin() + 2,
                   {0.5 * (a.x + b.x) + bump * ey, 0.5 * (a.y + b.y) - bump * ex});
    }
    if (mirrored) {
      // start the walk on the first down-edge so the full descent precedes
      // the climb back up
      start = static_cast<std::size_t>(k + 1 + (m % 2));
      std::rotate(verts.begin(), verts.begin() + start, verts.end());
    }
  }

  // anchor the reference edge heading: a hair below a full turn for the
  // climbing variant, a hair above zero for the descending one
  const double target = mirrored ? eps / 4.0 : -eps / 4.0;
  const double current = std::atan2(verts[1].y - verts[0].y, verts[1].x - verts[0].x);
  for (Point& v : verts) v = rotated(v, target - current);

  Polygon p;
  p.id = "spiral-" + std::to_string(m) + (mirrored ? "-mirrored" : "");
  p.vertices = std::move(verts);
  p = validate(std::move(p));

  const StepFunction t = turning_function(p, first_edge_midpoint_reference(p));
  const bool ok = mirrored ? t.minimum() <= gb.a_m + epsilon
                           : t.maximum() >= gb.b_m - epsilon;
  if (!ok)
    throw ParamError("make_spiral_polygon: self-check failed for m=" + std::to_string(m));
  return p;
}

}  // namespace turnhash
