#include "turnhash/turning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "turnhash/errors.hpp"

namespace turnhash {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double dist(Point a, Point b) { return std::hypot(b.x - a.x, b.y - a.y); }

// inclusive segment intersection test with a relative tolerance
bool segments_touch(Point a, Point b, Point c, Point d) {
  const double scale = dist(a, b) * (dist(a, c) + dist(a, d)) + 1e-300;
  const double eps = 1e-12 * scale;
  auto sgn = [eps](double v) { return v > eps ? 1 : (v < -eps ? -1 : 0); };
  const int d1 = sgn(cross(c, d, a)), d2 = sgn(cross(c, d, b));
  const int d3 = sgn(cross(a, b, c)), d4 = sgn(cross(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  auto within = [](Point p, Point q, Point r) {  // r inside bbox of pq
    return std::min(p.x, q.x) - 1e-12 <= r.x && r.x <= std::max(p.x, q.x) + 1e-12 &&
           std::min(p.y, q.y) - 1e-12 <= r.y && r.y <= std::max(p.y, q.y) + 1e-12;
  };
  if (d1 == 0 && within(c, d, a)) return true;
  if (d2 == 0 && within(c, d, b)) return true;
  if (d3 == 0 && within(a, b, c)) return true;
  if (d4 == 0 && within(a, b, d)) return true;
  return false;
}

double signed_area(const std::vector<Point>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % v.size()];
    acc += a.x * b.y - a.y * b.x;
  }
  return 0.5 * acc;
}

// signed turn between consecutive edge headings, in (-pi, pi)
double wrap_pm_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a > kPi) a -= kTwoPi;
  if (a <= -kPi) a += kTwoPi;
  return a;
}

}  // namespace

Polygon validate(Polygon p) {
  const std::size_t m = p.vertices.size();
  if (m < 3) throw ValidationError("polygon '" + p.id + "': fewer than 3 vertices");
  double scale = 0.0;
  for (const Point& v : p.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw ValidationError("polygon '" + p.id + "': non-finite coordinate");
    scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  }
  for (std::size_t i = 0; i < m; ++i)
    if (dist(p.vertices[i], p.vertices[(i + 1) % m]) <= 1e-12 * std::max(scale, 1.0))
      throw ValidationError("polygon '" + p.id + "': zero-length edge");

  const double area = signed_area(p.vertices);
  if (std::abs(area) <= 1e-15 * std::max(scale * scale, 1.0))
    throw ValidationError("polygon '" + p.id + "': degenerate (zero area)");
  if (area < 0) std::reverse(p.vertices.begin() + 1, p.vertices.end());

  for (std::size_t j = 0; j < m; ++j) {
    const Point& a = p.vertices[(j + m - 1) % m];
    const Point& b = p.vertices[j];
    const Point& c = p.vertices[(j + 1) % m];
    if (std::abs(cross(a, b, c)) <= 1e-11 * dist(a, b) * dist(b, c))
      throw ValidationError("polygon '" + p.id + "': three consecutive vertices collinear");
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      if (j == i + 1 || (i == 0 && j == m - 1)) continue;  // adjacent edges share a vertex
      if (segments_touch(p.vertices[i], p.vertices[(i + 1) % m], p.vertices[j],
                         p.vertices[(j + 1) % m]))
        throw ValidationError("polygon '" + p.id + "': self-intersecting boundary");
    }
  }
  return p;
}

double perimeter(const Polygon& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.vertices.size(); ++i)
    acc += dist(p.vertices[i], p.vertices[(i + 1) % p.vertices.size()]);
  return acc;
}

double first_edge_midpoint_reference(const Polygon& p) {
  return 0.5 * dist(p.vertices[0], p.vertices[1]) / perimeter(p);
}

StepFunction turning_function(const Polygon& p, double reference) {
  if (!(reference >= 0.0 && reference < 1.0))
    throw ValidationError("turning_function: reference must lie in [0,1)");
  const std::size_t m = p.vertices.size();

  std::vector<double> heading(m), frac(m + 1, 0.0);
  const double total = perimeter(p);
  for (std::size_t i = 0; i < m; ++i) {
    const Point& a = p.vertices[i];
    const Point& b = p.vertices[(i + 1) % m];
    heading[i] = std::atan2(b.y - a.y, b.x - a.x);
    frac[i + 1] = frac[i] + dist(a, b) / total;
  }
  frac[m] = 1.0;

  // edge containing the reference; a reference within 1e-12 of a cumulative
  // vertex position counts as a vertex reference
  std::size_t e = 0;
  bool at_vertex = false;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(reference - frac[i]) <= 1e-12) {
      e = i;
      at_vertex = true;
      break;
    }
    if (reference > frac[i] && reference < frac[i + 1]) e = i;
  }

  double t0 = std::fmod(heading[e], kTwoPi);
  if (t0 < 0) t0 += kTwoPi;

  std::vector<double> breaks{0.0}, vals{t0};
  double cur = t0;
  const std::size_t crossings = at_vertex ? m - 1 : m;
  for (std::size_t step = 1; step <= crossings; ++step) {
    const std::size_t j = (e + step) % m;
    double pos = frac[j] - reference;
    if (pos <= 0.0) pos += 1.0;
    cur += wrap_pm_pi(heading[j] - heading[(j + m - 1) % m]);
    breaks.push_back(pos);
    vals.push_back(cur);
  }
  breaks.push_back(1.0);

  if (!at_vertex) {
    // closed walk: the turns sum to exactly one counterclockwise revolution
    if (std::abs(vals.back() - (t0 + kTwoPi)) > 1e-6)
      throw ValidationError("turning_function: turn angles do not close up");
    vals.back() = t0 + kTwoPi;
  }
  return make_step(breaks, vals);
}

StepFunction normalize_min_zero(const StepFunction& f) {
  return add_scalar(f, -f.minimum());
}

GonBounds gon_bounds(int m) {
  if (m < 3) throw ParamError("gon_bounds: m must be at least 3");
  GonBounds gb;
  gb.m = m;
  const double half = static_cast<double>(m / 2);
  gb.a_m = -(half - 1.0) * kPi;
  gb.b_m = (half + 3.0) * kPi;
  gb.lambda_m = gb.b_m - gb.a_m;
  gb.span_bound = gb.lambda_m / 2.0;
  return gb;
}

Polygon make_regular_polygon(int m) {
  Polygon p;
  p.id = "regular-" + std::to_string(m);
  for (int i = 0; i < m; ++i) {
    const double a = kTwoPi * i / m;
    p.vertices.push_back({std::cos(a), std::sin(a)});
  }
  return validate(std::move(p));
}

Polygon make_random_polygon(int m, const RngStream& s, std::uint64_t slot) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 1000)
      throw ValidationError("make_random_polygon: rejection sampling stuck");
    const std::uint64_t base = slot * 4096 + attempt * 128;
    std::vector<double> angles(m);
    for (int i = 0; i < m; ++i) angles[i] = s.uniform(base + i, 0.0, kTwoPi);
    std::sort(angles.begin(), angles.end());
    bool spaced = true;
    for (int i = 0; i < m; ++i) {
      const double gap = (i + 1 < m) ? angles[i + 1] - angles[i]
                                     : angles[0] + kTwoPi - angles[m - 1];
      if (gap < 1e-2) spaced = false;
    }
    if (!spaced) continue;
    Polygon p;
    p.id = "random-" + std::to_string(m) + "-" + std::to_string(slot);
    for (int i = 0; i < m; ++i) {
      const double r = s.uniform(base + 64 + i, 0.4, 1.6);
      p.vertices.push_back({r * std::cos(angles[i]), r * std::sin(angles[i])});
    }
    try {
      return validate(std::move(p));
    } catch (const ValidationError&) {
      continue;  // collinear triple; star-shaped construction rules out crossings
    }
  }
}

Polygon perturb_polygon(const Polygon& base, const RngStream& s,
                        std::uint64_t slot, double magnitude) {
  double diam = 0.0;
  for (const Point& a : base.vertices)
    for (const Point& b : base.vertices) diam = std::max(diam, dist(a, b));
  for (std::uint64_t attempt = 0;; ++attempt) {
    if (attempt == 1000)
      throw ValidationError("perturb_polygon: rejection sampling stuck");
    const std::uint64_t base_idx = slot * 4096 + attempt * 128;
    Polygon q;
    q.id = base.id + "-perturbed";
    for (std::size_t i = 0; i < base.vertices.size(); ++i) {
      const double ang = s.uniform(base_idx + 2 * i, 0.0, kTwoPi);
      const double rad = s.u01(base_idx + 2 * i + 1) * magnitude * diam;
      q.vertices.push_back({base.vertices[i].x + rad * std::cos(ang),
                            base.vertices[i].y + rad * std::sin(ang)});
    }
    try {
      return validate(std::move(q));
    } catch (const ValidationError&) {
      continue;
    }
  }
}

}  // namespace turnhash
