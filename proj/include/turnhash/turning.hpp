#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "turnhash/rng.hpp"
#include "turnhash/stepfn.hpp"

namespace turnhash {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Simple closed polygon. Vertex order is counterclockwise once validated.
struct Polygon {
  std::string id;
  std::vector<Point> vertices;
};

// Tight turning-function range for polygons with at most m vertices, and the
// resulting span bound after min-zero normalization.
struct GonBounds {
  int m = 0;
  double a_m = 0.0;
  double b_m = 0.0;
  double lambda_m = 0.0;
  double span_bound = 0.0;
};

// Checks vertex count, finiteness, edge lengths, collinear triples and
// self-intersection; normalizes orientation to counterclockwise. Throws
// ValidationError with a description of the first problem found.
Polygon validate(Polygon p);

double perimeter(const Polygon& p);

// Arc-length fraction of the midpoint of the edge leaving vertex 0; the
// reference used for dataset normalization.
double first_edge_midpoint_reference(const Polygon& p);

// Cumulative tangent angle of the boundary walked counterclockwise from the
// given reference (a perimeter fraction in [0,1)), as a function of arc-length
// fraction. The initial value is the current edge's heading mapped into
// [0,2pi). A reference in the interior of an edge yields m+1 pieces with
// t(1) = t(0) + 2pi; a reference at a vertex yields m pieces.
StepFunction turning_function(const Polygon& p, double reference);

// f shifted so its minimum is exactly 0.
StepFunction normalize_min_zero(const StepFunction& f);

// m >= 3; a_m = -(floor(m/2)-1)pi, b_m = (floor(m/2)+3)pi, lambda = b - a.
GonBounds gon_bounds(int m);

// A valid m-gon (m even) whose turning function climbs to at least
// (floor(m/2)+3)pi - epsilon: a thin strip wound around a folded fan of
// needle segments, every hairpin turning the same way. The mirrored variant
// descends to -(floor(m/2)-1)pi + epsilon instead. Odd m gets one extra
// near-midpoint vertex on the longest edge.
Polygon make_spiral_polygon(int m, double epsilon, bool mirrored = false);

// Regular m-gon inscribed in the unit circle.
Polygon make_regular_polygon(int m);

// Random star-shaped polygon with exactly m vertices: sorted angles with a
// minimum gap, independent radii. Always simple; retried until validation
// passes. Distinct slots give independent polygons.
Polygon make_random_polygon(int m, const RngStream& s, std::uint64_t slot);

// Jitters every vertex by up to `magnitude` times the polygon diameter,
// retrying until the result validates.
Polygon perturb_polygon(const Polygon& base, const RngStream& s,
                        std::uint64_t slot, double magnitude);

}  // namespace turnhash
