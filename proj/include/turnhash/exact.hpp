#pragma once

#include "turnhash/stepfn.hpp"
#include "turnhash/turning.hpp"

namespace turnhash {

// An L_p distance together with the alignment realizing it: the distance is
// attained by L_p(slide(extend_2pi(f), u) + alpha, g). For the vertical-only
// distances u is 0.
struct AlignedDistance {
  double distance = 0.0;
  double alpha = 0.0;
  double u = 0.0;
};

// min over alpha of L1(f + alpha, g), computed exactly: alpha is a weighted
// median of the gap values of g - f (ties resolved toward the lower value).
AlignedDistance d1_updown(const StepFunction& f, const StepFunction& g);

// min over alpha of L2(f + alpha, g) = L2(mean_reduce(f), mean_reduce(g));
// alpha = mean(g) - mean(f).
AlignedDistance d2_updown(const StepFunction& f, const StepFunction& g);

// min over slides u and shifts alpha of L_p(slide(extend_2pi(f), u) + alpha, g).
// Some optimal slide aligns a discontinuity (or the domain seam) of one
// function with a discontinuity (or the seam) of the other, so the finite
// candidate set {(d_f - d_g) mod 1} over d_f in disc(f) u {0}, d_g in
// disc(g) u {0} is scanned exhaustively. Ties resolve to the smallest u.
AlignedDistance d_slide(const StepFunction& f, const StepFunction& g, int p);

// d_slide over the polygons' turning functions (edge-midpoint references);
// invariant under translation, rotation, scaling and reference choice.
AlignedDistance polygon_distance(const Polygon& P, const Polygon& Q, int p);

}  // namespace turnhash
