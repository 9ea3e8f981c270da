#pragma once

#include <cstdint>
#include <vector>

#include "turnhash/stepfn.hpp"

namespace turnhash {

// Locality-sensitive hash families over step functions and over their sampled
// vector embeddings. A family is an unbounded stream of hash functions; draw i
// is a pure function of (rng_seed, i), so hashing is repeatable and safe to
// evaluate concurrently.

enum class FamilyKind { RandomPoint, MeanReduce, AsymmetricTwoPoint, DiscreteSample };

// Symbol emitted in place of the unused second sample of a two-point draw;
// distinct from the sign values {-1, 0, 1}.
inline constexpr std::int64_t kStarSymbol = 2;

struct HashValue {
  std::int64_t s0 = 0;
  std::int64_t s1 = 0;
  bool operator==(const HashValue&) const = default;
};

struct HashFamily {
  FamilyKind kind = FamilyKind::RandomPoint;
  // Value range the point draws sample from. For MeanReduce this is already
  // the reduced range (a-b, b-a) of the original [a, b].
  double a = 0.0;
  double b = 1.0;
  // Design distances the declared (p1, p2) refer to; 0 when not declared.
  double r = 0.0;
  double c = 0.0;
  std::uint64_t rng_seed = 0;
  double p1 = 0.0;
  double p2 = 0.0;
  int dimension = 0;   // DiscreteSample: embedding length
  double width = 0.0;  // DiscreteSample: projection bucket width
};

// Integer ceiling with a 1e-9 slack so a value sitting one rounding error
// above an exact integer is not bumped to the next one.
long long guarded_ceil(double x);

// ---- Single-point family (p = 1) ------------------------------------------

struct PointDraw {
  double x = 0.0;
  double y = 0.0;
};

// Family whose hash compares f against a random point: +1 above, -1 below,
// 0 on the graph. Pass (r, c) to declare (p1, p2) = collision probabilities
// at L1 distances r and cr; requires cr < b - a so that p2 > 0.
HashFamily random_point_family(double a, double b, std::uint64_t seed,
                               double r = 0.0, double c = 0.0);

PointDraw h1_draw(const HashFamily& fam, std::uint64_t i);
HashValue h1_apply(const PointDraw& d, const StepFunction& f);

// Collision probability of a single-point draw at L1 distance d: 1 - d/(b-a).
double h1_collision_prob(double d, double a, double b);

// Same point hash applied to mean_reduce(f); the point range is the reduced
// (a-b, b-a). Declares p1 = 1 - (2 - r/(b-a)) r / (2(b-a)) and
// p2 = 1 - c r / (2(b-a)) for the vertical-alignment distance at (r, c);
// requires 0 < r < b-a and c > 2 - r/(b-a), else ParamError (callers fall
// back to the step-shift construction).
HashFamily mean_reduce_family(double a, double b, double r, double c,
                              std::uint64_t seed);

// The function a family actually hashes: mean_reduce(f) for MeanReduce,
// f itself otherwise.
StepFunction prepared(const HashFamily& fam, const StepFunction& f);

// ---- Asymmetric two-point family (p = 2) -----------------------------------

struct TwoPointDraw {
  double x = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
  bool use_second = false;
};

// Data/query hash pair: the first symbol compares against (x, y1) on both
// sides; the second symbol is STAR when unused, and otherwise the two sides
// collide exactly when y2 lies strictly between f(x) and g(x).
// Collision law: 0.5 (1 - L2(f,g)^2/(b-a)^2). Declares p1, p2 from that law
// at distances r and cr; requires cr < b - a so that p2 > 0.
HashFamily asymmetric_two_point_family(double a, double b, double r, double c,
                                       std::uint64_t seed);

TwoPointDraw h2_draw(const HashFamily& fam, std::uint64_t i);
HashValue h2_data_hash(const TwoPointDraw& d, const StepFunction& f);
HashValue h2_query_hash(const TwoPointDraw& d, const StepFunction& g);

// Collision probability of the data/query pair at L2 distance d.
double h2_collision_prob(double d, double a, double b);

// ---- Discrete-sample embedding and Euclidean family (p = 2) ----------------

// Sample count for which the Riemann embedding of k-step functions with
// values in [a, b] preserves squared L2 within (sqrt(c)-1) r^2:
// ceil(2 k (b-a)^2 / ((sqrt(c)-1) r^2)).
long long riemann_n(double r, double c, int k, double a, double b);

// vec_n(f): values at i/n scaled by 1/sqrt(n) (same as sample_vec).
std::vector<double> discrete_sample_embed(const StepFunction& f, int n);

// Exact Euclidean distance ||vec_n(f) - vec_n(g)|| computed piecewise in
// O(pieces) without materializing the vectors.
double embedded_l2(const StepFunction& f, const StepFunction& g, int n);

struct TunedParams {
  double r_prime = 0.0;
  double c_prime = 0.0;
};

// Parameters the embedded Euclidean problem is solved at: r' = c^(1/4) r,
// c' = sqrt(c). Near pairs embed within r', far pairs beyond c'r'.
TunedParams discrete_sample_params(double r, double c);

// Collision probability of a p-stable projection hash with bucket `width`
// between vectors at Euclidean distance d.
double pstable_collision_prob(double d, double width);

// Projection family over real vectors: hash = floor((<v, w> + offset)/width)
// with w standard normal and offset uniform on [0, width). Default width is
// 4 r'. Declares p1, p2 at distances r' and c'r'.
HashFamily euclidean_lsh_family(int dimension, double r_prime, double c_prime,
                                std::uint64_t seed, double width = 0.0);

HashValue euclidean_apply(const HashFamily& fam, std::uint64_t i,
                          const std::vector<double>& v);

// Projection of vec_n(f) against draw i, computed in O(pieces) from prefix
// sums of the Gaussian coordinates. Filling the prefix table costs
// O(dimension); sweep draw-major and reuse it across many functions.
class ProjectionTable {
 public:
  explicit ProjectionTable(const HashFamily& fam);
  void set_draw(std::uint64_t i);
  HashValue apply(const StepFunction& f) const;

 private:
  HashFamily fam_;
  std::vector<double> prefix_;
  double offset_ = 0.0;
};

}  // namespace turnhash
