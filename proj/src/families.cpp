#include "turnhash/families.hpp"

#include <cmath>
#include <numbers>

#include "turnhash/errors.hpp"
#include "turnhash/rng.hpp"

namespace turnhash {

namespace {

std::int64_t sign_of(double v) { return (v > 0.0) - (v < 0.0); }

// Smallest sample index i with i/n >= x, under the exact double comparison
// sample_vec uses. The rounded first guess is off by at most one ulp-step,
// fixed up by the probe loops.
int first_sample_at_or_above(double x, int n) {
  int i = static_cast<int>(std::llround(std::ceil(x * n - 0.5)));
  if (i < 0) i = 0;
  if (i > n) i = n;
  while (i > 0 && !(static_cast<double>(i - 1) / n < x)) --i;
  while (i < n && static_cast<double>(i) / n < x) ++i;
  return i;
}

}  // namespace

long long guarded_ceil(double x) {
  return static_cast<long long>(std::ceil(x - 1e-9));
}

// ---- Single-point family ----------------------------------------------------

HashFamily random_point_family(double a, double b, std::uint64_t seed,
                               double r, double c) {
  if (!(a < b)) throw ParamError("random_point_family: requires a < b");
  HashFamily fam;
  fam.kind = FamilyKind::RandomPoint;
  fam.a = a;
  fam.b = b;
  fam.rng_seed = seed;
  if (r > 0.0) {
    if (!(c > 1.0)) throw ParamError("random_point_family: requires c > 1");
    if (!(c * r < b - a))
      throw ParamError("random_point_family: cr must stay below b - a");
    fam.r = r;
    fam.c = c;
    fam.p1 = h1_collision_prob(r, a, b);
    fam.p2 = h1_collision_prob(c * r, a, b);
  }
  return fam;
}

PointDraw h1_draw(const HashFamily& fam, std::uint64_t i) {
  RngStream st(fam.rng_seed);
  return {st.u01(2 * i), st.uniform(2 * i + 1, fam.a, fam.b)};
}

HashValue h1_apply(const PointDraw& d, const StepFunction& f) {
  return {sign_of(f.evaluate(d.x) - d.y), 0};
}

double h1_collision_prob(double d, double a, double b) {
  return 1.0 - d / (b - a);
}

HashFamily mean_reduce_family(double a, double b, double r, double c,
                              std::uint64_t seed) {
  if (!(a < b)) throw ParamError("mean_reduce_family: requires a < b");
  const double width = b - a;
  if (!(r > 0.0 && r < width))
    throw ParamError("mean_reduce_family: requires 0 < r < b - a");
  if (!(c > 2.0 - r / width))
    throw ParamError("mean_reduce_family: requires c > 2 - r/(b - a)");
  HashFamily fam;
  fam.kind = FamilyKind::MeanReduce;
  fam.a = a - b;
  fam.b = b - a;
  fam.r = r;
  fam.c = c;
  fam.rng_seed = seed;
  fam.p1 = 1.0 - (2.0 - r / width) * r / (2.0 * width);
  fam.p2 = 1.0 - c * r / (2.0 * width);
  if (fam.p2 < 1e-12) fam.p2 = 1e-12;  // cr beyond the reduced diameter
  if (!(fam.p1 > fam.p2))
    throw ParamError("mean_reduce_family: no probability gap at (r, c)");
  return fam;
}

StepFunction prepared(const HashFamily& fam, const StepFunction& f) {
  return fam.kind == FamilyKind::MeanReduce ? mean_reduce(f) : f;
}

// ---- Asymmetric two-point family ---------------------------------------------

HashFamily asymmetric_two_point_family(double a, double b, double r, double c,
                                       std::uint64_t seed) {
  if (!(a < b)) throw ParamError("asymmetric_two_point_family: requires a < b");
  if (!(r > 0.0 && c > 1.0))
    throw ParamError("asymmetric_two_point_family: requires r > 0 and c > 1");
  if (!(c * r < b - a))
    throw ParamError("asymmetric_two_point_family: cr must stay below b - a");
  HashFamily fam;
  fam.kind = FamilyKind::AsymmetricTwoPoint;
  fam.a = a;
  fam.b = b;
  fam.r = r;
  fam.c = c;
  fam.rng_seed = seed;
  fam.p1 = h2_collision_prob(r, a, b);
  fam.p2 = h2_collision_prob(c * r, a, b);
  if (!(fam.p1 > fam.p2))
    throw ParamError("asymmetric_two_point_family: no probability gap");
  return fam;
}

TwoPointDraw h2_draw(const HashFamily& fam, std::uint64_t i) {
  RngStream st(fam.rng_seed);
  TwoPointDraw d;
  d.x = st.u01(4 * i);
  d.y1 = st.uniform(4 * i + 1, fam.a, fam.b);
  d.y2 = st.uniform(4 * i + 2, fam.a, fam.b);
  d.use_second = (st.bits(4 * i + 3) & 1u) != 0;
  return d;
}

HashValue h2_data_hash(const TwoPointDraw& d, const StepFunction& f) {
  const double fx = f.evaluate(d.x);
  return {sign_of(fx - d.y1),
          d.use_second ? sign_of(fx - d.y2) : kStarSymbol};
}

HashValue h2_query_hash(const TwoPointDraw& d, const StepFunction& g) {
  const double gx = g.evaluate(d.x);
  // Second symbols collide exactly when y2 lies strictly between the two
  // function values, hence the flipped sign on the query side.
  return {sign_of(gx - d.y1),
          d.use_second ? -sign_of(gx - d.y2) : kStarSymbol};
}

double h2_collision_prob(double d, double a, double b) {
  const double q = (d * d) / ((b - a) * (b - a));
  const double p = 0.5 * (1.0 - q);
  return p > 0.0 ? p : 0.0;
}

// ---- Discrete-sample embedding and Euclidean family -------------------------

long long riemann_n(double r, double c, int k, double a, double b) {
  if (!(r > 0.0 && c > 1.0 && k >= 1))
    throw ParamError("riemann_n: requires r > 0, c > 1, k >= 1");
  const double w = b - a;
  return guarded_ceil(2.0 * k * w * w / ((std::sqrt(c) - 1.0) * r * r));
}

std::vector<double> discrete_sample_embed(const StepFunction& f, int n) {
  return sample_vec(f, n);
}

double embedded_l2(const StepFunction& f, const StepFunction& g, int n) {
  if (n < 1) throw ParamError("embedded_l2: requires n >= 1");
  double sq = 0.0;
  std::size_t i = 0, j = 0;
  double lo = 0.0;
  int start = 0;
  while (lo < 1.0) {
    const double fb = i + 1 < f.piece_count() ? f.breakpoints[i + 1] : 1.0;
    const double gb = j + 1 < g.piece_count() ? g.breakpoints[j + 1] : 1.0;
    const double hi = fb < gb ? fb : gb;
    const int end = first_sample_at_or_above(hi, n);
    const double diff = f.values[i] - g.values[j];
    sq += diff * diff * (end - start);
    start = end;
    if (fb <= hi) ++i;
    if (gb <= hi) ++j;
    lo = hi;
  }
  return std::sqrt(sq / n);
}

TunedParams discrete_sample_params(double r, double c) {
  if (!(r > 0.0 && c > 1.0))
    throw ParamError("discrete_sample_params: requires r > 0 and c > 1");
  return {std::pow(c, 0.25) * r, std::sqrt(c)};
}

double pstable_collision_prob(double d, double width) {
  if (d <= 0.0) return 1.0;
  const double s = width / d;
  return std::erf(s / std::numbers::sqrt2) -
         std::sqrt(2.0 / std::numbers::pi) * (1.0 / s) *
             (1.0 - std::exp(-0.5 * s * s));
}

HashFamily euclidean_lsh_family(int dimension, double r_prime, double c_prime,
                                std::uint64_t seed, double width) {
  if (!(dimension >= 1 && r_prime > 0.0 && c_prime > 1.0))
    throw ParamError("euclidean_lsh_family: requires dim >= 1, r' > 0, c' > 1");
  HashFamily fam;
  fam.kind = FamilyKind::DiscreteSample;
  fam.a = 0.0;
  fam.b = 1.0;
  fam.r = r_prime;
  fam.c = c_prime;
  fam.rng_seed = seed;
  fam.dimension = dimension;
  fam.width = width > 0.0 ? width : 4.0 * r_prime;
  fam.p1 = pstable_collision_prob(r_prime, fam.width);
  fam.p2 = pstable_collision_prob(c_prime * r_prime, fam.width);
  return fam;
}

namespace {

std::int64_t projection_bucket(double proj, double offset, double width) {
  return static_cast<std::int64_t>(std::floor((proj + offset) / width));
}

}  // namespace

HashValue euclidean_apply(const HashFamily& fam, std::uint64_t i,
                          const std::vector<double>& v) {
  if (static_cast<int>(v.size()) != fam.dimension)
    throw ParamError("euclidean_apply: vector length mismatch");
  RngStream gauss(fam.rng_seed, 0);
  RngStream offs(fam.rng_seed, 1);
  const std::uint64_t base = i * static_cast<std::uint64_t>(fam.dimension);
  double proj = 0.0;
  for (int t = 0; t < fam.dimension; ++t)
    proj += v[static_cast<std::size_t>(t)] * gauss.gaussian(base + t);
  return {projection_bucket(proj, offs.uniform(i, 0.0, fam.width), fam.width), 0};
}

ProjectionTable::ProjectionTable(const HashFamily& fam) : fam_(fam) {
  if (fam.kind != FamilyKind::DiscreteSample || fam.dimension < 1)
    throw ParamError("ProjectionTable: needs a DiscreteSample family");
  prefix_.assign(static_cast<std::size_t>(fam.dimension) + 1, 0.0);
}

void ProjectionTable::set_draw(std::uint64_t i) {
  RngStream gauss(fam_.rng_seed, 0);
  RngStream offs(fam_.rng_seed, 1);
  const std::uint64_t base = i * static_cast<std::uint64_t>(fam_.dimension);
  double acc = 0.0;
  prefix_[0] = 0.0;
  for (int t = 0; t < fam_.dimension; ++t) {
    acc += gauss.gaussian(base + t);
    prefix_[static_cast<std::size_t>(t) + 1] = acc;
  }
  offset_ = offs.uniform(i, 0.0, fam_.width);
}

HashValue ProjectionTable::apply(const StepFunction& f) const {
  const int n = fam_.dimension;
  const double root = std::sqrt(static_cast<double>(n));
  double proj = 0.0;
  int start = 0;
  for (std::size_t p = 0; p < f.piece_count(); ++p) {
    const double hi = p + 1 < f.piece_count() ? f.breakpoints[p + 1] : 1.0;
    const int end = first_sample_at_or_above(hi, n);
    proj += (f.values[p] / root) *
            (prefix_[static_cast<std::size_t>(end)] -
             prefix_[static_cast<std::size_t>(start)]);
    start = end;
  }
  return {projection_bucket(proj, offset_, fam_.width), 0};
}

}  // namespace turnhash
