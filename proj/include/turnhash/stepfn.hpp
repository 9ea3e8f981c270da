#pragma once

#include <cstddef>
#include <vector>

namespace turnhash {

// Breakpoints closer than this are merged when canonicalizing results of
// slide/extend arithmetic; the sliver piece is absorbed by its neighbour.
inline constexpr double kBreakEps = 1e-9;

// Adjacent pieces whose values differ by at most this are merged.
inline constexpr double kValueMergeEps = 1e-12;

// Piecewise-constant function on [0, domain_end]. Piece i covers the
// right-open interval [breakpoints[i], breakpoints[i+1]) and has value
// values[i]; the final domain point takes the last piece's value. Instances
// are kept canonical: breakpoints strictly increasing starting at 0, and no
// two adjacent pieces share a value.
//
// domain_end is 1 for ordinary functions and 2 for 2pi-extensions.
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double domain_end = 1.0;

  std::size_t piece_count() const { return values.size(); }

  double evaluate(double x) const;
  double minimum() const;
  double maximum() const;
  double span() const { return maximum() - minimum(); }

  bool operator==(const StepFunction&) const = default;
};

// Validates and canonicalizes (merges adjacent equal values, absorbs sliver
// pieces). Throws ValidationError on empty input, length mismatch, first
// breakpoint != 0 or non-increasing breakpoints.
StepFunction make_step(std::vector<double> breakpoints, std::vector<double> values);

// f + c pointwise.
StepFunction add_scalar(const StepFunction& f, double c);

// Exact integral of f; requires domain [0,1], where integral and mean agree.
double mean(const StepFunction& f);

// f minus its mean; the result integrates to zero.
StepFunction mean_reduce(const StepFunction& f);

// Exact L1 / L2 distances between two functions on [0,1], computed piecewise
// over the merged breakpoint partition.
double l1_distance(const StepFunction& f, const StepFunction& g);
double l2_distance(const StepFunction& f, const StepFunction& g);

// Periodic-ish extension to [0,2]: the second half repeats the first raised
// by 2pi.
StepFunction extend_2pi(const StepFunction& f);

// Window [u, u+1] of an extended function, shifted back to [0,1]:
// slide(f2, u)(x) = f2(x + u). Requires f2 on [0,2] and u in [0,1].
StepFunction slide(const StepFunction& f2, double u);

// Length-n vector with entry i = f(i/n)/sqrt(n); squared distances between
// such vectors are left Riemann sums of (f-g)^2.
std::vector<double> sample_vec(const StepFunction& f, int n);

// Interior breakpoints, i.e. the discontinuity points of a canonical function.
std::vector<double> discontinuities(const StepFunction& f);

}  // namespace turnhash
