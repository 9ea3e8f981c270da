#include "turnhash/stepfn.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "turnhash/errors.hpp"

namespace turnhash {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

// Builds a canonical function from raw pieces: absorbs pieces narrower than
// kBreakEps into their neighbour and merges adjacent near-equal values.
StepFunction canonicalize(const std::vector<double>& breaks,
                          const std::vector<double>& vals) {
  const std::size_t n = vals.size();
  StepFunction out;
  out.domain_end = breaks.back();
  out.breakpoints.push_back(breaks.front());
  for (std::size_t i = 0; i < n; ++i) {
    const double right = breaks[i + 1];
    if (i + 1 < n && right - breaks[i] <= kBreakEps) continue;  // absorbed by next piece
    if (i + 1 == n && right - breaks[i] <= kBreakEps && !out.values.empty()) {
      out.breakpoints.back() = right;  // trailing sliver: extend previous piece
      continue;
    }
    if (!out.values.empty() && std::abs(vals[i] - out.values.back()) <= kValueMergeEps) {
      out.breakpoints.back() = right;
    } else {
      out.breakpoints.push_back(right);
      out.values.push_back(vals[i]);
    }
  }
  return out;
}

// Calls fn(width, fv, gv) over each cell of the merged partition of f and g.
template <class Fn>
void for_merged(const StepFunction& f, const StepFunction& g, Fn&& fn) {
  std::size_t i = 0, j = 0;
  double left = 0.0;
  while (i < f.piece_count() && j < g.piece_count()) {
    const double right = std::min(f.breakpoints[i + 1], g.breakpoints[j + 1]);
    fn(right - left, f.values[i], g.values[j]);
    if (f.breakpoints[i + 1] <= right) ++i;
    if (g.breakpoints[j + 1] <= right) ++j;
    left = right;
  }
}

void require_unit_domain(const StepFunction& f, const StepFunction& g,
                         const char* op) {
  if (f.domain_end != 1.0 || g.domain_end != 1.0)
    throw ValidationError(std::string(op) + ": domain mismatch, both operands must live on [0,1]");
}

}  // namespace

double StepFunction::evaluate(double x) const {
  if (!(x >= 0.0 && x <= domain_end))
    throw ValidationError("evaluate: point outside [0, domain_end]");
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  if (it == breakpoints.end()) return values.back();  // x == domain_end
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

double StepFunction::minimum() const {
  return *std::min_element(values.begin(), values.end());
}

double StepFunction::maximum() const {
  return *std::max_element(values.begin(), values.end());
}

StepFunction make_step(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.empty() || breakpoints.size() < 2)
    throw ValidationError("make_step: empty input");
  if (breakpoints.size() != values.size() + 1)
    throw ValidationError("make_step: breakpoint/value length mismatch");
  if (breakpoints.front() != 0.0)
    throw ValidationError("make_step: first breakpoint must be 0");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (!(breakpoints[i] < breakpoints[i + 1]))
      throw ValidationError("make_step: breakpoints must be strictly increasing");
  for (double v : values)
    if (!std::isfinite(v)) throw ValidationError("make_step: non-finite value");
  return canonicalize(breakpoints, values);
}

StepFunction add_scalar(const StepFunction& f, double c) {
  StepFunction out = f;
  for (double& v : out.values) v += c;
  return out;
}

double mean(const StepFunction& f) {
  if (f.domain_end != 1.0)
    throw ValidationError("mean: function must live on [0,1]");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i)
    acc += f.values[i] * (f.breakpoints[i + 1] - f.breakpoints[i]);
  return acc;
}

StepFunction mean_reduce(const StepFunction& f) {
  return add_scalar(f, -mean(f));
}

double l1_distance(const StepFunction& f, const StepFunction& g) {
  require_unit_domain(f, g, "l1_distance");
  double acc = 0.0;
  for_merged(f, g, [&](double w, double fv, double gv) { acc += w * std::abs(fv - gv); });
  return acc;
}

double l2_distance(const StepFunction& f, const StepFunction& g) {
  require_unit_domain(f, g, "l2_distance");
  double acc = 0.0;
  for_merged(f, g, [&](double w, double fv, double gv) {
    acc += w * (fv - gv) * (fv - gv);
  });
  return std::sqrt(acc);
}

StepFunction extend_2pi(const StepFunction& f) {
  if (f.domain_end != 1.0)
    throw ValidationError("extend_2pi: function must live on [0,1]");
  std::vector<double> breaks = f.breakpoints;
  std::vector<double> vals = f.values;
  for (std::size_t i = 1; i < f.breakpoints.size(); ++i)
    breaks.push_back(f.breakpoints[i] + 1.0);
  for (double v : f.values) vals.push_back(v + kTwoPi);
  return canonicalize(breaks, vals);
}

StepFunction slide(const StepFunction& f2, double u) {
  if (f2.domain_end != 2.0)
    throw ValidationError("slide: operand must be a 2pi-extension on [0,2]");
  if (!(u >= 0.0 && u <= 1.0))
    throw ValidationError("slide: shift must lie in [0,1]");
  std::vector<double> breaks{0.0};
  std::vector<double> vals;
  const std::size_t n = f2.piece_count();
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = f2.breakpoints[i], hi = f2.breakpoints[i + 1];
    if (hi <= u || lo >= u + 1.0) continue;  // piece outside the window
    vals.push_back(f2.values[i]);
    breaks.push_back(std::min(hi, u + 1.0) - u);
  }
  breaks.back() = 1.0;  // guard against rounding in hi - u
  return canonicalize(breaks, vals);
}

std::vector<double> sample_vec(const StepFunction& f, int n) {
  if (f.domain_end != 1.0)
    throw ValidationError("sample_vec: function must live on [0,1]");
  if (n <= 0) throw ValidationError("sample_vec: sample count must be positive");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::size_t piece = 0;
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n);
    while (piece + 1 < f.piece_count() && f.breakpoints[piece + 1] <= x) ++piece;
    out[static_cast<std::size_t>(i)] = f.values[piece] * scale;
  }
  return out;
}

std::vector<double> discontinuities(const StepFunction& f) {
  return {f.breakpoints.begin() + 1, f.breakpoints.end() - 1};
}

}  // namespace turnhash
