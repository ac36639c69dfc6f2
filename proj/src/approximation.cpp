#include "modularis/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "modularis/errors.hpp"

namespace modularis {

namespace {

bool zero_vector(const std::vector<double>& v) {
  for (double c : v)
    if (c != 0.0) return false;
  return true;
}

double worst_move(const FNormSpec& norm, std::span<const StepFunction> before,
                  std::span<const StepFunction> after) {
  double worst = 0.0;
  for (std::size_t i = 0; i < before.size(); ++i)
    worst = std::max(worst, fnorm(norm, sub(before[i], after[i])));
  return worst;
}

}  // namespace

StepFunction domain_truncate(const StepFunction& f, const MeasureSpace& space,
                             int n) {
  space.validate();
  if (n < 1 || n > static_cast<int>(space.exhaustion.size()))
    fail("malformed-input", "truncation index out of range");
  const double cut = space.exhaustion[static_cast<std::size_t>(n - 1)];
  auto g = canonicalize(f);
  StepFunction out;
  out.dim = g.dim;
  out.value_norm = g.value_norm;
  for (std::size_t i = 0; i < g.partition.blocks.size(); ++i) {
    Block b = g.partition.blocks[i];
    if (b.start >= cut) break;
    b.end = std::min(b.end, cut);
    out.partition.blocks.push_back(b);
    out.values.push_back(g.values[i]);
  }
  return canonicalize(out);
}

StepFunction radial_project(const StepFunction& f, double a) {
  if (!(a > 0.0)) fail("malformed-input", "retraction radius must be positive");
  auto g = canonicalize(f);
  for (auto& v : g.values) {
    double len = vector_norm(v, g.value_norm);
    if (len > a)
      for (auto& c : v) c = (c * a) / len;
  }
  return canonicalize(g);
}

std::vector<double> average_on_block(const StepFunction& f,
                                     const Block& target) {
  if (!(target.measure() > 0.0))
    fail("malformed-input", "average over a null block");
  // a single source block covering the target reproduces its value verbatim
  for (std::size_t j = 0; j < f.partition.blocks.size(); ++j) {
    const auto& source = f.partition.blocks[j];
    if (source.start <= target.start + kBreakTol &&
        source.end >= target.end - kBreakTol)
      return f.values[j];
  }
  std::vector<double> acc(static_cast<std::size_t>(f.dim), 0.0);
  for (std::size_t j = 0; j < f.partition.blocks.size(); ++j) {
    const auto& source = f.partition.blocks[j];
    double lo = std::max(source.start, target.start);
    double hi = std::min(source.end, target.end);
    if (hi <= lo) continue;
    double w = hi - lo;
    for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += f.values[j][c] * w;
  }
  for (auto& c : acc) c /= target.measure();
  return acc;
}

StepFunction partition_average(const StepFunction& f, const Partition& K) {
  validate_partition(K);
  auto g = canonicalize(f);
  const double ext = K.extent();
  for (std::size_t i = 0; i < g.partition.blocks.size(); ++i) {
    if (zero_vector(g.values[i])) continue;
    if (g.partition.blocks[i].end > ext + kBreakTol)
      fail("domain-mismatch", "support of the function escapes the partition");
  }

  StepFunction out;
  out.dim = g.dim;
  out.value_norm = g.value_norm;
  out.partition = K;
  out.values.reserve(K.size());
  for (const auto& target : K.blocks)
    out.values.push_back(average_on_block(g, target));
  return canonicalize(out);
}

StepFunction bounded_simple_approx(const StepFunction& f, double M) {
  if (!(M > 0.0)) fail("malformed-input", "value bound must be positive");
  auto g = canonicalize(f);
  for (auto& v : g.values) {
    double len = vector_norm(v, g.value_norm);
    if (len > 4.0 * M)
      for (auto& c : v) c = (c * (2.0 * M)) / len;
  }
  return canonicalize(g);
}

PipelineH build_admissible_map(std::span<const StepFunction> Z, double eps,
                               const FNormSpec& norm, const MeasureSpace& space,
                               const PipelineOptions& opts) {
  space.validate();
  validate_spec(norm);
  if (!(eps > 0.0)) fail("malformed-input", "eps must be positive");
  if (Z.empty()) fail("malformed-input", "empty input family");
  const double stage_budget = eps / 3.0;

  // smallest exhaustion prefix keeping every member's truncation loss under
  // a third of the budget
  int n = 0;
  double truncation_error = 0.0;
  std::vector<StepFunction> truncated;
  for (int cand = 1; cand <= static_cast<int>(space.exhaustion.size());
       ++cand) {
    std::vector<StepFunction> stage;
    stage.reserve(Z.size());
    for (const auto& f : Z) stage.push_back(domain_truncate(f, space, cand));
    double worst = worst_move(norm, Z, stage);
    if (worst < stage_budget) {
      n = cand;
      truncation_error = worst;
      truncated = std::move(stage);
      break;
    }
  }
  if (n == 0)
    fail("budget-exhausted",
         "no exhaustion prefix keeps the truncation stage under eps/3");

  double radius = 0.0;
  if (opts.radius.has_value()) {
    radius = *opts.radius;
    if (!(radius > 0.0))
      fail("malformed-input", "radius override must be positive");
  } else {
    for (const auto& tf : truncated) radius = std::max(radius, tf.sup_norm());
    // dyadic headroom: members still pass the retraction untouched, while
    // callers iterating past the family keep room inside the ball
    radius = radius == 0.0 ? 1.0 : radius * 1.125;
  }
  std::vector<StepFunction> retracted;
  retracted.reserve(truncated.size());
  for (const auto& tf : truncated)
    retracted.push_back(radial_project(tf, radius));
  double radial_error = worst_move(norm, truncated, retracted);
  if (!(radial_error < stage_budget))
    fail("budget-exhausted", "radial stage exceeds eps/3 at this radius");

  const double prefix_end = space.exhaustion[static_cast<std::size_t>(n - 1)];
  auto averaging_loss = [&](const Partition& K) {
    std::vector<StepFunction> stage;
    stage.reserve(retracted.size());
    for (const auto& rf : retracted) stage.push_back(partition_average(rf, K));
    return worst_move(norm, retracted, stage);
  };

  Partition averaging;
  if (opts.max_blocks.has_value()) {
    int cap = *opts.max_blocks;
    if (cap < 1) fail("malformed-input", "block cap must be positive");
    std::vector<int> candidates;
    for (int m = 1; m <= cap; m *= 2) candidates.push_back(m);
    if (candidates.back() != cap) candidates.push_back(cap);
    bool found = false;
    for (int m : candidates) {
      Partition cand = uniform_partition(prefix_end, m);
      if (averaging_loss(cand) < stage_budget) {
        averaging = cand;
        found = true;
        break;
      }
    }
    if (!found)
      fail("budget-exhausted",
           "no uniform partition within the block cap keeps the averaging "
           "stage under eps/3");
  } else {
    // refine every member's partition; averaging reproduces the members
    std::vector<double> points{0.0, prefix_end};
    for (const auto& rf : retracted)
      for (double p : rf.partition.breakpoints()) points.push_back(p);
    std::sort(points.begin(), points.end());
    std::vector<double> unique{points.front()};
    for (double p : points)
      if (p - unique.back() > kBreakTol) unique.push_back(p);
    averaging = partition_from_breakpoints(unique);
  }
  double averaging_error = averaging_loss(averaging);
  if (!(averaging_error < stage_budget))
    fail("budget-exhausted", "averaging stage exceeds eps/3");

  PipelineH pipe;
  pipe.n = n;
  pipe.radius = radius;
  pipe.averaging = averaging;
  pipe.report.truncation_error = truncation_error;
  pipe.report.radial_error = radial_error;
  pipe.report.averaging_error = averaging_error;
  double total = 0.0;
  for (const auto& f : Z)
    total = std::max(total, fnorm(norm, sub(f, apply_pipeline(pipe, space, f))));
  pipe.report.total_error = total;
  if (!(total < eps))
    fail("budget-exhausted", "certified total error does not beat eps");
  return pipe;
}

StepFunction apply_pipeline(const PipelineH& pipe, const MeasureSpace& space,
                            const StepFunction& f) {
  auto truncated = domain_truncate(f, space, pipe.n);
  auto retracted = radial_project(truncated, pipe.radius);
  return partition_average(retracted, pipe.averaging);
}

}  // namespace modularis
