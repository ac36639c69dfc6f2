#include "modularis/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace modularis {

double vector_norm(std::span<const double> v, VectorNorm kind) {
  switch (kind) {
    case VectorNorm::euclidean: {
      double s = 0.0;
      for (double c : v) s += c * c;
      return std::sqrt(s);
    }
    case VectorNorm::max: {
      double s = 0.0;
      for (double c : v) s = std::max(s, std::abs(c));
      return s;
    }
    case VectorNorm::sum: {
      double s = 0.0;
      for (double c : v) s += std::abs(c);
      return s;
    }
  }
  return 0.0;
}

std::vector<double> Partition::breakpoints() const {
  std::vector<double> out{0.0};
  for (const auto& b : blocks) out.push_back(b.end);
  return out;
}

Partition partition_from_breakpoints(std::span<const double> points) {
  std::vector<double> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  Partition out;
  if (p.empty()) return out;
  if (p.front() < -kBreakTol)
    fail("malformed-input", "partition breakpoints must be nonnegative");
  double prev = 0.0;
  for (double t : p) {
    if (t - prev > kBreakTol) {
      out.blocks.push_back({prev, t});
      prev = t;
    }
  }
  return out;
}

Partition uniform_partition(double extent, int block_count) {
  if (!(extent > 0.0) || block_count < 1)
    fail("malformed-input", "uniform partition needs extent > 0 and >= 1 block");
  Partition out;
  double prev = 0.0;
  for (int i = 1; i <= block_count; ++i) {
    double t = extent * i / block_count;
    out.blocks.push_back({prev, t});
    prev = t;
  }
  out.blocks.back().end = extent;
  return out;
}

void validate_partition(const Partition& p) {
  double prev = 0.0;
  for (const auto& b : p.blocks) {
    if (!(b.end - b.start > kBreakTol))
      fail("malformed-input", "partition block with nonpositive measure");
    if (std::abs(b.start - prev) > kBreakTol)
      fail("malformed-input", "partition blocks must tile [0, extent)");
    prev = b.end;
  }
}

void MeasureSpace::validate() const {
  if (!(alpha > 0.0)) fail("malformed-input", "alpha must be positive");
  double prev = 0.0;
  for (double t : exhaustion) {
    if (!(t > prev)) fail("malformed-input", "exhaustion must increase");
    if (!(t <= alpha)) fail("malformed-input", "exhaustion exceeds alpha");
    prev = t;
  }
  if (exhaustion.empty()) fail("malformed-input", "exhaustion must be nonempty");
}

double MeasurableSet::measure() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.measure();
  return s;
}

bool StepFunction::is_zero() const {
  for (const auto& v : values)
    for (double c : v)
      if (c != 0.0) return false;
  return true;
}

double StepFunction::sup_norm() const {
  double s = 0.0;
  for (const auto& v : values) s = std::max(s, vector_norm(v, value_norm));
  return s;
}

std::vector<double> StepFunction::value_at(double t) const {
  for (std::size_t i = 0; i < partition.blocks.size(); ++i)
    if (partition.blocks[i].contains(t)) return values[i];
  return std::vector<double>(dim, 0.0);
}

StepFunction step_constant(double extent, double c, VectorNorm norm) {
  StepFunction f;
  f.dim = 1;
  f.value_norm = norm;
  if (extent > 0.0) {
    f.partition.blocks = {{0.0, extent}};
    f.values = {{c}};
  }
  return canonicalize(f);
}

StepFunction step_indicator(double start, double end, double height,
                            VectorNorm norm) {
  StepFunction f;
  f.dim = 1;
  f.value_norm = norm;
  f.partition.blocks = {{start, end}};
  f.values = {{height}};
  return canonicalize(f);
}

StepFunction step_from_blocks(std::vector<Block> blocks,
                              std::vector<std::vector<double>> values, int dim,
                              VectorNorm norm) {
  StepFunction f;
  f.partition.blocks = std::move(blocks);
  f.values = std::move(values);
  f.dim = dim;
  f.value_norm = norm;
  return canonicalize(f);
}

StepFunction canonicalize(const StepFunction& f) {
  if (f.values.size() != f.partition.blocks.size())
    fail("malformed-input", "one value per block required");
  if (f.dim < 1) fail("malformed-input", "dimension must be >= 1");
  for (const auto& v : f.values)
    if (static_cast<int>(v.size()) != f.dim)
      fail("malformed-input", "value dimension mismatch");

  std::vector<std::size_t> order(f.partition.blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return f.partition.blocks[a].start < f.partition.blocks[b].start;
  });

  const std::vector<double> zero(f.dim, 0.0);
  StepFunction out;
  out.dim = f.dim;
  out.value_norm = f.value_norm;

  double cursor = 0.0;
  auto push = [&](double a, double b, const std::vector<double>& v) {
    if (b - a <= kBreakTol) return;
    if (!out.partition.blocks.empty() && out.values.back() == v)
      out.partition.blocks.back().end = b;
    else {
      out.partition.blocks.push_back({a, b});
      out.values.push_back(v);
    }
  };

  for (std::size_t idx : order) {
    Block b = f.partition.blocks[idx];
    if (b.end - b.start <= kBreakTol) continue;
    if (b.start < cursor - kBreakTol)
      fail("malformed-input", "overlapping blocks");
    if (b.start > cursor + kBreakTol) push(cursor, b.start, zero);
    double snapped = out.partition.blocks.empty()
                         ? 0.0
                         : out.partition.blocks.back().end;
    push(snapped, std::max(b.end, snapped), f.values[idx]);
    cursor = out.partition.blocks.empty() ? 0.0 : out.partition.blocks.back().end;
  }
  return out;
}

namespace {

// Values of f re-cut on an arbitrary refinement grid covering at least f's
// extent; grid blocks beyond f carry zero.
std::vector<std::vector<double>> values_on_grid(const StepFunction& f,
                                                const Partition& grid) {
  std::vector<std::vector<double>> out;
  out.reserve(grid.size());
  const std::vector<double> zero(f.dim, 0.0);
  std::size_t i = 0;
  for (const auto& g : grid.blocks) {
    double mid = (g.start + g.end) / 2.0;
    while (i < f.partition.blocks.size() && f.partition.blocks[i].end <= mid)
      ++i;
    if (i < f.partition.blocks.size() && f.partition.blocks[i].contains(mid))
      out.push_back(f.values[i]);
    else
      out.push_back(zero);
  }
  return out;
}

Partition merged_grid(const Partition& a, const Partition& b, double extent) {
  std::vector<double> pts = a.breakpoints();
  auto pb = b.breakpoints();
  pts.insert(pts.end(), pb.begin(), pb.end());
  pts.push_back(extent);
  std::sort(pts.begin(), pts.end());
  std::vector<double> dedup;
  for (double t : pts)
    if (dedup.empty() || t - dedup.back() > kBreakTol) dedup.push_back(t);
  Partition out;
  for (std::size_t i = 0; i + 1 < dedup.size(); ++i)
    out.blocks.push_back({dedup[i], dedup[i + 1]});
  return out;
}

void require_compatible(const StepFunction& f, const StepFunction& g) {
  if (f.dim != g.dim)
    fail("malformed-input", "dimension mismatch between step functions");
  if (f.value_norm != g.value_norm)
    fail("malformed-input", "value norm mismatch between step functions");
}

}  // namespace

StepFunction add(const StepFunction& f, const StepFunction& g) {
  require_compatible(f, g);
  double extent = std::max(f.extent(), g.extent());
  Partition grid = merged_grid(f.partition, g.partition, extent);
  auto vf = values_on_grid(f, grid);
  auto vg = values_on_grid(g, grid);
  StepFunction out;
  out.dim = f.dim;
  out.value_norm = f.value_norm;
  out.partition = grid;
  out.values.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.values[i].resize(f.dim);
    for (int c = 0; c < f.dim; ++c) out.values[i][c] = vf[i][c] + vg[i][c];
  }
  return canonicalize(out);
}

StepFunction sub(const StepFunction& f, const StepFunction& g) {
  return add(f, scale(g, -1.0));
}

StepFunction scale(const StepFunction& f, double a) {
  StepFunction out = f;
  for (auto& v : out.values)
    for (double& c : v) c *= a;
  return canonicalize(out);
}

StepFunction pointwise_norm(const StepFunction& f) {
  StepFunction out;
  out.dim = 1;
  out.value_norm = f.value_norm;
  out.partition = f.partition;
  out.values.reserve(f.values.size());
  for (const auto& v : f.values)
    out.values.push_back({vector_norm(v, f.value_norm)});
  return canonicalize(out);
}

double sup_diff(const StepFunction& f, const StepFunction& g) {
  return pointwise_norm(sub(f, g)).sup_norm();
}

bool equal_ae(const StepFunction& f, const StepFunction& g) {
  if (f.dim != g.dim) return false;
  auto cf = canonicalize(f);
  auto cg = canonicalize(g);
  auto strip = [](StepFunction& h) {
    while (!h.values.empty() &&
           h.values.back() == std::vector<double>(h.dim, 0.0)) {
      h.values.pop_back();
      h.partition.blocks.pop_back();
    }
  };
  strip(cf);
  strip(cg);
  if (cf.values.size() != cg.values.size()) return false;
  for (std::size_t i = 0; i < cf.values.size(); ++i) {
    if (cf.partition.blocks[i].start != cg.partition.blocks[i].start)
      return false;
    if (cf.partition.blocks[i].end != cg.partition.blocks[i].end) return false;
    if (cf.values[i] != cg.values[i]) return false;
  }
  return true;
}

bool is_refinement(const Partition& coarse, const Partition& fine) {
  validate_partition(coarse);
  validate_partition(fine);
  if (std::abs(coarse.extent() - fine.extent()) > kBreakTol)
    fail("incomparable-domains", "partitions cover different intervals");
  std::size_t i = 0;
  for (const auto& cb : coarse.blocks) {
    double covered = cb.start;
    while (i < fine.blocks.size() &&
           fine.blocks[i].end <= cb.end + kBreakTol) {
      covered = fine.blocks[i].end;
      ++i;
      if (std::abs(covered - cb.end) <= kBreakTol) break;
    }
    if (std::abs(covered - cb.end) > kBreakTol) return false;
  }
  return true;
}

Partition common_refinement(const Partition& a, const Partition& b) {
  validate_partition(a);
  validate_partition(b);
  if (std::abs(a.extent() - b.extent()) > kBreakTol)
    fail("incomparable-domains", "partitions cover different intervals");
  return merged_grid(a, b, a.extent());
}

std::vector<Partition> refinement_chain(std::span<const Partition> stages) {
  if (stages.empty()) fail("malformed-input", "empty refinement chain input");
  std::vector<Partition> out;
  out.push_back(stages[0]);
  validate_partition(stages[0]);
  for (std::size_t i = 1; i < stages.size(); ++i)
    out.push_back(common_refinement(out.back(), stages[i]));
  return out;
}

UniformitySet egorov_uniform_set(std::span<const StepFunction> fs,
                                 const StepFunction& limit, double m,
                                 double eps) {
  if (fs.empty()) fail("malformed-input", "empty function sequence");
  if (!(m > 0.0) || !(eps >= 0.0))
    fail("malformed-input", "need m > 0 and eps >= 0");

  // deviations as scalar functions on one shared grid
  std::vector<StepFunction> devs;
  devs.reserve(fs.size());
  double extent = limit.extent();
  for (const auto& f : fs) {
    devs.push_back(pointwise_norm(sub(f, limit)));
    extent = std::max(extent, f.extent());
  }
  Partition grid;
  grid.blocks = {{0.0, std::max(extent, 1.0)}};
  for (const auto& d : devs) grid = merged_grid(grid, d.partition, grid.extent());

  const std::size_t nblocks = grid.size();
  const std::size_t nfun = devs.size();
  std::vector<std::vector<double>> dev_vals(nfun);
  for (std::size_t n = 0; n < nfun; ++n) {
    auto vals = values_on_grid(devs[n], grid);
    dev_vals[n].reserve(nblocks);
    for (const auto& v : vals) dev_vals[n].push_back(v[0]);
  }

  // suffix maxima over n >= n0 for every block, then the least admissible n0
  std::vector<std::vector<double>> suffix(nfun + 1,
                                          std::vector<double>(nblocks, 0.0));
  for (std::size_t n = nfun; n-- > 0;)
    for (std::size_t b = 0; b < nblocks; ++b)
      suffix[n][b] = std::max(dev_vals[n][b], suffix[n + 1][b]);

  for (std::size_t n0 = 0; n0 < nfun; ++n0) {
    double bad = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b)
      if (suffix[n0][b] > eps) bad += grid.blocks[b].measure();
    if (bad < m) {
      UniformitySet out;
      out.first_index = static_cast<int>(n0) + 1;
      for (std::size_t b = 0; b < nblocks; ++b) {
        if (suffix[n0][b] > eps) {
          if (!out.exceptional.blocks.empty() &&
              out.exceptional.blocks.back().end == grid.blocks[b].start)
            out.exceptional.blocks.back().end = grid.blocks[b].end;
          else
            out.exceptional.blocks.push_back(grid.blocks[b]);
        }
      }
      return out;
    }
  }
  fail("no-witness",
       "no prefix index confines the deviation to a set of measure < m");
}

}  // namespace modularis
