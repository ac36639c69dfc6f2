#pragma once

// Deterministic instance generators for the property tests. Breakpoints and
// values live on dyadic grids (multiples of 1/64 and 1/16) so measures, block
// averages and rearrangement breakpoints combine without rounding; identities
// asserted as exact below really are exact in IEEE doubles.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "modularis/measure.hpp"

namespace testsupport {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline double dyadic(std::mt19937_64& rng, int lo_num, int hi_num, int denom) {
  std::uniform_int_distribution<int> d(lo_num, hi_num);
  return static_cast<double>(d(rng)) / static_cast<double>(denom);
}

// Sorted distinct interior breakpoints k/64 in (0, extent_num/64).
inline std::vector<double> dyadic_breakpoints(std::mt19937_64& rng,
                                              int block_count,
                                              int extent_num) {
  std::vector<int> pool;
  for (int k = 1; k < extent_num; ++k) pool.push_back(k);
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<int> cut(pool.begin(),
                       pool.begin() + std::min<std::size_t>(block_count - 1,
                                                            pool.size()));
  std::sort(cut.begin(), cut.end());
  std::vector<double> points{0.0};
  for (int k : cut) points.push_back(k / 64.0);
  points.push_back(extent_num / 64.0);
  return points;
}

inline modularis::Partition random_partition(std::mt19937_64& rng,
                                             int max_blocks = 6,
                                             double max_extent = 4.0) {
  std::uniform_int_distribution<int> blocks_d(1, max_blocks);
  int extent_num = std::uniform_int_distribution<int>(
      16, static_cast<int>(max_extent * 64))(rng);
  auto points = dyadic_breakpoints(rng, blocks_d(rng), extent_num);
  return modularis::partition_from_breakpoints(points);
}

inline std::vector<double> random_value(std::mt19937_64& rng, int dim,
                                        double vmax = 2.0) {
  std::vector<double> v(dim);
  int hi = static_cast<int>(vmax * 16);
  for (auto& c : v) c = dyadic(rng, -hi, hi, 16);
  return v;
}

inline modularis::StepFunction random_step(
    std::mt19937_64& rng, int max_blocks = 6, int dim = 1,
    modularis::VectorNorm norm = modularis::VectorNorm::euclidean,
    double max_extent = 4.0, double vmax = 2.0) {
  auto part = random_partition(rng, max_blocks, max_extent);
  std::vector<std::vector<double>> values;
  values.reserve(part.size());
  for (std::size_t i = 0; i < part.size(); ++i)
    values.push_back(random_value(rng, dim, vmax));
  modularis::StepFunction f;
  f.partition = part;
  f.values = std::move(values);
  f.dim = dim;
  f.value_norm = norm;
  return modularis::canonicalize(f);
}

// Nonzero variant for tests that need |x| > 0.
inline modularis::StepFunction random_step_nonzero(
    std::mt19937_64& rng, int max_blocks = 6, int dim = 1,
    modularis::VectorNorm norm = modularis::VectorNorm::euclidean) {
  for (;;) {
    auto f = random_step(rng, max_blocks, dim, norm);
    if (!f.is_zero()) return f;
  }
}

// Measure-preserving block shuffle: permutes the (length, value) pieces of
// the canonical form, so the result is equimeasurable with the input and
// breakpoints stay on the dyadic grid.
inline modularis::StepFunction shuffle_blocks(std::mt19937_64& rng,
                                              const modularis::StepFunction& x) {
  auto g = modularis::canonicalize(x);
  std::vector<std::pair<double, std::vector<double>>> pieces;
  for (std::size_t i = 0; i < g.partition.blocks.size(); ++i)
    pieces.emplace_back(g.partition.blocks[i].measure(), g.values[i]);
  std::shuffle(pieces.begin(), pieces.end(), rng);
  modularis::StepFunction out;
  out.dim = g.dim;
  out.value_norm = g.value_norm;
  double cursor = 0.0;
  for (auto& [len, value] : pieces) {
    out.partition.blocks.push_back({cursor, cursor + len});
    out.values.push_back(std::move(value));
    cursor += len;
  }
  return modularis::canonicalize(out);
}

// Splits blocks of base at dyadic midpoints: result refines base exactly.
inline modularis::Partition random_refinement(std::mt19937_64& rng,
                                              const modularis::Partition& base,
                                              double split_prob = 0.7) {
  std::bernoulli_distribution flip(split_prob);
  std::vector<double> points{0.0};
  for (const auto& b : base.blocks) {
    double mid = (b.start + b.end) / 2.0;
    if (flip(rng) && mid > b.start && mid < b.end) {
      points.push_back(mid);
      if (flip(rng)) {
        double q1 = (b.start + mid) / 2.0;
        if (q1 > b.start && q1 < mid) points.push_back(q1);
      }
    }
    points.push_back(b.end);
  }
  std::sort(points.begin(), points.end());
  return modularis::partition_from_breakpoints(points);
}

}  // namespace testsupport
