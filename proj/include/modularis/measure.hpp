#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "modularis/errors.hpp"

namespace modularis {

// Breakpoints closer than this are identified; blocks thinner than this are
// dropped as measure-zero slivers.
inline constexpr double kBreakTol = 1e-12;

enum class VectorNorm { euclidean, max, sum };

double vector_norm(std::span<const double> v, VectorNorm kind);

// Half-open interval [start, end) on the half line.
struct Block {
  double start = 0.0;
  double end = 0.0;
  double measure() const { return end - start; }
  bool contains(double t) const { return start <= t && t < end; }
};

// Sorted, pairwise disjoint blocks tiling the interval [0, extent()).
struct Partition {
  std::vector<Block> blocks;

  double extent() const { return blocks.empty() ? 0.0 : blocks.back().end; }
  std::size_t size() const { return blocks.size(); }
  // 0 = b_0 < b_1 < ... < b_m = extent; empty partition yields {0}.
  std::vector<double> breakpoints() const;
};

Partition partition_from_breakpoints(std::span<const double> points);
Partition uniform_partition(double extent, int block_count);
void validate_partition(const Partition& p);

// [0, alpha) with Lebesgue measure and a pinned exhaustion by the bounded
// prefixes [0, t_n), t_1 < t_2 < ... < alpha.
struct MeasureSpace {
  double alpha = std::numeric_limits<double>::infinity();
  std::vector<double> exhaustion;
  void validate() const;
};

// Finite union of disjoint sorted blocks; not required to tile an interval.
struct MeasurableSet {
  std::vector<Block> blocks;
  double measure() const;
};

// Finitely-valued function: constant vector on each partition block, zero
// vector outside the partition. Canonical form never carries two adjacent
// blocks with identical value vectors.
struct StepFunction {
  Partition partition;
  std::vector<std::vector<double>> values;
  int dim = 1;
  VectorNorm value_norm = VectorNorm::euclidean;

  bool is_zero() const;
  double extent() const { return partition.extent(); }
  // Essential sup of t -> |f(t)| in the value norm.
  double sup_norm() const;
  std::vector<double> value_at(double t) const;
};

// Scalar constant c on [0, extent).
StepFunction step_constant(double extent, double c,
                           VectorNorm norm = VectorNorm::euclidean);
// Scalar indicator height * chi_[start, end), zero-filled back to 0.
StepFunction step_indicator(double start, double end, double height,
                            VectorNorm norm = VectorNorm::euclidean);
// General builder from (block, value) pairs; canonicalizes.
StepFunction step_from_blocks(std::vector<Block> blocks,
                              std::vector<std::vector<double>> values, int dim,
                              VectorNorm norm = VectorNorm::euclidean);

// Sorts blocks, rejects overlaps, drops slivers, fills gaps with zero blocks,
// snaps breakpoints within kBreakTol, merges adjacent equal-valued blocks.
// The result equals the input almost everywhere and is idempotent under a
// second pass.
StepFunction canonicalize(const StepFunction& f);

// Linear arithmetic evaluated on the common refinement of both partitions,
// extended by zero to the larger extent.
StepFunction add(const StepFunction& f, const StepFunction& g);
StepFunction sub(const StepFunction& f, const StepFunction& g);
StepFunction scale(const StepFunction& f, double a);
// Scalar function t -> |f(t)| in f's value norm.
StepFunction pointwise_norm(const StepFunction& f);
// Essential sup of t -> |f(t) - g(t)|.
double sup_diff(const StepFunction& f, const StepFunction& g);

// Exact structural equality of the canonical forms, ignoring trailing zero
// blocks (functions equal almost everywhere compare equal).
bool equal_ae(const StepFunction& f, const StepFunction& g);

// True when every block of coarse is a union of blocks of fine. Partitions
// covering different intervals are incomparable.
bool is_refinement(const Partition& coarse, const Partition& fine);

// Coarsest partition refining both: blocks are the nonempty pairwise
// intersections, i.e. the partition cut at the union of both breakpoint sets.
Partition common_refinement(const Partition& a, const Partition& b);

// S_1 = K_1, S_{j+1} = common_refinement(S_j, K_{j+1}); every S_j refines all
// earlier stages and every K_i with i <= j.
std::vector<Partition> refinement_chain(std::span<const Partition> stages);

struct UniformitySet {
  MeasurableSet exceptional;  // measure < m
  int first_index = 0;        // 1-based position in fs
};

// Almost-uniform convergence witness for a finite prefix of a sequence: the
// smallest 1-based n0 such that off some set of measure < m every f_n with
// n >= n0 deviates from limit by at most eps, together with that set. The
// set is the union of refinement blocks whose deviation suffix-maximum still
// exceeds eps at n0. Throws no-witness if no prefix index works.
UniformitySet egorov_uniform_set(std::span<const StepFunction> fs,
                                 const StepFunction& limit, double m,
                                 double eps);

}  // namespace modularis
