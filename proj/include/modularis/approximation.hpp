#pragma once

#include <optional>
#include <span>

#include "modularis/fnorm.hpp"
#include "modularis/measure.hpp"

namespace modularis {

// Restriction of f to the exhaustion prefix [0, t_n); n is 1-based.
StepFunction domain_truncate(const StepFunction& f, const MeasureSpace& space,
                             int n);

// Blockwise radial retraction onto the closed value ball of radius a: values
// with |w| <= a pass through, larger ones rescale to length a. Pointwise
// 2-Lipschitz in any value norm.
StepFunction radial_project(const StepFunction& f, double a);

// Mean of f over the target block, component by component, with f extended
// by zero off its partition. Copies the value verbatim when a single block
// of f covers the target. Expects canonical input.
std::vector<double> average_on_block(const StepFunction& f,
                                     const Block& target);

// Blockwise averaging onto the partition K: on each K-block the value is the
// mu-average of f there. Exact passthrough when a K-block sits inside a
// single block of f, so functions constant on blocks of a coarsening of K
// are reproduced verbatim. Support escaping K is a domain mismatch.
StepFunction partition_average(const StepFunction& f, const Partition& K);

// Keeps values with |w| <= 4M, rescales larger ones to length 2M. The result
// stays within sup-norm 4M and agrees with f wherever f already did.
StepFunction bounded_simple_approx(const StepFunction& f, double M);

struct PipelineOptions {
  std::optional<double> radius;   // override the fitted truncation radius
  std::optional<int> max_blocks;  // cap on the averaging partition size
};

struct StageReport {
  double truncation_error = 0.0;
  double radial_error = 0.0;
  double averaging_error = 0.0;
  double total_error = 0.0;
};

// Finite-rank approximation pipeline f -> P_K(T_a(F_n f)): truncate to the
// exhaustion prefix, retract values into the radius-a ball, average over K.
struct PipelineH {
  int n = 1;
  double radius = 0.0;
  Partition averaging;
  StageReport report;
};

// Chooses (n, a, K) so that every member of Z moves by less than eps through
// the pipeline, each stage staying under eps/3 on the automatic path. The
// averaging partition defaults to the common refinement of the truncated
// members' partitions, on which the averaging stage is exact; a block-count
// cap switches to certified uniform coarsenings instead. Reported stage and
// total errors are measured in the supplied norm, never estimated.
PipelineH build_admissible_map(std::span<const StepFunction> Z, double eps,
                               const FNormSpec& norm, const MeasureSpace& space,
                               const PipelineOptions& opts = {});

StepFunction apply_pipeline(const PipelineH& pipe, const MeasureSpace& space,
                            const StepFunction& f);

}  // namespace modularis
