#pragma once

#include <span>
#include <vector>

#include "modularis/measure.hpp"
#include "modularis/modular.hpp"

namespace modularis {

// Rearrangement-invariant norm evaluator for step functions on [0, alpha).
// Vector-valued inputs are reduced to t -> |x(t)| in the value norm first,
// so every instance depends on the distribution function only.
struct SymmetricNorm {
  enum class Kind { lp, orlicz_luxemburg, lorentz };
  Kind kind = Kind::lp;
  double p = 1.0;    // lp exponent, 1 <= p <= inf
  PhiFunction phi;   // orlicz_luxemburg generator, convex
  double q = 2.0;    // lorentz weight exponent, >= 1
  bool order_continuous = true;
  double alpha = kInf;
};

SymmetricNorm lp_space(double p, double alpha = kInf);
SymmetricNorm orlicz_space(PhiFunction phi, double alpha = kInf);
// ||x|| = integral of x*(t) against d(t^{1/q}), exact on step functions.
SymmetricNorm lorentz_space(double q, double alpha = kInf);
void validate_symmetric(const SymmetricNorm& E);

double norm_value(const SymmetricNorm& E, const StepFunction& x);

// mu{ t : |x(t)| > lam }, exact on the canonical block structure.
double distribution_function(const StepFunction& x, double lam);

// Nonincreasing equimeasurable profile of |x| on [0, mu(supp x)).
StepFunction decreasing_rearrangement(const StepFunction& x);

// Running average (1/t) * integral of x* over [0, t), x* extended by zero.
double maximal_function(const StepFunction& x, double t);

// Hardy-Littlewood-Polya order: x** <= y** everywhere. The running
// integrals t -> t*x**(t) of both rearrangements are piecewise affine with
// knots among the two breakpoint sets, and affine functions on a segment
// attain extremes at its endpoints, so comparing at the merged knots decides
// the relation everywhere. Comparisons carry a 1e-12 relative slack to
// absorb averaging round-off.
bool hlp_majorizes(const StepFunction& x, const StepFunction& y);

struct RearrangementProfile {
  StepFunction dist;   // lam -> d_x(lam) on [0, sup|x|), right-continuous
  StepFunction rearr;  // x*
  double support_measure = 0.0;
};
RearrangementProfile rearrangement_profile(const StepFunction& x);

// Families of disjoint positive-measure blocks; a subset of a partition's
// blocks is admitted, so the averaging operators below accept both whole
// partitions and finite subcollections.
void validate_family(const MeasurableSet& family);

// Blockwise mean on every family block, zero off the family union.
StepFunction averaging_operator(const StepFunction& x, const MeasurableSet& A);
inline StepFunction averaging_operator(const StepFunction& x,
                                       const Partition& A) {
  return averaging_operator(x, MeasurableSet{A.blocks});
}

// Blockwise mean on every family block, identity elsewhere.
StepFunction conditional_contraction(const StepFunction& x,
                                     const MeasurableSet& B);
inline StepFunction conditional_contraction(const StepFunction& x,
                                            const Partition& B) {
  return conditional_contraction(x, MeasurableSet{B.blocks});
}

// t -> norm of the indicator of (0, t), defined for t in (0, alpha).
double fundamental_function(const SymmetricNorm& E, double t);

struct ConvergenceRow {
  int level = 0;  // 1-based position in the chain
  double error = 0.0;
};

// Errors ||T_{A_k} x - x||_E along a refinement chain. Requires an order
// continuous instance; once a chain stage refines the partition of x the
// averaging reproduces x and the error is exactly zero.
std::vector<ConvergenceRow> map_convergence_experiment(
    const SymmetricNorm& E, const StepFunction& x,
    std::span<const Partition> chain);

}  // namespace modularis
