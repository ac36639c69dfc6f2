#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modularis/approximation.hpp"
#include "modularis/fnorm.hpp"
#include "modularis/measure.hpp"

namespace modularis {

// f -> offset + lambda * (blockwise average of f over the partition).
// Contraction for |lambda| < 1; its fixed point has a closed form.
struct AffineAverageOp {
  StepFunction offset;
  double lambda = 0.5;
  Partition averaging;
};

// f -> offset + gamma * sin(blockwise average of f), componentwise.
// Contraction for |gamma| < 1.
struct SinDampedOp {
  StepFunction offset;
  double gamma = 0.5;
  Partition averaging;
};

// f -> radial retraction of f onto the ball of radius a.
struct RadialOp {
  double a = 1.0;
};

struct IdentityOp {};

// Shell command spoken to over a line protocol: one step function JSON
// document on stdin, one on stdout, one process per application.
struct ExternalOp {
  std::string command;
};

struct OperatorSpec {
  std::variant<AffineAverageOp, SinDampedOp, RadialOp, IdentityOp, ExternalOp> op;
  // declared sup bound for outputs of the operator on its intended domain
  double range_bound = 1.0;
  // optional declared Lipschitz constant, informational only
  std::optional<double> continuity_bound;
};

OperatorSpec affine_operator(StepFunction offset, double lambda, Partition averaging);
OperatorSpec sin_operator(StepFunction offset, double gamma, Partition averaging);
OperatorSpec radial_operator(double a);
OperatorSpec identity_operator(double range_bound = 1.0);
OperatorSpec external_operator(std::string command, double range_bound = 1.0);

// throws malformed-input when parameters leave the contractive / meaningful
// ranges stated on the structs above
void validate_operator(const OperatorSpec& T);

StepFunction apply_operator(const OperatorSpec& T, const StepFunction& f);

// method is "picard" (damped iteration converged), "grid" (bisection or
// box-shrink fallback located the point), or "linear" (closed form).
struct FixedPointResult {
  StepFunction point;
  double residual = 0.0;
  int iterations = 0;
  std::string method;
};

// continuous self map of the box [lo, hi] in dimension lo.size() <= 3
struct BoxMap {
  std::vector<double> lo;
  std::vector<double> hi;
  std::function<std::vector<double>(const std::vector<double>&)> map;
};

struct BrouwerResult {
  std::vector<double> point;
  double residual = 0.0;
  int iterations = 0;
  std::string method;
};

// Samples corners and the center first and throws self-map-violation when an
// image leaves the box. Runs damped iteration p <- (p + g(p)) / 2 from the
// center; on stall falls back to sign bisection (1d) or a shrinking 5^d scan.
// residual is the sup distance |g(p) - p| at the returned point. iterations
// counts map evaluations. Throws budget-exhausted when tol is not reached.
BrouwerResult brouwer_solve(const BoxMap& g, double tol, int max_iter = 20000);

// Certified approximate fixed point: returns f with |T f - f| < eps in the
// given norm. Affine operators take the closed-form path. Otherwise the
// operator is compressed through an admissible approximation pipeline onto
// finitely many block coefficients and the reduced map is handed to
// brouwer_solve; the residual is always re-measured on the full operator.
// Throws dimension-limit when the reduced problem needs more than three
// coefficients and budget-exhausted when eps cannot be certified.
FixedPointResult approximate_fixed_point(const OperatorSpec& T, double eps,
                                         const FNormSpec& norm,
                                         const MeasureSpace& space,
                                         int max_iter = 20000);

// Fixed point of T on the retract C = range(retract): spot-checks that
// retract is idempotent (throws idempotence-violation otherwise), solves the
// composition T after retract, and passes the point through retract once
// more so it lies in C.
FixedPointResult retract_fixed_point(const OperatorSpec& T,
                                     const OperatorSpec& retract, double eps,
                                     const FNormSpec& norm,
                                     const MeasureSpace& space,
                                     int max_iter = 20000);

}  // namespace modularis
