#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modularis/modular.hpp"

namespace modularis {

// Monotone norm on R^n used to bind the scale coordinate with the modular
// coordinates. All three kinds are norms, hence monotone on the positive
// orthant; any +inf coordinate propagates to +inf.
struct Binder {
  enum class Kind { max, lp, wsum };
  Kind kind = Kind::max;
  double p = 1.0;               // lp, p >= 1
  std::vector<double> weights;  // wsum, strictly positive
  int arity = 2;

  double operator()(std::span<const double> coords) const;
};

Binder max_binder(int arity = 2);
Binder lp_binder(double p, int arity = 2);
Binder wsum_binder(std::vector<double> weights);
void validate_binder(const Binder& b);

struct SearchParams {
  double k_lo = 1e-9;
  double k_hi = 1e9;
  double tol = 1e-9;  // guaranteed relative accuracy of the infimum
  int max_iter = 200;
};

enum class NormMode { fnorm, snorm };

// Norm built from n-1 semimodulars and an n-ary binder. fnorm mode scans
//   k -> binder(k, rho_1(x/k), ..., rho_{n-1}(x/k));
// snorm mode requires s-convex modulars with one shared s and scans
//   k -> k * binder(1, rho_1(x / k^(1/s)), ..., rho_{n-1}(x / k^(1/s))).
struct FNormSpec {
  std::vector<Semimodular> modulars;
  Binder binder;
  NormMode mode = NormMode::fnorm;
  double s = 1.0;
  SearchParams search;
};

FNormSpec make_fnorm_spec(std::vector<Semimodular> modulars, Binder binder,
                          SearchParams search = {});
FNormSpec make_snorm_spec(std::vector<Semimodular> modulars, Binder binder,
                          double s, SearchParams search = {});
void validate_spec(const FNormSpec& spec);

struct NormResult {
  double value = 0.0;
  double k = 0.0;  // scale attaining the minimum; 0 marks the k -> 0 limit
};

// The scanned objective at a single scale k > 0.
double fnorm_objective(const FNormSpec& spec, const StepFunction& x, double k);
double snorm_objective(const FNormSpec& spec, const StepFunction& x, double k);

// Infimum over k, located by a log-spaced grid with outward bracket
// expansion and golden-section refinement; ties resolve to the smallest k.
NormResult fnorm_with_scale(const FNormSpec& spec, const StepFunction& x);
double fnorm(const FNormSpec& spec, const StepFunction& x);
NormResult snorm_with_scale(const FNormSpec& spec, const StepFunction& x);
double snorm(const FNormSpec& spec, const StepFunction& x);

// Smallest u with rho(x/u) <= u, by bracketed bisection.
double luxemburg_fnorm(const Semimodular& rho, const StepFunction& x,
                       double tol = 1e-9);
// Smallest u with rho(x/u) <= 1; demands a convex modular.
double luxemburg_norm(const Semimodular& rho, const StepFunction& x,
                      double tol = 1e-9);
// inf_k k * lp(1, rho(x/k)) for p in [1, inf]; p = inf uses the max binder.
double amemiya_norm(const Semimodular& rho, const StepFunction& x, double p,
                    double tol = 1e-9);

struct BinderViolation {
  std::vector<double> lo, hi;
  double f_lo = 0.0, f_hi = 0.0;
};

struct BinderReport {
  std::vector<BinderViolation> violations;
  int checks = 0;
  bool pass() const { return violations.empty(); }
};

// Samples coordinatewise-ordered pairs on the positive orthant and checks
// binder monotonicity.
BinderReport verify_binder_monotone(const Binder& b, int trials,
                                    std::uint64_t seed);

struct FNormViolation {
  std::string axiom;  // "i", "ii", "iii", "iv"
  std::string detail;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct FNormAxiomReport {
  std::vector<FNormViolation> violations;
  int checks = 0;
  bool pass() const { return violations.empty(); }
};

// Spot-checks the norm axioms on the samples: definiteness, sign-flip
// invariance, triangle inequality with 3*tol slack, and continuity of
// scalar multiplication along geometric sequences lambda_n -> lambda (decay
// of |lambda_n x - lambda x| below decay_target).
FNormAxiomReport verify_fnorm_axioms(const FNormSpec& spec,
                                     std::span<const StepFunction> samples,
                                     std::span<const double> scalars,
                                     double tol = 1e-9,
                                     double decay_target = 1e-6);

}  // namespace modularis
