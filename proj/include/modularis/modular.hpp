#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "modularis/measure.hpp"

namespace modularis {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Nondecreasing continuous phi with phi(0) = 0, evaluated on [0, inf).
// piecewise_linear may end in a vertical barrier: +inf beyond the last knot.
struct PhiFunction {
  enum class Kind { power, exp_shift, piecewise_linear };
  Kind kind = Kind::power;
  double p = 1.0;                // power: u^p, p > 0
  std::vector<double> knots;     // piecewise_linear, knots[0] == 0
  std::vector<double> heights;   // heights[0] == 0, nondecreasing
  bool barrier = false;          // +inf beyond the last knot

  double operator()(double u) const;
};

PhiFunction phi_power(double p);
PhiFunction phi_exp_shift();
PhiFunction phi_piecewise_linear(std::vector<double> knots,
                                 std::vector<double> heights,
                                 bool barrier = false);
void validate_phi(const PhiFunction& phi);

enum class Convexity { plain, s_convex, convex };

// Integral semimodular rho(f) = sum_blocks phi(|value|) * mu(block), with a
// finitely-zoned variant (phi depends on the zone containing t) and pointwise
// maxima of finitely many semimodulars. Values in [0, +inf]; convexity_class
// is declared, not inferred, and verify_semimodular spot-checks it.
struct Semimodular {
  enum class Kind { orlicz, musielak, custom_max };

  struct Zone {
    double t_end = 0.0;
    PhiFunction phi;
  };

  Kind kind = Kind::orlicz;
  PhiFunction phi;                // orlicz
  std::vector<Zone> zones;        // musielak, t_end strictly increasing
  std::vector<Semimodular> parts; // custom_max
  Convexity convexity = Convexity::plain;
  double s = 1.0;                 // s_convex exponent, s in (0, 1]
};

Semimodular orlicz_modular(PhiFunction phi, Convexity c = Convexity::plain,
                           double s = 1.0);
// phi(u) = u^p with the convexity class that choice of p earns.
Semimodular lp_modular(double p);
Semimodular musielak_modular(std::vector<Semimodular::Zone> zones,
                             Convexity c = Convexity::plain, double s = 1.0);
// Pointwise maximum; the declared convexity class is the weakest among the
// members (plain < s_convex, smaller s weaker; convex strongest).
Semimodular max_combine(std::vector<Semimodular> parts);
void validate_semimodular(const Semimodular& rho);

// Exact blockwise sum; +inf as soon as any positive-measure block maps to
// +inf. Zero blocks contribute nothing on any domain, bounded or not.
double evaluate_modular(const Semimodular& rho, const StepFunction& f);

struct ModularViolation {
  std::string axiom;  // "a", "b", "c", "c1"
  std::string detail;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct ModularReport {
  std::vector<ModularViolation> violations;
  int checks = 0;
  bool pass() const { return violations.empty(); }
};

// Report-only spot check of the semimodular axioms on the given samples:
// vanishing at zero, nondegeneracy along the scaling ray, symmetry under
// sign flip, and the declared convexity inequality on a 17-point simplex
// grid plus `trials` random draws.
ModularReport verify_semimodular(const Semimodular& rho,
                                 std::span<const StepFunction> samples,
                                 int trials, std::uint64_t seed);

}  // namespace modularis
