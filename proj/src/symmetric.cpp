#include "modularis/symmetric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "modularis/approximation.hpp"
#include "modularis/errors.hpp"
#include "modularis/fnorm.hpp"

namespace modularis {

namespace {

// scalar nonnegative profile t -> |x(t)| in canonical form
StepFunction absolute_profile(const StepFunction& x) {
  return canonicalize(pointwise_norm(x));
}

double clipped_integral(const StepFunction& decreasing, double t) {
  double total = 0.0;
  for (std::size_t i = 0; i < decreasing.partition.blocks.size(); ++i) {
    const auto& b = decreasing.partition.blocks[i];
    double hi = std::min(b.end, t);
    if (hi > b.start) total += decreasing.values[i][0] * (hi - b.start);
  }
  return total;
}

MeasurableSet sorted_family(const MeasurableSet& family) {
  MeasurableSet fam = family;
  std::sort(fam.blocks.begin(), fam.blocks.end(),
            [](const Block& a, const Block& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < fam.blocks.size(); ++i) {
    if (fam.blocks[i].start < 0.0 ||
        !(fam.blocks[i].measure() > kBreakTol))
      fail("malformed-input", "family blocks must have positive measure");
    if (i > 0 && fam.blocks[i].start < fam.blocks[i - 1].end - kBreakTol)
      fail("malformed-input", "family blocks overlap");
  }
  return fam;
}

double lp_value(double p, const StepFunction& profile) {
  if (p == kInf) return profile.sup_norm();
  double total = 0.0;
  for (std::size_t i = 0; i < profile.partition.blocks.size(); ++i) {
    double v = profile.values[i][0];
    double mu = profile.partition.blocks[i].measure();
    if (p == 1.0)
      total += v * mu;
    else if (p == 2.0)
      total += v * v * mu;
    else
      total += std::pow(v, p) * mu;
  }
  if (p == 1.0) return total;
  if (p == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p);
}

double root(double t, double q) {
  return q == 2.0 ? std::sqrt(t) : std::pow(t, 1.0 / q);
}

}  // namespace

SymmetricNorm lp_space(double p, double alpha) {
  if (!(p >= 1.0)) fail("malformed-input", "lp exponent must be at least one");
  SymmetricNorm E;
  E.kind = SymmetricNorm::Kind::lp;
  E.p = p;
  E.order_continuous = p != kInf;
  E.alpha = alpha;
  return E;
}

SymmetricNorm orlicz_space(PhiFunction phi, double alpha) {
  validate_phi(phi);
  SymmetricNorm E;
  E.kind = SymmetricNorm::Kind::orlicz_luxemburg;
  E.phi = std::move(phi);
  E.order_continuous = true;
  E.alpha = alpha;
  return E;
}

SymmetricNorm lorentz_space(double q, double alpha) {
  if (!(q >= 1.0))
    fail("malformed-input", "lorentz exponent must be at least one");
  SymmetricNorm E;
  E.kind = SymmetricNorm::Kind::lorentz;
  E.q = q;
  E.order_continuous = true;
  E.alpha = alpha;
  return E;
}

void validate_symmetric(const SymmetricNorm& E) {
  if (!(E.alpha > 0.0)) fail("malformed-input", "alpha must be positive");
  switch (E.kind) {
    case SymmetricNorm::Kind::lp:
      if (!(E.p >= 1.0))
        fail("malformed-input", "lp exponent must be at least one");
      break;
    case SymmetricNorm::Kind::orlicz_luxemburg:
      validate_phi(E.phi);
      break;
    case SymmetricNorm::Kind::lorentz:
      if (!(E.q >= 1.0))
        fail("malformed-input", "lorentz exponent must be at least one");
      break;
  }
}

double norm_value(const SymmetricNorm& E, const StepFunction& x) {
  validate_symmetric(E);
  auto profile = absolute_profile(x);
  if (profile.extent() > E.alpha + kBreakTol)
    fail("domain-mismatch", "function lives outside [0, alpha)");
  switch (E.kind) {
    case SymmetricNorm::Kind::lp:
      return lp_value(E.p, profile);
    case SymmetricNorm::Kind::orlicz_luxemburg: {
      auto rho = orlicz_modular(E.phi, Convexity::convex);
      return luxemburg_norm(rho, profile);
    }
    case SymmetricNorm::Kind::lorentz: {
      auto xs = decreasing_rearrangement(profile);
      double total = 0.0;
      for (std::size_t i = 0; i < xs.partition.blocks.size(); ++i) {
        const auto& b = xs.partition.blocks[i];
        total += xs.values[i][0] * (root(b.end, E.q) - root(b.start, E.q));
      }
      return total;
    }
  }
  fail("malformed-input", "unknown norm kind");
}

double distribution_function(const StepFunction& x, double lam) {
  if (lam < 0.0) fail("malformed-input", "level must be nonnegative");
  auto profile = absolute_profile(x);
  double total = 0.0;
  for (std::size_t i = 0; i < profile.partition.blocks.size(); ++i)
    if (profile.values[i][0] > lam)
      total += profile.partition.blocks[i].measure();
  return total;
}

StepFunction decreasing_rearrangement(const StepFunction& x) {
  auto profile = absolute_profile(x);
  std::vector<std::pair<double, double>> pieces;  // (value, length)
  for (std::size_t i = 0; i < profile.partition.blocks.size(); ++i)
    if (profile.values[i][0] > 0.0)
      pieces.emplace_back(profile.values[i][0],
                          profile.partition.blocks[i].measure());
  std::sort(pieces.begin(), pieces.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  StepFunction out;
  out.dim = 1;
  out.value_norm = profile.value_norm;
  double cursor = 0.0;
  for (const auto& [value, length] : pieces) {
    out.partition.blocks.push_back({cursor, cursor + length});
    out.values.push_back({value});
    cursor += length;
  }
  return canonicalize(out);
}

double maximal_function(const StepFunction& x, double t) {
  if (!(t > 0.0)) fail("malformed-input", "t must be positive");
  return clipped_integral(decreasing_rearrangement(x), t) / t;
}

bool hlp_majorizes(const StepFunction& x, const StepFunction& y) {
  auto xs = decreasing_rearrangement(x);
  auto ys = decreasing_rearrangement(y);
  // t -> integral of a rearrangement over [0, t) is piecewise affine with
  // knots at the profile breakpoints and flat past the extent, so the
  // difference of two such integrals attains its extremes at the merged
  // knots; checking there decides x** <= y** for every t > 0
  std::vector<double> knots;
  for (double p : xs.partition.breakpoints()) knots.push_back(p);
  for (double p : ys.partition.breakpoints()) knots.push_back(p);
  std::sort(knots.begin(), knots.end());
  for (double t : knots) {
    if (!(t > 0.0)) continue;
    double ix = clipped_integral(xs, t);
    double iy = clipped_integral(ys, t);
    if (ix > iy + 1e-12 * (1.0 + std::abs(iy))) return false;
  }
  return true;
}

RearrangementProfile rearrangement_profile(const StepFunction& x) {
  auto profile = absolute_profile(x);
  RearrangementProfile out;
  out.rearr = decreasing_rearrangement(profile);
  out.support_measure = distribution_function(profile, 0.0);

  std::vector<double> values;
  for (const auto& v : profile.values)
    if (v[0] > 0.0) values.push_back(v[0]);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  StepFunction dist;
  dist.dim = 1;
  double prev = 0.0;
  for (double v : values) {
    dist.partition.blocks.push_back({prev, v});
    dist.values.push_back({distribution_function(profile, prev)});
    prev = v;
  }
  out.dist = canonicalize(dist);
  return out;
}

void validate_family(const MeasurableSet& family) { sorted_family(family); }

StepFunction averaging_operator(const StepFunction& x, const MeasurableSet& A) {
  auto fam = sorted_family(A);
  auto g = canonicalize(x);
  StepFunction out;
  out.dim = g.dim;
  out.value_norm = g.value_norm;
  for (const auto& b : fam.blocks) {
    out.partition.blocks.push_back(b);
    out.values.push_back(average_on_block(g, b));
  }
  return canonicalize(out);
}

StepFunction conditional_contraction(const StepFunction& x,
                                     const MeasurableSet& B) {
  auto fam = sorted_family(B);
  auto g = canonicalize(x);
  if (fam.blocks.empty()) return g;

  std::vector<std::vector<double>> family_means;
  family_means.reserve(fam.blocks.size());
  for (const auto& b : fam.blocks) family_means.push_back(average_on_block(g, b));

  std::vector<double> points{0.0};
  for (double p : g.partition.breakpoints()) points.push_back(p);
  for (const auto& b : fam.blocks) {
    points.push_back(b.start);
    points.push_back(b.end);
  }
  std::sort(points.begin(), points.end());
  std::vector<double> unique{points.front()};
  for (double p : points)
    if (p - unique.back() > kBreakTol) unique.push_back(p);

  StepFunction out;
  out.dim = g.dim;
  out.value_norm = g.value_norm;
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
    Block piece{unique[i], unique[i + 1]};
    double mid = (piece.start + piece.end) / 2.0;
    const std::vector<double>* value = nullptr;
    for (std::size_t j = 0; j < fam.blocks.size(); ++j)
      if (fam.blocks[j].contains(mid)) {
        value = &family_means[j];
        break;
      }
    out.partition.blocks.push_back(piece);
    out.values.push_back(value != nullptr ? *value : g.value_at(mid));
  }
  return canonicalize(out);
}

double fundamental_function(const SymmetricNorm& E, double t) {
  validate_symmetric(E);
  if (!(t > 0.0) || !(t < E.alpha))
    fail("malformed-input", "t must lie in (0, alpha)");
  return norm_value(E, step_constant(t, 1.0));
}

std::vector<ConvergenceRow> map_convergence_experiment(
    const SymmetricNorm& E, const StepFunction& x,
    std::span<const Partition> chain) {
  validate_symmetric(E);
  if (!E.order_continuous)
    fail("malformed-input",
         "convergence experiment requires an order continuous instance");
  if (chain.empty()) fail("invalid-chain", "empty chain");
  for (std::size_t k = 1; k < chain.size(); ++k) {
    bool refines = false;
    try {
      refines = is_refinement(chain[k - 1], chain[k]);
    } catch (const DomainError&) {
      refines = false;
    }
    if (!refines)
      fail("invalid-chain", "stage " + std::to_string(k + 1) +
                                " does not refine its predecessor");
  }
  auto g = canonicalize(x);
  std::vector<ConvergenceRow> rows;
  rows.reserve(chain.size());
  for (std::size_t k = 0; k < chain.size(); ++k) {
    auto tx = averaging_operator(g, MeasurableSet{chain[k].blocks});
    rows.push_back({static_cast<int>(k) + 1, norm_value(E, sub(tx, g))});
  }
  return rows;
}

}  // namespace modularis
