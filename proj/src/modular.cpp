#include "modularis/modular.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace modularis {

double PhiFunction::operator()(double u) const {
  if (u < 0.0) u = -u;
  switch (kind) {
    case Kind::power:
      return std::pow(u, p);
    case Kind::exp_shift:
      return std::expm1(u);
    case Kind::piecewise_linear: {
      if (u <= knots.front()) return heights.front();
      for (std::size_t i = 1; i < knots.size(); ++i) {
        if (u <= knots[i]) {
          double w = (u - knots[i - 1]) / (knots[i] - knots[i - 1]);
          return heights[i - 1] + w * (heights[i] - heights[i - 1]);
        }
      }
      if (barrier) return kInf;
      if (knots.size() < 2) return heights.back();
      double slope = (heights.back() - heights[heights.size() - 2]) /
                     (knots.back() - knots[knots.size() - 2]);
      return heights.back() + slope * (u - knots.back());
    }
  }
  return 0.0;
}

void validate_phi(const PhiFunction& phi) {
  switch (phi.kind) {
    case PhiFunction::Kind::power:
      if (!(phi.p > 0.0)) fail("malformed-input", "power phi needs p > 0");
      return;
    case PhiFunction::Kind::exp_shift:
      return;
    case PhiFunction::Kind::piecewise_linear: {
      if (phi.knots.empty() || phi.knots.size() != phi.heights.size())
        fail("malformed-input", "piecewise phi needs matching knots/heights");
      if (phi.knots.front() != 0.0)
        fail("malformed-input", "piecewise phi must start at the origin");
      if (phi.heights.front() != 0.0)
        fail("malformed-input", "phi(0) must be 0");
      for (std::size_t i = 1; i < phi.knots.size(); ++i) {
        if (!(phi.knots[i] > phi.knots[i - 1]))
          fail("malformed-input", "phi knots must increase");
        if (phi.heights[i] < phi.heights[i - 1])
          fail("malformed-input", "phi must be nondecreasing");
      }
      return;
    }
  }
}

PhiFunction phi_power(double p) {
  PhiFunction phi;
  phi.kind = PhiFunction::Kind::power;
  phi.p = p;
  validate_phi(phi);
  return phi;
}

PhiFunction phi_exp_shift() {
  PhiFunction phi;
  phi.kind = PhiFunction::Kind::exp_shift;
  return phi;
}

PhiFunction phi_piecewise_linear(std::vector<double> knots,
                                 std::vector<double> heights, bool barrier) {
  PhiFunction phi;
  phi.kind = PhiFunction::Kind::piecewise_linear;
  phi.knots = std::move(knots);
  phi.heights = std::move(heights);
  phi.barrier = barrier;
  validate_phi(phi);
  return phi;
}

Semimodular orlicz_modular(PhiFunction phi, Convexity c, double s) {
  Semimodular rho;
  rho.kind = Semimodular::Kind::orlicz;
  rho.phi = std::move(phi);
  rho.convexity = c;
  rho.s = s;
  validate_semimodular(rho);
  return rho;
}

Semimodular lp_modular(double p) {
  return orlicz_modular(phi_power(p),
                        p >= 1.0 ? Convexity::convex : Convexity::s_convex,
                        p >= 1.0 ? 1.0 : p);
}

Semimodular musielak_modular(std::vector<Semimodular::Zone> zones, Convexity c,
                             double s) {
  Semimodular rho;
  rho.kind = Semimodular::Kind::musielak;
  rho.zones = std::move(zones);
  rho.convexity = c;
  rho.s = s;
  validate_semimodular(rho);
  return rho;
}

Semimodular max_combine(std::vector<Semimodular> parts) {
  if (parts.empty()) fail("malformed-input", "max_combine needs members");
  Semimodular rho;
  rho.kind = Semimodular::Kind::custom_max;
  rho.convexity = Convexity::convex;
  rho.s = 1.0;
  for (const auto& part : parts) {
    validate_semimodular(part);
    if (part.convexity == Convexity::plain) rho.convexity = Convexity::plain;
    else if (part.convexity == Convexity::s_convex &&
             rho.convexity != Convexity::plain) {
      rho.convexity = Convexity::s_convex;
      rho.s = std::min(rho.s, part.s);
    }
  }
  if (rho.convexity == Convexity::plain) rho.s = 1.0;
  rho.parts = std::move(parts);
  return rho;
}

void validate_semimodular(const Semimodular& rho) {
  if (rho.convexity == Convexity::s_convex && !(rho.s > 0.0 && rho.s <= 1.0))
    fail("malformed-input", "s-convex exponent must lie in (0, 1]");
  switch (rho.kind) {
    case Semimodular::Kind::orlicz:
      validate_phi(rho.phi);
      return;
    case Semimodular::Kind::musielak: {
      if (rho.zones.empty()) fail("malformed-input", "musielak needs zones");
      double prev = 0.0;
      for (const auto& z : rho.zones) {
        if (!(z.t_end > prev))
          fail("malformed-input", "musielak zone ends must increase");
        validate_phi(z.phi);
        prev = z.t_end;
      }
      return;
    }
    case Semimodular::Kind::custom_max:
      if (rho.parts.empty())
        fail("malformed-input", "custom max needs members");
      for (const auto& p : rho.parts) validate_semimodular(p);
      return;
  }
}

namespace {

double integrate_orlicz(const PhiFunction& phi, const StepFunction& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    double len = f.partition.blocks[i].measure();
    if (len <= 0.0) continue;
    double level = vector_norm(f.values[i], f.value_norm);
    double y = phi(level);
    if (y == 0.0) continue;
    if (y == kInf) return kInf;
    total += y * len;
  }
  return total;
}

double integrate_musielak(const Semimodular& rho, const StepFunction& f) {
  double total = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const Block& blk = f.partition.blocks[i];
    double level = vector_norm(f.values[i], f.value_norm);
    double cursor = blk.start;
    double zone_start = 0.0;
    for (const auto& z : rho.zones) {
      double lo = std::max(cursor, zone_start);
      double hi = std::min(blk.end, z.t_end);
      if (hi > lo) {
        double y = z.phi(level);
        if (y == kInf) return kInf;
        total += y * (hi - lo);
        cursor = hi;
      }
      zone_start = z.t_end;
      if (cursor >= blk.end) break;
    }
    if (cursor < blk.end) {
      // the last zone extends beyond its nominal end
      double y = rho.zones.back().phi(level);
      if (y == kInf) return kInf;
      total += y * (blk.end - cursor);
    }
  }
  return total;
}

}  // namespace

double evaluate_modular(const Semimodular& rho, const StepFunction& f) {
  switch (rho.kind) {
    case Semimodular::Kind::orlicz:
      return integrate_orlicz(rho.phi, f);
    case Semimodular::Kind::musielak:
      return integrate_musielak(rho, f);
    case Semimodular::Kind::custom_max: {
      double best = 0.0;
      for (const auto& part : rho.parts)
        best = std::max(best, evaluate_modular(part, f));
      return best;
    }
  }
  return 0.0;
}

ModularReport verify_semimodular(const Semimodular& rho,
                                 std::span<const StepFunction> samples,
                                 int trials, std::uint64_t seed) {
  ModularReport report;
  std::mt19937_64 rng(seed);
  auto note = [&](const std::string& axiom, const std::string& detail,
                  double lhs, double rhs) {
    report.violations.push_back({axiom, detail, lhs, rhs});
  };

  // (a) vanishing at the origin, probed with an explicit zero block so a
  // phi with phi(0) != 0 cannot hide behind an empty partition
  StepFunction zero = step_constant(1.0, 0.0);
  report.checks++;
  if (evaluate_modular(rho, zero) != 0.0)
    note("a", "rho(0) != 0", evaluate_modular(rho, zero), 0.0);

  // (a) nondegeneracy along the scaling ray of every nonzero sample
  for (const auto& x : samples) {
    if (x.is_zero()) continue;
    report.checks++;
    bool positive = false;
    for (double d = 1e-6; d <= 1e6 && !positive; d *= 10.0)
      positive = evaluate_modular(rho, scale(x, d)) > 0.0;
    if (!positive)
      note("a", "rho(d x) == 0 along the entire sampled ray with x != 0", 0.0,
           0.0);
  }

  // (b) symmetry under sign flip
  for (const auto& x : samples) {
    report.checks++;
    double lhs = evaluate_modular(rho, scale(x, -1.0));
    double rhs = evaluate_modular(rho, x);
    if (!(lhs == rhs || std::abs(lhs - rhs) <= 1e-12 * (1.0 + rhs)))
      note("b", "rho(-x) != rho(x)", lhs, rhs);
  }

  // (c)/(c1) convexity inequality on a simplex grid plus random draws
  if (samples.size() >= 2) {
    const bool sconvex = rho.convexity != Convexity::plain;
    const double s = rho.convexity == Convexity::convex ? 1.0 : rho.s;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);

    auto check_pair = [&](const StepFunction& x, const StepFunction& y,
                          double theta) {
      report.checks++;
      double a = sconvex ? std::pow(theta, s) : theta;
      double b = sconvex ? std::pow(1.0 - theta, s) : 1.0 - theta;
      auto mix = add(scale(x, a), scale(y, b));
      double lhs = evaluate_modular(rho, mix);
      double rx = evaluate_modular(rho, x);
      double ry = evaluate_modular(rho, y);
      double rhs = sconvex ? theta * rx + (1.0 - theta) * ry : rx + ry;
      if (lhs > rhs + 1e-10 * (1.0 + std::abs(rhs)))
        note(sconvex ? (s == 1.0 ? "c" : "c1") : "c",
             "convex combination exceeds its bound", lhs, rhs);
    };

    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
      for (int g = 0; g <= 16; ++g)
        check_pair(samples[i], samples[i + 1], g / 16.0);
    for (int t = 0; t < trials; ++t)
      check_pair(samples[pick(rng)], samples[pick(rng)], unit(rng));
  }

  return report;
}

}  // namespace modularis
