#include "modularis/fnorm.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace modularis {

double Binder::operator()(std::span<const double> coords) const {
  if (static_cast<int>(coords.size()) != arity)
    fail("malformed-input", "binder applied to the wrong number of coordinates");
  switch (kind) {
    case Kind::max: {
      double m = 0.0;
      for (double c : coords) m = std::max(m, c);
      return m;
    }
    case Kind::lp: {
      double s = 0.0;
      for (double c : coords) {
        if (c == kInf) return kInf;
        s += std::pow(c, p);
      }
      return std::pow(s, 1.0 / p);
    }
    case Kind::wsum: {
      double s = 0.0;
      for (std::size_t i = 0; i < coords.size(); ++i) {
        if (coords[i] == kInf) return kInf;
        s += weights[i] * coords[i];
      }
      return s;
    }
  }
  return 0.0;
}

void validate_binder(const Binder& b) {
  if (b.arity < 2) fail("malformed-input", "binder arity must be at least 2");
  switch (b.kind) {
    case Binder::Kind::max:
      return;
    case Binder::Kind::lp:
      if (!(b.p >= 1.0)) fail("malformed-input", "lp binder needs p >= 1");
      return;
    case Binder::Kind::wsum:
      if (static_cast<int>(b.weights.size()) != b.arity)
        fail("malformed-input", "weight count must equal the binder arity");
      for (double w : b.weights)
        if (!(w > 0.0))
          fail("malformed-input", "wsum binder weights must be positive");
      return;
  }
}

Binder max_binder(int arity) {
  Binder b;
  b.kind = Binder::Kind::max;
  b.arity = arity;
  validate_binder(b);
  return b;
}

Binder lp_binder(double p, int arity) {
  Binder b;
  b.kind = Binder::Kind::lp;
  b.p = p;
  b.arity = arity;
  validate_binder(b);
  return b;
}

Binder wsum_binder(std::vector<double> weights) {
  Binder b;
  b.kind = Binder::Kind::wsum;
  b.arity = static_cast<int>(weights.size());
  b.weights = std::move(weights);
  validate_binder(b);
  return b;
}

namespace {

void require_snorm_compatible(const FNormSpec& spec) {
  if (!(spec.s > 0.0 && spec.s <= 1.0))
    fail("malformed-input", "snorm exponent must lie in (0, 1]");
  for (const auto& rho : spec.modulars) {
    bool ok = rho.convexity == Convexity::convex
                  ? spec.s == 1.0
                  : rho.convexity == Convexity::s_convex && rho.s == spec.s;
    if (!ok)
      fail("wrong-convexity-class",
           "snorm needs every modular s-convex with the shared exponent");
  }
}

}  // namespace

void validate_spec(const FNormSpec& spec) {
  if (spec.modulars.empty())
    fail("malformed-input", "at least one modular required");
  validate_binder(spec.binder);
  if (spec.binder.arity != static_cast<int>(spec.modulars.size()) + 1)
    fail("malformed-input",
         "binder arity must be one more than the modular count");
  for (const auto& rho : spec.modulars) validate_semimodular(rho);
  if (!(spec.search.k_lo > 0.0) || !(spec.search.k_hi > spec.search.k_lo))
    fail("malformed-input", "scale window must satisfy 0 < k_lo < k_hi");
  if (spec.mode == NormMode::snorm) require_snorm_compatible(spec);
}

FNormSpec make_fnorm_spec(std::vector<Semimodular> modulars, Binder binder,
                          SearchParams search) {
  FNormSpec spec;
  spec.modulars = std::move(modulars);
  spec.binder = std::move(binder);
  spec.mode = NormMode::fnorm;
  spec.search = search;
  validate_spec(spec);
  return spec;
}

FNormSpec make_snorm_spec(std::vector<Semimodular> modulars, Binder binder,
                          double s, SearchParams search) {
  FNormSpec spec;
  spec.modulars = std::move(modulars);
  spec.binder = std::move(binder);
  spec.mode = NormMode::snorm;
  spec.s = s;
  spec.search = search;
  validate_spec(spec);
  return spec;
}

namespace {

// Objective evaluation shared by both modes; flags whether any modular
// coordinate came out positive, which the degeneracy guard inspects.
double eval_objective(const FNormSpec& spec, const StepFunction& x, double k,
                      bool snorm_mode, bool* saw_positive) {
  if (!(k > 0.0)) fail("malformed-input", "scale k must be positive");
  double denom = snorm_mode ? std::pow(k, 1.0 / spec.s) : k;
  StepFunction scaled = scale(x, 1.0 / denom);
  std::vector<double> coords(spec.modulars.size() + 1);
  coords[0] = snorm_mode ? 1.0 : k;
  for (std::size_t i = 0; i < spec.modulars.size(); ++i) {
    coords[i + 1] = evaluate_modular(spec.modulars[i], scaled);
    if (saw_positive && coords[i + 1] > 0.0) *saw_positive = true;
  }
  double bound = spec.binder(coords);
  return snorm_mode ? k * bound : bound;
}

struct Probe {
  double k = 0.0;
  double v = kInf;
};

bool better(const Probe& a, const Probe& b) {
  return a.v < b.v || (a.v == b.v && a.k < b.k);
}

NormResult scan_infimum(const FNormSpec& spec, const StepFunction& x,
                        bool snorm_mode) {
  validate_spec(spec);
  StepFunction cx = canonicalize(x);
  if (cx.is_zero()) return {0.0, 0.0};

  const SearchParams& sp = spec.search;
  bool saw_positive = false;
  auto fn = [&](double k) {
    return eval_objective(spec, cx, k, snorm_mode, &saw_positive);
  };

  const int grid_n = 64;
  std::vector<Probe> probes;
  probes.reserve(grid_n + 64);
  const double l_lo = std::log(sp.k_lo), l_hi = std::log(sp.k_hi);
  bool any_finite = false;
  for (int i = 0; i < grid_n; ++i) {
    double k = std::exp(l_lo + (l_hi - l_lo) * i / (grid_n - 1));
    double v = fn(k);
    any_finite = any_finite || v < kInf;
    probes.push_back({k, v});
  }
  if (!any_finite)
    fail("not-in-space",
         "objective is infinite across the entire scanned scale window");
  if (!saw_positive)
    fail("axiom-violation",
         "every modular vanishes along the scaling ray of a nonzero function");

  Probe best{0.0, kInf};
  for (const auto& pr : probes)
    if (better(pr, best)) best = pr;

  // outward bracket expansion while the edge keeps strictly improving
  while (best.k == probes.front().k && probes.front().k > 1e-18) {
    Probe nw{probes.front().k / 10.0, 0.0};
    nw.v = fn(nw.k);
    probes.insert(probes.begin(), nw);
    if (better(nw, best)) best = nw;
    if (!(nw.v < probes[1].v)) break;
  }
  while (best.k == probes.back().k && probes.back().k < 1e18) {
    Probe nw{probes.back().k * 10.0, 0.0};
    nw.v = fn(nw.k);
    probes.push_back(nw);
    if (better(nw, best)) best = nw;
    if (!(nw.v < probes[probes.size() - 2].v)) break;
  }

  // golden-section refinement in log scale around the best probe
  std::size_t bi = 0;
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (probes[i].k == best.k) bi = i;
  double la = std::log(probes[bi == 0 ? 0 : bi - 1].k);
  double lb = std::log(probes[std::min(probes.size() - 1, bi + 1)].k);
  static const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lc = lb - gr * (lb - la);
  double ld = la + gr * (lb - la);
  Probe pc{std::exp(lc), fn(std::exp(lc))};
  Probe pd{std::exp(ld), fn(std::exp(ld))};
  if (better(pc, best)) best = pc;
  if (better(pd, best)) best = pd;
  int iter = 0;
  while (lb - la > 1e-15 && iter < sp.max_iter) {
    if (pc.v <= pd.v) {
      lb = ld;
      ld = lc;
      pd = pc;
      lc = lb - gr * (lb - la);
      pc = {std::exp(lc), fn(std::exp(lc))};
      if (better(pc, best)) best = pc;
    } else {
      la = lc;
      lc = ld;
      pc = pd;
      ld = la + gr * (lb - la);
      pd = {std::exp(ld), fn(std::exp(ld))};
      if (better(pd, best)) best = pd;
    }
    ++iter;
  }
  return {best.v, best.k};
}

}  // namespace

double fnorm_objective(const FNormSpec& spec, const StepFunction& x, double k) {
  return eval_objective(spec, x, k, false, nullptr);
}

double snorm_objective(const FNormSpec& spec, const StepFunction& x, double k) {
  return eval_objective(spec, x, k, true, nullptr);
}

NormResult fnorm_with_scale(const FNormSpec& spec, const StepFunction& x) {
  return scan_infimum(spec, x, false);
}

double fnorm(const FNormSpec& spec, const StepFunction& x) {
  return scan_infimum(spec, x, false).value;
}

NormResult snorm_with_scale(const FNormSpec& spec, const StepFunction& x) {
  require_snorm_compatible(spec);
  return scan_infimum(spec, x, true);
}

double snorm(const FNormSpec& spec, const StepFunction& x) {
  return snorm_with_scale(spec, x).value;
}

namespace {

// Smallest u with crossing(u) <= 0 for a nonincreasing crossing function,
// by decade bracketing plus bisection.
double solve_crossing(const std::function<double(double)>& h, double tol) {
  double lo = 1.0, hi = 1.0;
  if (h(1.0) <= 0.0) {
    for (;;) {
      lo = hi / 10.0;
      if (h(lo) > 0.0) break;
      hi = lo;
      if (lo < 1e-30)
        fail("axiom-violation",
             "modular vanishes at every scaling of a nonzero function");
    }
  } else {
    for (;;) {
      hi = lo * 10.0;
      if (h(hi) <= 0.0) break;
      lo = hi;
      if (hi > 1e300)
        fail("not-in-space", "no admissible scaling below the overflow cap");
    }
  }
  for (int i = 0; i < 200 && hi - lo > tol * 1e-5 * std::max(1.0, hi); ++i) {
    double mid = 0.5 * (lo + hi);
    if (h(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double luxemburg_fnorm(const Semimodular& rho, const StepFunction& x,
                       double tol) {
  validate_semimodular(rho);
  StepFunction cx = canonicalize(x);
  if (cx.is_zero()) return 0.0;
  auto h = [&](double u) {
    return evaluate_modular(rho, scale(cx, 1.0 / u)) - u;
  };
  return solve_crossing(h, tol);
}

double luxemburg_norm(const Semimodular& rho, const StepFunction& x,
                      double tol) {
  validate_semimodular(rho);
  bool convex_enough = rho.convexity == Convexity::convex ||
                       (rho.convexity == Convexity::s_convex && rho.s == 1.0);
  if (!convex_enough)
    fail("wrong-convexity-class", "luxemburg norm needs a convex modular");
  StepFunction cx = canonicalize(x);
  if (cx.is_zero()) return 0.0;
  auto h = [&](double u) {
    return evaluate_modular(rho, scale(cx, 1.0 / u)) - 1.0;
  };
  return solve_crossing(h, tol);
}

double amemiya_norm(const Semimodular& rho, const StepFunction& x, double p,
                    double tol) {
  if (!(p >= 1.0))
    fail("malformed-input", "amemiya exponent must satisfy p >= 1");
  SearchParams sp;
  sp.tol = tol;
  auto spec = make_snorm_spec(
      {rho}, p == kInf ? max_binder(2) : lp_binder(p, 2), 1.0, sp);
  return snorm(spec, x);
}

BinderReport verify_binder_monotone(const Binder& b, int trials,
                                    std::uint64_t seed) {
  validate_binder(b);
  BinderReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.0, 10.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    std::vector<double> hi(b.arity), lo(b.arity);
    for (int i = 0; i < b.arity; ++i) {
      hi[i] = mag(rng);
      lo[i] = hi[i] * frac(rng);
    }
    report.checks++;
    double f_lo = b(lo), f_hi = b(hi);
    if (f_lo > f_hi + 1e-12)
      report.violations.push_back({lo, hi, f_lo, f_hi});
  }
  return report;
}

FNormAxiomReport verify_fnorm_axioms(const FNormSpec& spec,
                                     std::span<const StepFunction> samples,
                                     std::span<const double> scalars,
                                     double tol, double decay_target) {
  validate_spec(spec);
  FNormAxiomReport report;
  auto note = [&](const std::string& axiom, const std::string& detail,
                  double lhs, double rhs) {
    report.violations.push_back({axiom, detail, lhs, rhs});
  };

  report.checks++;
  if (fnorm(spec, StepFunction{}) != 0.0)
    note("i", "norm of the zero function is nonzero", 0.0, 0.0);

  for (const auto& x : samples) {
    if (canonicalize(x).is_zero()) continue;
    report.checks++;
    double v = fnorm(spec, x);
    if (!(v > 0.0)) note("i", "nonzero function with zero norm", v, 0.0);

    report.checks++;
    double flipped = fnorm(spec, scale(x, -1.0));
    if (std::abs(flipped - v) > tol)
      note("ii", "sign flip changes the norm", flipped, v);
  }

  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    report.checks++;
    double lhs = fnorm(spec, add(samples[i], samples[i + 1]));
    double rhs = fnorm(spec, samples[i]) + fnorm(spec, samples[i + 1]);
    if (lhs > rhs + 3.0 * tol)
      note("iii", "triangle inequality fails", lhs, rhs);
  }

  // scalar-multiplication continuity along lambda_n -> lambda: the gap
  // |lambda_n x - lambda x| equals |(lambda_n - lambda) x|, evaluated in
  // that cancellation-free form
  std::size_t si = 0;
  for (double lambda : scalars) {
    if (samples.empty()) break;
    const auto& x = samples[si++ % samples.size()];
    double delta = std::max(1.0, std::abs(lambda));
    double prev = kInf;
    double last = kInf;
    report.checks++;
    bool monotone = true;
    for (int j = 0; j <= 52; ++j) {
      double e = fnorm(spec, scale(x, delta * std::pow(2.0, -j)));
      if (e > prev + tol) monotone = false;
      prev = e;
      last = e;
    }
    if (!monotone)
      note("iv", "scalar continuity sequence is not monotone", prev, last);
    if (!(last <= decay_target))
      note("iv", "scalar continuity sequence fails to decay", last,
           decay_target);
  }
  return report;
}

}  // namespace modularis
