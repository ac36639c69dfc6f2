#include "modularis/fixed_point.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "modularis/json_io.hpp"

namespace modularis {

namespace {

// values never exceed this in norm once the operator is iterated from zero
double affine_range(const StepFunction& offset, double lambda) {
  double denom = 1.0 - std::abs(lambda);
  return denom > 0.0 ? offset.sup_norm() / denom + 1.0 : 1.0;
}

double sin_range(const StepFunction& offset, double gamma) {
  return offset.sup_norm() +
         std::abs(gamma) * std::sqrt(static_cast<double>(offset.dim)) + 1.0;
}

// zero inputs adopt the offset's dimension so arithmetic stays compatible
StepFunction match_zero(const StepFunction& f, const StepFunction& offset) {
  if (!f.is_zero() ||
      (f.dim == offset.dim && f.value_norm == offset.value_norm))
    return f;
  StepFunction z;
  z.dim = offset.dim;
  z.value_norm = offset.value_norm;
  return z;
}

StepFunction apply_affine(const AffineAverageOp& op, const StepFunction& f) {
  auto g = match_zero(f, op.offset);
  return canonicalize(
      add(op.offset, scale(partition_average(g, op.averaging), op.lambda)));
}

StepFunction apply_sin(const SinDampedOp& op, const StepFunction& f) {
  auto g = match_zero(f, op.offset);
  auto avg = partition_average(g, op.averaging);
  for (auto& v : avg.values)
    for (auto& w : v) w = std::sin(w);
  return canonicalize(add(op.offset, scale(avg, op.gamma)));
}

// writes to a dead child must come back as EPIPE, not kill the process
struct SigpipeGuard {
  struct sigaction saved {};
  SigpipeGuard() {
    struct sigaction ignore {};
    ignore.sa_handler = SIG_IGN;
    sigaction(SIGPIPE, &ignore, &saved);
  }
  ~SigpipeGuard() { sigaction(SIGPIPE, &saved, nullptr); }
};

// One process per application: the request is a single JSON line on stdin,
// the reply a single JSON line on stdout. Requests must fit the pipe buffer.
StepFunction apply_external(const ExternalOp& op, const StepFunction& f) {
  std::string request = to_json(f);
  request.push_back('\n');

  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0)
    fail("operator-failure", "could not open a pipe to the external operator");
  if (pipe(from_child) != 0) {
    close(to_child[0]);
    close(to_child[1]);
    fail("operator-failure", "could not open a pipe to the external operator");
  }

  pid_t pid = fork();
  if (pid < 0) {
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    fail("operator-failure", "could not spawn the external operator");
  }
  if (pid == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", op.command.c_str(),
          static_cast<char*>(nullptr));
    _exit(127);
  }

  close(to_child[0]);
  close(from_child[1]);

  SigpipeGuard guard;
  bool write_ok = true;
  std::size_t sent = 0;
  while (sent < request.size()) {
    ssize_t n =
        write(to_child[1], request.data() + sent, request.size() - sent);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      write_ok = false;
      break;
    }
    sent += static_cast<std::size_t>(n);
  }
  close(to_child[1]);

  std::string reply;
  char buf[4096];
  while (true) {
    ssize_t n = read(from_child[0], buf, sizeof buf);
    if (n > 0) {
      reply.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n < 0 && errno == EINTR) continue;
    break;
  }
  close(from_child[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    fail("operator-failure", "external operator exited abnormally");
  if (!write_ok)
    fail("operator-failure", "external operator closed its input early");

  auto newline = reply.find('\n');
  std::string line =
      newline == std::string::npos ? reply : reply.substr(0, newline);
  if (line.find_first_not_of(" \t\r") == std::string::npos)
    fail("operator-failure", "external operator sent no reply");
  try {
    return step_from_json(line);
  } catch (const DomainError& e) {
    fail("operator-failure",
         std::string("external operator sent an unparsable reply: ") +
             e.what());
  }
}

}  // namespace

OperatorSpec affine_operator(StepFunction offset, double lambda,
                             Partition averaging) {
  OperatorSpec T;
  double bound = affine_range(offset, lambda);
  T.op = AffineAverageOp{std::move(offset), lambda, std::move(averaging)};
  T.range_bound = bound;
  return T;
}

OperatorSpec sin_operator(StepFunction offset, double gamma,
                          Partition averaging) {
  OperatorSpec T;
  double bound = sin_range(offset, gamma);
  T.op = SinDampedOp{std::move(offset), gamma, std::move(averaging)};
  T.range_bound = bound;
  return T;
}

OperatorSpec radial_operator(double a) {
  OperatorSpec T;
  T.op = RadialOp{a};
  T.range_bound = a > 0.0 ? a : 1.0;
  return T;
}

OperatorSpec identity_operator(double range_bound) {
  OperatorSpec T;
  T.op = IdentityOp{};
  T.range_bound = range_bound;
  return T;
}

OperatorSpec external_operator(std::string command, double range_bound) {
  OperatorSpec T;
  T.op = ExternalOp{std::move(command)};
  T.range_bound = range_bound;
  return T;
}

void validate_operator(const OperatorSpec& T) {
  if (const auto* a = std::get_if<AffineAverageOp>(&T.op)) {
    validate_partition(a->averaging);
    if (!std::isfinite(a->lambda) || std::abs(a->lambda) >= 1.0)
      fail("malformed-input",
           "affine coefficient must have magnitude below one");
  } else if (const auto* s = std::get_if<SinDampedOp>(&T.op)) {
    validate_partition(s->averaging);
    if (!std::isfinite(s->gamma) || std::abs(s->gamma) >= 1.0)
      fail("malformed-input",
           "damping coefficient must have magnitude below one");
  } else if (const auto* r = std::get_if<RadialOp>(&T.op)) {
    if (!std::isfinite(r->a) || r->a <= 0.0)
      fail("malformed-input", "retraction radius must be positive");
  } else if (const auto* e = std::get_if<ExternalOp>(&T.op)) {
    if (e->command.empty())
      fail("malformed-input", "external operator needs a command");
  }
  if (!std::isfinite(T.range_bound) || T.range_bound <= 0.0)
    fail("malformed-input", "operator range bound must be positive and finite");
  if (T.continuity_bound &&
      (!std::isfinite(*T.continuity_bound) || *T.continuity_bound < 0.0))
    fail("malformed-input", "operator continuity bound must be nonnegative");
}

StepFunction apply_operator(const OperatorSpec& T, const StepFunction& f) {
  validate_operator(T);
  if (const auto* a = std::get_if<AffineAverageOp>(&T.op))
    return apply_affine(*a, f);
  if (const auto* s = std::get_if<SinDampedOp>(&T.op)) return apply_sin(*s, f);
  if (const auto* r = std::get_if<RadialOp>(&T.op))
    return radial_project(f, r->a);
  if (std::get_if<IdentityOp>(&T.op)) return canonicalize(f);
  return apply_external(std::get<ExternalOp>(T.op), f);
}

BrouwerResult brouwer_solve(const BoxMap& g, double tol, int max_iter) {
  const std::size_t d = g.lo.size();
  if (d < 1 || d > 3)
    fail("dimension-limit", "box dimension must be between one and three");
  if (g.hi.size() != d)
    fail("malformed-input", "box bounds disagree in dimension");
  double span = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(g.lo[i]) || !std::isfinite(g.hi[i]) ||
        !(g.hi[i] > g.lo[i]))
      fail("malformed-input", "box must have positive finite side lengths");
    span = std::max(span, g.hi[i] - g.lo[i]);
  }
  if (!(tol > 0.0)) fail("malformed-input", "tolerance must be positive");
  if (max_iter < 1)
    fail("malformed-input", "iteration budget must be positive");
  if (!g.map) fail("malformed-input", "box map is empty");

  const double slack = 1e-9 * (1.0 + span);
  int evals = 0;
  auto eval = [&](const std::vector<double>& p) {
    if (evals >= max_iter)
      fail("budget-exhausted",
           "iteration budget exhausted before reaching the tolerance");
    ++evals;
    auto q = g.map(p);
    if (q.size() != d)
      fail("operator-failure", "box map returned the wrong dimension");
    for (std::size_t i = 0; i < d; ++i) {
      if (!std::isfinite(q[i]))
        fail("operator-failure", "box map returned a non-finite value");
      if (q[i] < g.lo[i] - slack || q[i] > g.hi[i] + slack)
        fail("self-map-violation", "box map leaves the box");
    }
    return q;
  };
  auto sup_move = [d](const std::vector<double>& p,
                      const std::vector<double>& q) {
    double r = 0.0;
    for (std::size_t i = 0; i < d; ++i) r = std::max(r, std::abs(q[i] - p[i]));
    return r;
  };

  std::vector<double> center(d);
  for (std::size_t i = 0; i < d; ++i) center[i] = 0.5 * (g.lo[i] + g.hi[i]);
  // corners and the center must land inside before any iteration starts
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::vector<double> corner(d);
    for (std::size_t i = 0; i < d; ++i)
      corner[i] = ((mask >> i) & 1u) ? g.hi[i] : g.lo[i];
    eval(corner);
  }

  std::vector<double> best_p = center;
  double best_r = std::numeric_limits<double>::infinity();
  auto note = [&](const std::vector<double>& p, double r) {
    if (r < best_r) {
      best_r = r;
      best_p = p;
    }
  };

  // damped iteration; a 20-step window without relative progress means the
  // map cycles or has hit the floating floor
  std::vector<double> p = center;
  double window_best = std::numeric_limits<double>::infinity();
  int since_gain = 0;
  while (true) {
    auto q = eval(p);
    double r = sup_move(p, q);
    note(p, r);
    if (r <= tol) return {p, r, evals, "picard"};
    if (r < window_best * (1.0 - 1e-3)) {
      window_best = r;
      since_gain = 0;
    } else if (++since_gain >= 20) {
      break;
    }
    for (std::size_t i = 0; i < d; ++i) p[i] = 0.5 * (p[i] + q[i]);
  }

  if (d == 1) {
    // a continuous self map has g(lo) >= lo and g(hi) <= hi, so the
    // displacement changes sign across the interval
    double lo = g.lo[0];
    double hi = g.hi[0];
    double hlo = eval({lo})[0] - lo;
    note({lo}, std::abs(hlo));
    if (std::abs(hlo) <= tol) return {{lo}, std::abs(hlo), evals, "grid"};
    double hhi = eval({hi})[0] - hi;
    note({hi}, std::abs(hhi));
    if (std::abs(hhi) <= tol) return {{hi}, std::abs(hhi), evals, "grid"};
    while (hi - lo > 1e-17 * (1.0 + std::abs(lo) + std::abs(hi))) {
      double mid = 0.5 * (lo + hi);
      double hm = eval({mid})[0] - mid;
      note({mid}, std::abs(hm));
      if (std::abs(hm) <= tol) return {{mid}, std::abs(hm), evals, "grid"};
      if (hm > 0.0)
        lo = mid;
      else
        hi = mid;
    }
  } else {
    std::vector<double> clo = g.lo;
    std::vector<double> chi = g.hi;
    int npts = 1;
    for (std::size_t i = 0; i < d; ++i) npts *= 5;
    for (int depth = 0; depth < 80; ++depth) {
      std::vector<double> arg_best;
      double r_best = std::numeric_limits<double>::infinity();
      for (int m = 0; m < npts; ++m) {
        int rem = m;
        std::vector<double> pt(d);
        for (std::size_t i = 0; i < d; ++i) {
          pt[i] = clo[i] + (chi[i] - clo[i]) * (rem % 5) / 4.0;
          rem /= 5;
        }
        auto q = eval(pt);
        double r = sup_move(pt, q);
        note(pt, r);
        if (r <= tol) return {pt, r, evals, "grid"};
        if (r < r_best) {
          r_best = r;
          arg_best = pt;
        }
      }
      // halve the box around the best lattice point; the lattice spacing
      // keeps the true minimizer inside the shrunk box for Lipschitz maps
      bool tiny = true;
      for (std::size_t i = 0; i < d; ++i) {
        double w = (chi[i] - clo[i]) / 4.0;
        clo[i] = std::max(g.lo[i], arg_best[i] - w);
        chi[i] = std::min(g.hi[i], arg_best[i] + w);
        if (chi[i] - clo[i] >
            1e-16 * (1.0 + std::abs(clo[i]) + std::abs(chi[i])))
          tiny = false;
      }
      if (tiny) break;
    }
  }

  if (best_r <= tol) return {best_p, best_r, evals, "grid"};
  fail("budget-exhausted",
       "could not reach the tolerance with the available strategies");
}

namespace {

StepFunction coeffs_to_step(const Partition& K, std::span<const double> c,
                            int dim, VectorNorm vn) {
  std::vector<std::vector<double>> vals(K.size());
  for (std::size_t b = 0; b < K.size(); ++b)
    vals[b].assign(c.begin() + b * dim, c.begin() + (b + 1) * dim);
  return step_from_blocks(K.blocks, std::move(vals), dim, vn);
}

std::vector<double> step_to_coeffs(const StepFunction& f, const Partition& K) {
  std::vector<double> c;
  for (const auto& blk : K.blocks) {
    auto v = f.value_at(0.5 * (blk.start + blk.end));
    c.insert(c.end(), v.begin(), v.end());
  }
  return c;
}

using OperatorFn = std::function<StepFunction(const StepFunction&)>;

// Compresses the operator onto the block coefficients of an admissible
// pipeline and solves the reduced map; the residual that decides success is
// always re-measured on the full operator. Another round restarts with the
// candidate adjoined to the probe family and a tighter reduced tolerance.
FixedPointResult solve_reduced(const OperatorFn& apply, double eps,
                               const FNormSpec& norm, const MeasureSpace& space,
                               int max_iter) {
  std::vector<StepFunction> probes;
  StepFunction cur;
  for (int i = 0; i < 8; ++i) {
    cur = apply(cur);
    probes.push_back(cur);
  }
  int dim = 1;
  for (const auto& z : probes) dim = std::max(dim, z.dim);
  VectorNorm vn = probes.back().value_norm;

  int total_evals = 0;
  double tol = eps / 4.0;
  for (int round = 0; round < 5; ++round) {
    auto pipe = build_admissible_map(probes, eps / 2.0, norm, space);
    const Partition& K = pipe.averaging;
    int reduced = static_cast<int>(K.size()) * dim;
    if (reduced > 3)
      fail("dimension-limit",
           "the reduced problem needs " + std::to_string(reduced) +
               " coefficients; cap the averaging blocks or use an affine "
               "operator");

    BoxMap box;
    box.lo.assign(static_cast<std::size_t>(reduced), -pipe.radius);
    box.hi.assign(static_cast<std::size_t>(reduced), pipe.radius);
    box.map = [&](const std::vector<double>& c) {
      auto s = coeffs_to_step(K, c, dim, vn);
      return step_to_coeffs(apply_pipeline(pipe, space, apply(s)), K);
    };

    int remaining = max_iter - total_evals;
    if (remaining < 1)
      fail("budget-exhausted", "iteration budget exhausted between rounds");
    auto br = brouwer_solve(box, tol, remaining);
    total_evals += br.iterations;

    auto point = canonicalize(coeffs_to_step(K, br.point, dim, vn));
    double residual = fnorm(norm, sub(apply(point), point));
    if (residual < eps) return {point, residual, total_evals, br.method};

    // the norm grows monotonically with the coefficient error; squaring the
    // gap over-tightens safely for every shipped norm shape
    double gap = eps / residual;
    tol = std::max(tol * gap * gap / 4.0, 1e-15);
    probes.push_back(point);
    probes.push_back(apply(point));
  }
  fail("budget-exhausted", "no certified fixed point within the round budget");
}

}  // namespace

FixedPointResult approximate_fixed_point(const OperatorSpec& T, double eps,
                                         const FNormSpec& norm,
                                         const MeasureSpace& space,
                                         int max_iter) {
  validate_operator(T);
  validate_spec(norm);
  space.validate();
  if (!std::isfinite(eps) || !(eps > 0.0))
    fail("malformed-input", "eps must be positive and finite");
  if (max_iter < 1)
    fail("malformed-input", "iteration budget must be positive");

  if (const auto* a = std::get_if<AffineAverageOp>(&T.op)) {
    // averaging is linear and idempotent, so
    // offset + (lambda / (1 - lambda)) * average(offset) is fixed
    auto pc = partition_average(a->offset, a->averaging);
    auto point = canonicalize(
        add(a->offset, scale(pc, a->lambda / (1.0 - a->lambda))));
    double residual = fnorm(norm, sub(apply_operator(T, point), point));
    if (!(residual < eps))
      fail("budget-exhausted",
           "closed-form point cannot be certified at this eps");
    return {point, residual, 1, "linear"};
  }

  return solve_reduced(
      [&T](const StepFunction& h) { return apply_operator(T, h); }, eps, norm,
      space, max_iter);
}

FixedPointResult retract_fixed_point(const OperatorSpec& T,
                                     const OperatorSpec& retract, double eps,
                                     const FNormSpec& norm,
                                     const MeasureSpace& space, int max_iter) {
  validate_operator(T);
  validate_operator(retract);
  validate_spec(norm);
  space.validate();
  if (!std::isfinite(eps) || !(eps > 0.0))
    fail("malformed-input", "eps must be positive and finite");

  // the retraction must be idempotent where the solver will travel
  StepFunction zero;
  std::vector<StepFunction> samples;
  samples.push_back(zero);
  samples.push_back(apply_operator(T, apply_operator(retract, zero)));
  samples.push_back(
      apply_operator(T, apply_operator(retract, samples.back())));
  for (const auto& s : samples) {
    auto once = apply_operator(retract, s);
    auto twice = apply_operator(retract, once);
    double gap = fnorm(norm, sub(twice, once));
    if (gap > 1e-9 * (1.0 + fnorm(norm, once)))
      fail("idempotence-violation",
           "retraction is not idempotent on sampled points");
  }

  if (std::holds_alternative<IdentityOp>(retract.op))
    return approximate_fixed_point(T, eps, norm, space, max_iter);

  auto composed = [&](const StepFunction& h) {
    return apply_operator(T, apply_operator(retract, h));
  };
  auto inner = solve_reduced(composed, eps / 4.0, norm, space, max_iter);

  FixedPointResult out;
  out.point = canonicalize(apply_operator(retract, inner.point));
  out.iterations = inner.iterations;
  out.method = inner.method;
  out.residual = fnorm(norm, sub(apply_operator(T, out.point), out.point));
  if (!(out.residual < eps))
    fail("budget-exhausted", "retraction pass left the residual above eps");
  return out;
}

}  // namespace modularis
