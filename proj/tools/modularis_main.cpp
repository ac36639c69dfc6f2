#include <climits>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "modularis/approximation.hpp"
#include "modularis/errors.hpp"
#include "modularis/fixed_point.hpp"
#include "modularis/fnorm.hpp"
#include "modularis/json_io.hpp"
#include "modularis/measure.hpp"
#include "modularis/modular.hpp"
#include "modularis/symmetric.hpp"

using namespace modularis;

namespace {

// misuse of the tool itself; distinct from domain errors raised by the data
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + path);
  out << text;
}

int env_max_iters(int fallback) {
  const char* v = std::getenv("MODULARIS_MAX_ITERS");
  if (!v || *v == '\0') return fallback;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1)
    throw UsageError("MODULARIS_MAX_ITERS must be a positive integer");
  return n > INT_MAX ? INT_MAX : static_cast<int>(n);
}

std::string json_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') {
      out.push_back('\\');
      out.push_back(c);
    } else if (c == '\n') {
      out += "\\n";
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      out += buf;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

struct NormOptions {
  std::vector<std::string> modular_paths;
  std::string binder = "max";
  double binder_p = 1.0;
  std::vector<double> weights;
  std::string mode = "fnorm";
  double s = 1.0;
  double tol = 1e-9;
};

void add_norm_options(CLI::App* cmd, NormOptions& o) {
  cmd->add_option("--modular", o.modular_paths,
                  "semimodular JSON file (repeat for several)")
      ->required();
  cmd->add_option("--binder", o.binder,
                  "binder: max, lp, wsum, or a JSON file path");
  cmd->add_option("--binder-p", o.binder_p, "exponent for the lp binder");
  cmd->add_option("--weights", o.weights, "weights for the wsum binder")
      ->delimiter(',');
  cmd->add_option("--mode", o.mode, "fnorm or snorm")
      ->check(CLI::IsMember({"fnorm", "snorm"}));
  cmd->add_option("--s", o.s, "shared convexity exponent for snorm mode");
  cmd->add_option("--tol", o.tol, "scale search tolerance");
}

FNormSpec build_norm(const NormOptions& o) {
  std::vector<Semimodular> modulars;
  for (const auto& path : o.modular_paths)
    modulars.push_back(modular_from_json(slurp(path)));
  int arity = static_cast<int>(modulars.size()) + 1;
  Binder binder;
  if (o.binder == "max") {
    binder = max_binder(arity);
  } else if (o.binder == "lp") {
    binder = lp_binder(o.binder_p, arity);
  } else if (o.binder == "wsum") {
    auto w = o.weights;
    if (w.empty()) w.assign(static_cast<std::size_t>(arity), 1.0);
    binder = wsum_binder(std::move(w));
  } else {
    binder = binder_from_json(slurp(o.binder));
  }
  SearchParams search;
  search.tol = o.tol;
  search.max_iter = env_max_iters(search.max_iter);
  if (o.mode == "snorm")
    return make_snorm_spec(std::move(modulars), std::move(binder), o.s,
                           search);
  return make_fnorm_spec(std::move(modulars), std::move(binder), search);
}

// deterministic dyadic samples for the verify suites
StepFunction sample_step(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_int_distribution<int> width(1, 64);
  std::uniform_int_distribution<int> height(-32, 32);
  int blocks = count(rng);
  StepFunction f;
  double t = 0.0;
  for (int i = 0; i < blocks; ++i) {
    double next = t + width(rng) / 64.0;
    f.partition.blocks.push_back({t, next});
    f.values.push_back({height(rng) / 16.0});
    t = next;
  }
  return canonicalize(f);
}

std::vector<StepFunction> sample_family(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<StepFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample_step(rng));
  return out;
}

struct NormCmd {
  NormOptions norm;
  std::string fn_path;
  std::string output;
};

int run_norm(const NormCmd& cmd) {
  auto spec = build_norm(cmd.norm);
  auto f = step_from_json(slurp(cmd.fn_path));
  double value =
      spec.mode == NormMode::snorm ? snorm(spec, f) : fnorm(spec, f);
  write_out(cmd.output, fmt(value) + "\n");
  return 0;
}

struct ApproxCmd {
  NormOptions norm;
  std::string family_path;
  std::string space_path;
  double eps = 0.0;
  double radius = 0.0;
  int max_blocks = 0;
  bool has_radius = false;
  bool has_max_blocks = false;
  std::string output;
};

int run_approx(const ApproxCmd& cmd) {
  auto spec = build_norm(cmd.norm);
  auto space = space_from_json(slurp(cmd.space_path));
  auto family = family_from_json(slurp(cmd.family_path));
  PipelineOptions opts;
  if (cmd.has_radius) opts.radius = cmd.radius;
  if (cmd.has_max_blocks) opts.max_blocks = cmd.max_blocks;
  auto pipe = build_admissible_map(family, cmd.eps, spec, space, opts);
  std::string csv = "stage,parameter,sup_error\n";
  csv += "truncation," + std::to_string(pipe.n) + "," +
         fmt(pipe.report.truncation_error) + "\n";
  csv += "radial," + fmt(pipe.radius) + "," + fmt(pipe.report.radial_error) +
         "\n";
  csv += "averaging," + std::to_string(pipe.averaging.size()) + "," +
         fmt(pipe.report.averaging_error) + "\n";
  csv += "total,," + fmt(pipe.report.total_error) + "\n";
  write_out(cmd.output, csv);
  return 0;
}

struct RearrangeCmd {
  std::string fn_path;
  int points = 32;
  std::string output;
};

int run_rearrange(const RearrangeCmd& cmd) {
  auto x = canonicalize(step_from_json(slurp(cmd.fn_path)));
  auto rearr = decreasing_rearrangement(x);
  std::string csv = "t,xstar,xstarstar\n";
  double extent = x.extent();
  for (int i = 0; i < cmd.points; ++i) {
    double t = extent * (i + 1) / cmd.points;
    if (!(t > 0.0)) continue;
    double xstar = rearr.value_at(t).at(0);
    double xstarstar = maximal_function(x, t);
    csv += fmt(t) + "," + fmt(xstar) + "," + fmt(xstarstar) + "\n";
  }
  write_out(cmd.output, csv);
  return 0;
}

struct MapCmd {
  std::string symmetric_path;
  std::string fn_path;
  std::string chain_path;
  int dyadic_levels = 0;
  std::string output;
};

int run_map(const MapCmd& cmd) {
  auto E = symmetric_from_json(slurp(cmd.symmetric_path));
  auto x = canonicalize(step_from_json(slurp(cmd.fn_path)));
  std::vector<Partition> chain;
  if (!cmd.chain_path.empty()) {
    chain = chain_from_json(slurp(cmd.chain_path));
  } else {
    for (int j = 0; j < cmd.dyadic_levels; ++j)
      chain.push_back(uniform_partition(x.extent(), 1 << j));
  }
  auto rows = map_convergence_experiment(E, x, chain);
  std::string csv = "level,error\n";
  for (const auto& row : rows)
    csv += std::to_string(row.level) + "," + fmt(row.error) + "\n";
  write_out(cmd.output, csv);
  return 0;
}

struct FixpointCmd {
  NormOptions norm;
  std::string operator_path;
  std::string retract_path;
  std::string space_path;
  double eps = 0.0;
  std::string output;
};

int run_fixpoint(const FixpointCmd& cmd) {
  auto T = operator_from_json(slurp(cmd.operator_path));
  auto spec = build_norm(cmd.norm);
  auto space = space_from_json(slurp(cmd.space_path));
  int max_iter = env_max_iters(20000);
  FixedPointResult result;
  if (cmd.retract_path.empty()) {
    result = approximate_fixed_point(T, cmd.eps, spec, space, max_iter);
  } else {
    auto retract = operator_from_json(slurp(cmd.retract_path));
    result = retract_fixed_point(T, retract, cmd.eps, spec, space, max_iter);
  }
  write_out(cmd.output, to_json(result) + "\n");
  return 0;
}

struct VerifyCmd {
  std::string suite;
  std::uint64_t seed = 1;
  int samples = 50;
  int trials = 200;
  std::string modular_path;
  std::string binder = "max";
  double binder_p = 1.0;
  std::string output;
};

int run_verify(const VerifyCmd& cmd) {
  std::string report;
  bool pass = false;
  if (cmd.suite == "fnorm-axioms") {
    Semimodular rho = cmd.modular_path.empty()
                          ? orlicz_modular(phi_power(2.0), Convexity::convex)
                          : modular_from_json(slurp(cmd.modular_path));
    auto spec = make_fnorm_spec({std::move(rho)}, max_binder(2));
    auto samples = sample_family(cmd.seed, cmd.samples);
    std::vector<double> scalars{0.5, -1.0, 2.0, 0.25, -0.75, 1.5};
    auto r = verify_fnorm_axioms(spec, samples, scalars);
    pass = r.pass();
    report = to_json(r);
  } else if (cmd.suite == "modular-axioms") {
    Semimodular rho = cmd.modular_path.empty()
                          ? orlicz_modular(phi_power(2.0), Convexity::convex)
                          : modular_from_json(slurp(cmd.modular_path));
    auto samples = sample_family(cmd.seed, cmd.samples);
    auto r = verify_semimodular(rho, samples, cmd.trials, cmd.seed);
    pass = r.pass();
    report = to_json(r);
  } else {
    Binder binder = cmd.binder == "lp" ? lp_binder(cmd.binder_p, 2)
                                       : max_binder(2);
    auto r = verify_binder_monotone(binder, cmd.trials, cmd.seed);
    pass = r.pass();
    report = to_json(r);
  }
  std::string out = cmd.output.empty() ? cmd.suite + "-report.json"
                                       : cmd.output;
  std::string envelope = "{\"suite\":\"" + cmd.suite + "\",\"seed\":" +
                         std::to_string(cmd.seed) + ",\"report\":" + report +
                         "}\n";
  write_out(out, envelope);
  if (!pass) fail("axiom-violation", "suite " + cmd.suite + " found violations");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"step function norms, approximation pipelines, rearrangements "
               "and fixed points on modular function spaces"};
  app.require_subcommand(1);

  NormCmd norm_cmd;
  auto* norm_app = app.add_subcommand("norm", "evaluate a norm on a function");
  add_norm_options(norm_app, norm_cmd.norm);
  norm_app->add_option("--fn", norm_cmd.fn_path, "step function JSON file")
      ->required();
  norm_app->add_option("--output", norm_cmd.output, "output file (default stdout)");

  ApproxCmd approx_cmd;
  auto* approx_app =
      app.add_subcommand("approx", "certify a finite-rank approximation map");
  add_norm_options(approx_app, approx_cmd.norm);
  approx_app->add_option("--family", approx_cmd.family_path,
                         "JSON array of step functions")
      ->required();
  approx_app->add_option("--space", approx_cmd.space_path,
                         "measure space JSON file")
      ->required();
  approx_app->add_option("--eps", approx_cmd.eps, "certification budget")
      ->required();
  auto* radius_opt = approx_app->add_option("--radius", approx_cmd.radius,
                                            "override the retraction radius");
  auto* blocks_opt = approx_app->add_option(
      "--max-blocks", approx_cmd.max_blocks, "cap the averaging block count");
  approx_app->add_option("--output", approx_cmd.output, "CSV output file");

  RearrangeCmd rearrange_cmd;
  auto* rearrange_app = app.add_subcommand(
      "rearrange", "sample the decreasing rearrangement and maximal function");
  rearrange_app
      ->add_option("--fn", rearrange_cmd.fn_path, "step function JSON file")
      ->required();
  rearrange_app->add_option("--points", rearrange_cmd.points,
                            "number of sample points")
      ->check(CLI::PositiveNumber);
  rearrange_app->add_option("--output", rearrange_cmd.output,
                            "CSV output file");

  MapCmd map_cmd;
  auto* map_app = app.add_subcommand(
      "map", "averaging map convergence along a refinement chain");
  map_app->add_option("--symmetric", map_cmd.symmetric_path,
                      "symmetric norm JSON file")
      ->required();
  map_app->add_option("--fn", map_cmd.fn_path, "step function JSON file")
      ->required();
  auto* chain_opt = map_app->add_option("--chain", map_cmd.chain_path,
                                        "JSON array of partitions");
  auto* dyadic_opt =
      map_app->add_option("--dyadic", map_cmd.dyadic_levels,
                          "levels of uniform dyadic partitions instead")
          ->check(CLI::PositiveNumber);
  chain_opt->excludes(dyadic_opt);
  map_app->add_option("--output", map_cmd.output, "CSV output file");

  FixpointCmd fixpoint_cmd;
  auto* fixpoint_app =
      app.add_subcommand("fixpoint", "approximate fixed point of an operator");
  add_norm_options(fixpoint_app, fixpoint_cmd.norm);
  fixpoint_app->add_option("--operator", fixpoint_cmd.operator_path,
                           "operator JSON file")
      ->required();
  fixpoint_app->add_option("--retract", fixpoint_cmd.retract_path,
                           "retraction operator JSON file");
  fixpoint_app->add_option("--space", fixpoint_cmd.space_path,
                           "measure space JSON file")
      ->required();
  fixpoint_app->add_option("--eps", fixpoint_cmd.eps, "residual target")
      ->required();
  fixpoint_app->add_option("--output", fixpoint_cmd.output,
                           "output file (default stdout)");

  VerifyCmd verify_cmd;
  auto* verify_app =
      app.add_subcommand("verify", "run a property suite and write a report");
  verify_app->add_option("--suite", verify_cmd.suite, "property suite")
      ->required()
      ->check(CLI::IsMember(
          {"fnorm-axioms", "modular-axioms", "binder-monotone"}));
  verify_app->add_option("--seed", verify_cmd.seed, "sample seed");
  verify_app->add_option("--samples", verify_cmd.samples,
                         "number of sampled functions")
      ->check(CLI::PositiveNumber);
  verify_app->add_option("--trials", verify_cmd.trials,
                         "number of random trials")
      ->check(CLI::PositiveNumber);
  verify_app->add_option("--modular", verify_cmd.modular_path,
                         "semimodular JSON file (default Orlicz u^2)");
  verify_app->add_option("--binder", verify_cmd.binder,
                         "binder for binder-monotone: max or lp");
  verify_app->add_option("--binder-p", verify_cmd.binder_p,
                         "exponent for the lp binder");
  verify_app->add_option("--output", verify_cmd.output,
                         "report file (default <suite>-report.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (norm_app->parsed()) return run_norm(norm_cmd);
    if (approx_app->parsed()) {
      approx_cmd.has_radius = radius_opt->count() > 0;
      approx_cmd.has_max_blocks = blocks_opt->count() > 0;
      return run_approx(approx_cmd);
    }
    if (rearrange_app->parsed()) return run_rearrange(rearrange_cmd);
    if (map_app->parsed()) return run_map(map_cmd);
    if (fixpoint_app->parsed()) return run_fixpoint(fixpoint_cmd);
    if (verify_app->parsed()) return run_verify(verify_cmd);
    return 2;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"message\":\"%s\"}\n",
                 e.code().c_str(), json_escape(e.what()).c_str());
    return 1;
  }
}
