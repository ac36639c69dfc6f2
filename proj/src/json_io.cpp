#include "modularis/json_io.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "modularis/errors.hpp"

namespace modularis {

namespace {

using nlohmann::json;

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail("malformed-input", "unparseable json document");
  return j;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    fail("malformed-input", std::string("missing field '") + key + "'");
  return j.at(key);
}

double number_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number())
    fail("malformed-input", std::string("field '") + key + "' must be a number");
  double x = v.get<double>();
  if (!std::isfinite(x))
    fail("malformed-input", std::string("field '") + key + "' must be finite");
  return x;
}

// number, or the string "inf"
double extended_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInf;
    fail("malformed-input",
         std::string("field '") + key + "' must be a number or \"inf\"");
  }
  if (!v.is_number())
    fail("malformed-input",
         std::string("field '") + key + "' must be a number or \"inf\"");
  return v.get<double>();
}

json extended_value(double x) {
  if (x == kInf) return json("inf");
  return json(x);
}

std::string string_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string())
    fail("malformed-input", std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> number_array(const json& v, const char* what) {
  if (!v.is_array())
    fail("malformed-input", std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& item : v) {
    if (!item.is_number())
      fail("malformed-input", std::string(what) + " must hold numbers");
    double x = item.get<double>();
    if (!std::isfinite(x))
      fail("malformed-input", std::string(what) + " must hold finite numbers");
    out.push_back(x);
  }
  return out;
}

const char* norm_name(VectorNorm n) {
  switch (n) {
    case VectorNorm::euclidean: return "euclidean";
    case VectorNorm::max: return "max";
    case VectorNorm::sum: return "sum";
  }
  fail("malformed-input", "unknown vector norm");
}

VectorNorm norm_from_name(const std::string& name) {
  if (name == "euclidean") return VectorNorm::euclidean;
  if (name == "max") return VectorNorm::max;
  if (name == "sum") return VectorNorm::sum;
  fail("malformed-input", "unknown value_norm '" + name + "'");
}

json phi_to_obj(const PhiFunction& phi) {
  json j;
  switch (phi.kind) {
    case PhiFunction::Kind::power:
      j["kind"] = "power";
      j["p"] = phi.p;
      break;
    case PhiFunction::Kind::exp_shift:
      j["kind"] = "exp-shift";
      break;
    case PhiFunction::Kind::piecewise_linear:
      j["kind"] = "piecewise-linear";
      j["knots"] = phi.knots;
      j["heights"] = phi.heights;
      j["barrier"] = phi.barrier;
      break;
  }
  return j;
}

PhiFunction phi_from_obj(const json& j) {
  std::string kind = string_field(j, "kind");
  if (kind == "power") return phi_power(number_field(j, "p"));
  if (kind == "exp-shift") return phi_exp_shift();
  if (kind == "piecewise-linear") {
    bool barrier = false;
    if (j.contains("barrier")) {
      if (!j.at("barrier").is_boolean())
        fail("malformed-input", "'barrier' must be a boolean");
      barrier = j.at("barrier").get<bool>();
    }
    return phi_piecewise_linear(number_array(field(j, "knots"), "'knots'"),
                                number_array(field(j, "heights"), "'heights'"),
                                barrier);
  }
  fail("malformed-input", "unknown phi kind '" + kind + "'");
}

const char* convexity_name(Convexity c) {
  switch (c) {
    case Convexity::plain: return "plain";
    case Convexity::s_convex: return "s-convex";
    case Convexity::convex: return "convex";
  }
  fail("malformed-input", "unknown convexity class");
}

Convexity convexity_from_name(const std::string& name) {
  if (name == "plain") return Convexity::plain;
  if (name == "s-convex") return Convexity::s_convex;
  if (name == "convex") return Convexity::convex;
  fail("malformed-input", "unknown convexity '" + name + "'");
}

json modular_to_obj(const Semimodular& rho) {
  json j;
  j["convexity"] = convexity_name(rho.convexity);
  j["s"] = rho.s;
  switch (rho.kind) {
    case Semimodular::Kind::orlicz:
      j["kind"] = "orlicz";
      j["phi"] = phi_to_obj(rho.phi);
      break;
    case Semimodular::Kind::musielak: {
      j["kind"] = "musielak";
      json zones = json::array();
      for (const auto& zone : rho.zones)
        zones.push_back({{"t_end", zone.t_end}, {"phi", phi_to_obj(zone.phi)}});
      j["zones"] = std::move(zones);
      break;
    }
    case Semimodular::Kind::custom_max: {
      j["kind"] = "custom-max";
      json parts = json::array();
      for (const auto& part : rho.parts) parts.push_back(modular_to_obj(part));
      j["parts"] = std::move(parts);
      break;
    }
  }
  return j;
}

Semimodular modular_from_obj(const json& j) {
  std::string kind = string_field(j, "kind");
  Convexity convexity = Convexity::plain;
  double s = 1.0;
  if (j.contains("convexity"))
    convexity = convexity_from_name(string_field(j, "convexity"));
  if (j.contains("s")) s = number_field(j, "s");

  if (kind == "orlicz")
    return orlicz_modular(phi_from_obj(field(j, "phi")), convexity, s);
  if (kind == "musielak") {
    const json& zv = field(j, "zones");
    if (!zv.is_array()) fail("malformed-input", "'zones' must be an array");
    std::vector<Semimodular::Zone> zones;
    for (const auto& item : zv)
      zones.push_back(
          {number_field(item, "t_end"), phi_from_obj(field(item, "phi"))});
    return musielak_modular(std::move(zones), convexity, s);
  }
  if (kind == "custom-max") {
    const json& pv = field(j, "parts");
    if (!pv.is_array()) fail("malformed-input", "'parts' must be an array");
    std::vector<Semimodular> parts;
    for (const auto& item : pv) parts.push_back(modular_from_obj(item));
    return max_combine(std::move(parts));
  }
  fail("malformed-input", "unknown modular kind '" + kind + "'");
}

json blocks_to_array(const std::vector<Block>& blocks) {
  json arr = json::array();
  for (const auto& b : blocks)
    arr.push_back({{"start", b.start}, {"end", b.end}});
  return arr;
}

Block block_from_obj(const json& j) {
  return {number_field(j, "start"), number_field(j, "end")};
}

json step_to_obj(const StepFunction& f) {
  json j;
  j["dim"] = f.dim;
  j["value_norm"] = norm_name(f.value_norm);
  json blocks = json::array();
  for (std::size_t i = 0; i < f.partition.blocks.size(); ++i) {
    const auto& b = f.partition.blocks[i];
    blocks.push_back(
        {{"start", b.start}, {"end", b.end}, {"value", f.values[i]}});
  }
  j["blocks"] = std::move(blocks);
  return j;
}

StepFunction step_from_obj(const json& j) {
  StepFunction f;
  const json& dim = field(j, "dim");
  if (!dim.is_number_integer() || dim.get<int>() < 1)
    fail("malformed-input", "'dim' must be a positive integer");
  f.dim = dim.get<int>();
  f.value_norm = norm_from_name(string_field(j, "value_norm"));
  const json& blocks = field(j, "blocks");
  if (!blocks.is_array()) fail("malformed-input", "'blocks' must be an array");
  for (const auto& item : blocks) {
    f.partition.blocks.push_back(block_from_obj(item));
    auto value = number_array(field(item, "value"), "'value'");
    if (static_cast<int>(value.size()) != f.dim)
      fail("malformed-input", "value length does not match dim");
    f.values.push_back(std::move(value));
  }
  return canonicalize(f);
}

Partition partition_from_obj(const json& j) {
  if (!j.is_array()) fail("malformed-input", "partition must be an array");
  Partition p;
  for (const auto& item : j) p.blocks.push_back(block_from_obj(item));
  validate_partition(p);
  return p;
}

}  // namespace

std::string to_json(const StepFunction& f) { return step_to_obj(f).dump(); }

StepFunction step_from_json(const std::string& text) {
  return step_from_obj(parse_text(text));
}

std::string to_json(const Partition& p) {
  return blocks_to_array(p.blocks).dump();
}

Partition partition_from_json(const std::string& text) {
  return partition_from_obj(parse_text(text));
}

std::string to_json(const MeasureSpace& space) {
  json j;
  j["alpha"] = extended_value(space.alpha);
  j["exhaustion"] = space.exhaustion;
  return j.dump();
}

MeasureSpace space_from_json(const std::string& text) {
  json j = parse_text(text);
  MeasureSpace space;
  space.alpha = extended_field(j, "alpha");
  space.exhaustion = number_array(field(j, "exhaustion"), "'exhaustion'");
  space.validate();
  return space;
}

std::string to_json(const PhiFunction& phi) { return phi_to_obj(phi).dump(); }

PhiFunction phi_from_json(const std::string& text) {
  return phi_from_obj(parse_text(text));
}

std::string to_json(const Semimodular& rho) {
  return modular_to_obj(rho).dump();
}

Semimodular modular_from_json(const std::string& text) {
  auto rho = modular_from_obj(parse_text(text));
  validate_semimodular(rho);
  return rho;
}

std::string to_json(const Binder& b) {
  json j;
  j["arity"] = b.arity;
  switch (b.kind) {
    case Binder::Kind::max:
      j["kind"] = "max";
      break;
    case Binder::Kind::lp:
      j["kind"] = "lp";
      j["p"] = b.p;
      break;
    case Binder::Kind::wsum:
      j["kind"] = "wsum";
      j["weights"] = b.weights;
      break;
  }
  return j.dump();
}

Binder binder_from_json(const std::string& text) {
  json j = parse_text(text);
  std::string kind = string_field(j, "kind");
  int arity = 2;
  if (j.contains("arity")) {
    const json& a = j.at("arity");
    if (!a.is_number_integer() || a.get<int>() < 2)
      fail("malformed-input", "'arity' must be an integer of at least 2");
    arity = a.get<int>();
  }
  if (kind == "max") return max_binder(arity);
  if (kind == "lp") return lp_binder(number_field(j, "p"), arity);
  if (kind == "wsum")
    return wsum_binder(number_array(field(j, "weights"), "'weights'"));
  fail("malformed-input", "unknown binder kind '" + kind + "'");
}

std::string to_json(const SymmetricNorm& E) {
  json j;
  j["order_continuous"] = E.order_continuous;
  j["alpha"] = extended_value(E.alpha);
  switch (E.kind) {
    case SymmetricNorm::Kind::lp:
      j["kind"] = "lp";
      j["p"] = extended_value(E.p);
      break;
    case SymmetricNorm::Kind::orlicz_luxemburg:
      j["kind"] = "orlicz";
      j["phi"] = phi_to_obj(E.phi);
      break;
    case SymmetricNorm::Kind::lorentz:
      j["kind"] = "lorentz";
      j["q"] = E.q;
      break;
  }
  return j.dump();
}

SymmetricNorm symmetric_from_json(const std::string& text) {
  json j = parse_text(text);
  std::string kind = string_field(j, "kind");
  double alpha = j.contains("alpha") ? extended_field(j, "alpha") : kInf;
  SymmetricNorm E;
  if (kind == "lp") {
    E = lp_space(extended_field(j, "p"), alpha);
  } else if (kind == "orlicz") {
    E = orlicz_space(phi_from_obj(field(j, "phi")), alpha);
  } else if (kind == "lorentz") {
    E = lorentz_space(number_field(j, "q"), alpha);
  } else {
    fail("malformed-input", "unknown symmetric norm kind '" + kind + "'");
  }
  if (j.contains("order_continuous")) {
    const json& oc = j.at("order_continuous");
    if (!oc.is_boolean())
      fail("malformed-input", "'order_continuous' must be a boolean");
    E.order_continuous = oc.get<bool>();
  }
  validate_symmetric(E);
  return E;
}

std::vector<StepFunction> family_from_json(const std::string& text) {
  json j = parse_text(text);
  if (!j.is_array()) fail("malformed-input", "family must be a JSON array");
  std::vector<StepFunction> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(step_from_obj(item));
  return out;
}

std::vector<Partition> chain_from_json(const std::string& text) {
  json j = parse_text(text);
  if (!j.is_array()) fail("malformed-input", "chain must be a JSON array");
  std::vector<Partition> out;
  out.reserve(j.size());
  for (const auto& item : j) out.push_back(partition_from_obj(item));
  return out;
}

std::string to_json(const OperatorSpec& T) {
  json j;
  if (const auto* a = std::get_if<AffineAverageOp>(&T.op)) {
    j["kind"] = "affine-average";
    j["offset"] = step_to_obj(a->offset);
    j["lambda"] = a->lambda;
    j["averaging"] = blocks_to_array(a->averaging.blocks);
  } else if (const auto* s = std::get_if<SinDampedOp>(&T.op)) {
    j["kind"] = "sin-damped";
    j["offset"] = step_to_obj(s->offset);
    j["gamma"] = s->gamma;
    j["averaging"] = blocks_to_array(s->averaging.blocks);
  } else if (const auto* r = std::get_if<RadialOp>(&T.op)) {
    j["kind"] = "radial";
    j["a"] = r->a;
  } else if (std::get_if<IdentityOp>(&T.op)) {
    j["kind"] = "identity";
  } else {
    j["kind"] = "external";
    j["command"] = std::get<ExternalOp>(T.op).command;
  }
  j["range_bound"] = T.range_bound;
  if (T.continuity_bound) j["continuity_bound"] = *T.continuity_bound;
  return j.dump();
}

OperatorSpec operator_from_json(const std::string& text) {
  json j = parse_text(text);
  std::string kind = string_field(j, "kind");
  OperatorSpec T;
  if (kind == "affine-average") {
    T = affine_operator(step_from_obj(field(j, "offset")),
                        number_field(j, "lambda"),
                        partition_from_obj(field(j, "averaging")));
  } else if (kind == "sin-damped") {
    T = sin_operator(step_from_obj(field(j, "offset")),
                     number_field(j, "gamma"),
                     partition_from_obj(field(j, "averaging")));
  } else if (kind == "radial") {
    T = radial_operator(number_field(j, "a"));
  } else if (kind == "identity") {
    T = identity_operator();
  } else if (kind == "external") {
    T = external_operator(string_field(j, "command"));
  } else {
    fail("malformed-input", "unknown operator kind '" + kind + "'");
  }
  if (j.contains("range_bound"))
    T.range_bound = number_field(j, "range_bound");
  if (j.contains("continuity_bound"))
    T.continuity_bound = number_field(j, "continuity_bound");
  validate_operator(T);
  return T;
}

std::string to_json(const FixedPointResult& r) {
  json j;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["point"] = step_to_obj(r.point);
  return j.dump();
}

std::string to_json(const ModularReport& report) {
  json j;
  j["checks"] = report.checks;
  j["pass"] = report.pass();
  json v = json::array();
  for (const auto& item : report.violations)
    v.push_back({{"axiom", item.axiom},
                 {"detail", item.detail},
                 {"lhs", item.lhs},
                 {"rhs", item.rhs}});
  j["violations"] = std::move(v);
  return j.dump();
}

std::string to_json(const BinderReport& report) {
  json j;
  j["checks"] = report.checks;
  j["pass"] = report.pass();
  json v = json::array();
  for (const auto& item : report.violations)
    v.push_back({{"lo", item.lo},
                 {"hi", item.hi},
                 {"f_lo", item.f_lo},
                 {"f_hi", item.f_hi}});
  j["violations"] = std::move(v);
  return j.dump();
}

std::string to_json(const FNormAxiomReport& report) {
  json j;
  j["checks"] = report.checks;
  j["pass"] = report.pass();
  json v = json::array();
  for (const auto& item : report.violations)
    v.push_back({{"axiom", item.axiom},
                 {"detail", item.detail},
                 {"lhs", item.lhs},
                 {"rhs", item.rhs}});
  j["violations"] = std::move(v);
  return j.dump();
}

}  // namespace modularis
