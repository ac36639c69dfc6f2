#pragma once

#include <string>
#include <vector>

#include "modularis/fixed_point.hpp"
#include "modularis/fnorm.hpp"
#include "modularis/measure.hpp"
#include "modularis/modular.hpp"
#include "modularis/symmetric.hpp"

namespace modularis {

// Serialization round-trips exactly: parse(serialize(v)) reproduces every
// field bit for bit. Numbers use shortest round-trip decimal form; infinite
// values appear as the string "inf". Parsers validate and throw DomainError
// with code malformed-input on any structural problem.

// {"dim": d, "value_norm": "euclidean"|"max"|"sum",
//  "blocks": [{"start": a, "end": b, "value": [d floats]}, ...]}
std::string to_json(const StepFunction& f);
StepFunction step_from_json(const std::string& text);

// [{"start": a, "end": b}, ...]
std::string to_json(const Partition& p);
Partition partition_from_json(const std::string& text);

// {"alpha": number|"inf", "exhaustion": [t1, t2, ...]}
std::string to_json(const MeasureSpace& space);
MeasureSpace space_from_json(const std::string& text);

// {"kind": "power", "p": 2.0} | {"kind": "exp-shift", "p": 1.0} |
// {"kind": "piecewise-linear", "knots": [...], "heights": [...],
//  "barrier": bool}
std::string to_json(const PhiFunction& phi);
PhiFunction phi_from_json(const std::string& text);

// {"kind": "orlicz", "phi": {...}, "convexity": "convex"} |
// {"kind": "musielak", "zones": [{"t_end": .., "phi": {...}}, ...], ...} |
// {"kind": "custom-max", "parts": [specs], ...}
// s-convex instances carry {"convexity": "s-convex", "s": 0.5}.
std::string to_json(const Semimodular& rho);
Semimodular modular_from_json(const std::string& text);

// {"kind": "max"} | {"kind": "lp", "p": 1.0} |
// {"kind": "wsum", "weights": [...]}; optional "arity" (default 2)
std::string to_json(const Binder& b);
Binder binder_from_json(const std::string& text);

// {"kind": "lp"|"orlicz"|"lorentz", "p": number|"inf", "phi": {...},
//  "q": number, "order_continuous": bool, "alpha": number|"inf"}
std::string to_json(const SymmetricNorm& E);
SymmetricNorm symmetric_from_json(const std::string& text);

// bare JSON arrays of the member documents
std::vector<StepFunction> family_from_json(const std::string& text);
std::vector<Partition> chain_from_json(const std::string& text);

// {"kind": "affine-average", "offset": {...}, "lambda": l, "averaging":
//  [...]} | {"kind": "sin-damped", "offset": {...}, "gamma": g,
//  "averaging": [...]} | {"kind": "radial", "a": a} | {"kind": "identity"} |
// {"kind": "external", "command": "..."}; optional "range_bound" and
// "continuity_bound" override the factory defaults.
std::string to_json(const OperatorSpec& T);
OperatorSpec operator_from_json(const std::string& text);

// {"method": "...", "iterations": n, "residual": r, "point": {...}}
std::string to_json(const FixedPointResult& r);

// {"checks": n, "pass": bool, "violations": [...]} with per-kind witness
// fields inside each violation
std::string to_json(const ModularReport& report);
std::string to_json(const BinderReport& report);
std::string to_json(const FNormAxiomReport& report);

}  // namespace modularis
