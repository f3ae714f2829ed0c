#pragma once

// Scenario files: an INI-like text format describing a domain, a medium, the
// solver tolerances and the pipeline stages.
//
//   name = "rotating-disk"
//   seed = 7
//
//   [domain]
//   R = 1 [length]
//   n = 16 [count]
//
//   [medium]
//   model = zermelo                      # zermelo | linearized | direct
//   c = "2 - r" [speed]                  # "expr" | const(c0) | linear(c0, k) | quadratic(c0, k)
//   W = const(0.5, 0) [speed]            # zero | const(a, b) | vortex(s) | grad("expr") | field("e1", "e2")
//   metric = conformal                   # conformal (c⁻²e) | euclidean (requires c = const(1))
//   beta = zero [slowness]               # direct only: zero | const(a, b) | rotational(s) | grad("expr") | field("e1", "e2")
//   phi = bump(0.3) [time]               # "expr" | bump(A) | zero; adds dφ to β
//
//   [solver]
//   rtol = 1e-9
//   sweep = 720 [count]
//
//   [pipeline]
//   stages = simulate, decompose         # simulate | decompose | invert
//   noise = 0 [time]
//
// Unit annotations are optional; when present they must match the key's unit.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randers/expression.hpp"
#include "randers/fields.hpp"
#include "randers/finsler.hpp"
#include "randers/geodesics.hpp"
#include "randers/recovery.hpp"
#include "randers/zermelo.hpp"

namespace randers {

// A field value: an expression, a preset call or a bare preset word.
struct FieldChoice {
    std::string kind;  // "expr" or a preset name
    std::vector<double> numbers;
    std::vector<std::string> expressions;

    bool operator==(const FieldChoice&) const = default;
};

struct DomainConfig {
    double R = 1.0;
    std::size_t n = 16;
    double hole_radius = 0.0;
    bool operator==(const DomainConfig&) const = default;
};

struct MediumConfig {
    std::string model = "zermelo";
    FieldChoice c{"const", {1.0}, {}};
    FieldChoice W{"zero", {}, {}};
    std::string metric = "conformal";
    FieldChoice beta{"zero", {}, {}};
    FieldChoice phi{"zero", {}, {}};
    bool operator==(const MediumConfig&) const = default;
};

struct PipelineConfig {
    std::vector<std::string> stages{"simulate"};
    double noise = 0.0;
    bool operator==(const PipelineConfig&) const = default;

    bool has(const std::string& stage) const;
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 0;
    DomainConfig domain;
    MediumConfig medium;
    SolverOptions solver;
    PipelineConfig pipeline;

    bool operator==(const ScenarioConfig&) const = default;
};

// Throws ParseError (syntax, unknown section/key/preset, bad value) and
// UnitError, each carrying the line and column.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& file);
// Canonical form: every key, fixed order, shortest round-trip numbers, units.
std::string emit_config(const ScenarioConfig& config);

struct BuiltScenario {
    ScenarioConfig config;
    Domain domain;
    ScalarField c;
    bool radial;
    std::optional<MediumModel> medium;  // zermelo and linearized models
    RandersSpec spec;                   // including dφ
    std::optional<ScalarField> phi;
    std::optional<RadialProfile> profile;

    Scenario scenario() const;
};

// Throws ConstructionError when the medium yields no valid Randers norm.
BuiltScenario build_scenario(const ScenarioConfig& config);

// Field catalog entries for the presets, shared with the tests.
ScalarField make_speed(const FieldChoice& choice);
OneFormField make_form(const FieldChoice& choice);
std::optional<ScalarField> make_potential(const FieldChoice& choice, double R);

}  // namespace randers
