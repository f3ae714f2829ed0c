#include "randers/cli.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "randers/boundary_data.hpp"
#include "randers/config.hpp"
#include "randers/errors.hpp"
#include "randers/geodesics.hpp"
#include "randers/numeric_text.hpp"
#include "randers/recovery.hpp"

namespace randers {

namespace {

namespace fs = std::filesystem;

class UsageError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "usage"; }
};

ScenarioConfig config_at(const CommandLine& cmd, std::size_t k) {
    ScenarioConfig cfg = load_config(cmd.configs.at(k));
    if (cmd.seed) cfg.seed = *cmd.seed;
    return cfg;
}

void require_configs(const CommandLine& cmd, std::size_t count) {
    if (cmd.configs.size() != count)
        throw UsageError("'" + cmd.command + "' takes " + std::to_string(count) + " --config file(s), got " +
                         std::to_string(cmd.configs.size()));
}

fs::path output_dir(const CommandLine& cmd) {
    fs::path dir(cmd.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot open " + file.string() + " for writing");
    out << text;
    if (!out) throw IoError("write to " + file.string() + " failed");
}

BoundaryDistanceData simulate(const BuiltScenario& s, std::ostream& log) {
    const auto points = sample_boundary(s.domain, s.config.domain.n);
    BoundaryDistanceData data = distance_matrix(s.spec, points, s.config.solver);
    if (s.config.pipeline.noise > 0.0) data = add_noise(data, s.config.pipeline.noise, s.config.seed);
    log << "simulated " << data.size() << "x" << data.size() << " boundary distances for '" << s.config.name
        << "' (spec " << data.spec_hash << ")\n";
    return data;
}

void write_decomposition(const BoundaryDistanceData& data, const fs::path& dir) {
    const Decomposition dec = decompose(data);
    save_matrix(dec.sym, data.angles, data.radius, data.spec_hash, (dir / "symmetric.csv").string(), "part=sym");
    save_matrix(dec.anti, data.angles, data.radius, data.spec_hash, (dir / "beta_integrals.csv").string(), "part=anti");
}

void write_profile(const RecoveredProfile& p, const std::string& hash, const fs::path& file) {
    std::ostringstream out;
    out << "# recovered profile spec=" << hash << " points=" << p.radius.size() << "\n"
        << "r,c\n";
    for (std::size_t k = 0; k < p.radius.size(); ++k)
        out << full_precision(p.radius[k]) << "," << full_precision(p.speed[k]) << "\n";
    write_text(file, out.str());
}

int cmd_simulate(const CommandLine& cmd, std::ostream& log) {
    require_configs(cmd, 1);
    const BuiltScenario s = build_scenario(config_at(cmd, 0));
    const fs::path dir = output_dir(cmd);
    const BoundaryDistanceData data = simulate(s, log);
    save(data, (dir / "distances.csv").string());
    write_text(dir / "scenario.cfg", emit_config(s.config));
    if (s.config.pipeline.has("decompose")) write_decomposition(data, dir);
    if (s.config.pipeline.has("invert")) {
        const RecoveredProfile p = herglotz_invert(decompose(data).sym, data.angles, data.radius);
        write_profile(p, data.spec_hash, dir / "profile.csv");
    }
    return exit_ok;
}

int cmd_decompose(const CommandLine& cmd, std::ostream& log) {
    BoundaryDistanceData data;
    if (cmd.data.size() == 1 && cmd.configs.empty()) {
        data = load(cmd.data.front());
        log << "loaded " << data.size() << "x" << data.size() << " boundary distances from " << cmd.data.front() << "\n";
    } else if (cmd.data.empty()) {
        require_configs(cmd, 1);
        data = simulate(build_scenario(config_at(cmd, 0)), log);
    } else {
        throw UsageError("'decompose' takes either one --data file or one --config file");
    }
    write_decomposition(data, output_dir(cmd));
    return exit_ok;
}

int cmd_recover(const CommandLine& cmd, std::ostream& log) {
    require_configs(cmd, 2);
    if (!cmd.data.empty() && cmd.data.size() != 2) throw UsageError("'recover' takes zero or two --data files");
    const ScenarioConfig c1 = config_at(cmd, 0), c2 = config_at(cmd, 1);
    const BuiltScenario b1 = build_scenario(c1), b2 = build_scenario(c2);

    Scenario s1 = b1.scenario(), s2 = b2.scenario();
    s1.potential.reset();
    // Ground-truth gauge only when the two media differ by their potentials alone.
    MediumConfig m1 = c1.medium, m2 = c2.medium;
    m1.phi = m2.phi = FieldChoice{"zero", {}, {}};
    if (m1 == m2 && c1.domain == c2.domain) {
        if (b1.phi && b2.phi) {
            const ScalarField p1 = *b1.phi, p2 = *b2.phi;
            s2.potential = ScalarField([p1, p2](const Vec2& x) { return p2.jet(x) - p1.jet(x); },
                                       p2.description() + " - " + p1.description());
        } else if (b1.phi) {
            s2.potential = ScalarField([p = *b1.phi](const Vec2& x) { return -p.jet(x); }, "-" + b1.phi->description());
        } else if (!b2.phi) {
            s2.potential = catalog::constant(0.0);
        }
    } else {
        s2.potential.reset();
    }

    RigidityOptions options;
    options.n = c1.domain.n;
    options.solver = c1.solver;
    options.noise_sigma = c1.pipeline.noise;
    options.seed = c1.seed;
    std::optional<BoundaryDistanceData> d1, d2;
    if (cmd.data.size() == 2) {
        d1 = load(cmd.data[0]);
        d2 = load(cmd.data[1]);
    }
    const RecoveryReport report = rigidity_report(s1, s2, options, d1, d2);
    write_report(report, output_dir(cmd).string());
    log << "recover: verdict=" << (report.verdict ? "true" : "false")
        << " clause_i=" << (report.verdicts.clause_i ? "true" : "false")
        << " clause_ii=" << (report.verdicts.clause_ii ? "true" : "false") << "\n";
    if (report.hypothesis_violation) {
        log << "hypothesis violated: " << *report.hypothesis_violation << "\n";
        return exit_hypothesis;
    }
    return report.verdicts.equivalence_consistent ? exit_ok : exit_internal;
}

struct CheckLine {
    std::string name;
    double value;
    double threshold;
    bool passed;
    std::string detail;
};

int cmd_verify(const CommandLine& cmd, std::ostream& log) {
    require_configs(cmd, 1);
    const BuiltScenario s = build_scenario(config_at(cmd, 0));
    const RandersSpec& F = s.spec;
    const double R = s.domain.radius();
    const GeodesicSolver solver(F, s.config.solver);

    const double closedness = closedness_residual(F.oneform(), s.domain.probe_grid(1000));
    const bool closed = closedness <= 1e-8;
    std::vector<CheckLine> checks;

    const ValidityReport axioms = validate_norm(F, default_probes(s.domain));
    checks.push_back({"norm_axioms", axioms.convexity_margin, 0.0, axioms.ok,
                      "positivity=" + shortest(axioms.positivity_margin) +
                          " homogeneity=" + shortest(axioms.homogeneity_error)});

    // Chords between eight boundary points.
    const auto eight = sample_boundary(s.domain, 8);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < eight.size(); ++i)
        for (std::size_t j = i + 1; j < eight.size(); ++j) pairs.emplace_back(i, j);

    std::vector<GeodesicPath> paths;
    double worst_reversal = 0.0, worst_speed = 0.0, worst_time = 0.0;
    std::pair<std::size_t, std::size_t> worst_chord{0, 0};
    for (const auto& [i, j] : pairs) {
        const ShootingResult r = solver.solve_bvp(eight[i].x, eight[j].x);
        const ReversalReport rev = reversed_geodesic_check(solver, r.path);
        if (rev.relative > worst_reversal) {
            worst_reversal = rev.relative;
            worst_chord = {i, j};
        }
        worst_speed = std::max(worst_speed, speed_deviation(F, r.path));
        const double T = r.path.exit_parameter;
        worst_time = std::max(worst_time, std::abs(T - curve_length(F, r.path).total) / T);
        paths.push_back(r.path);
    }
    const std::string chord = "chord=(" + std::to_string(worst_chord.first) + "," +
                              std::to_string(worst_chord.second) + ")";
    if (closed) {
        checks.push_back({"reversal", worst_reversal, 1e-6, worst_reversal <= 1e-6, chord});
    } else {
        const bool counterexample = worst_reversal > 1e-3;
        log << (counterexample ? "reversal counterexample: " : "no reversal counterexample found: ") << chord
            << " hausdorff/R=" << shortest(worst_reversal) << "\n";
        checks.push_back({"reversal", worst_reversal, 1e-3, true,
                          std::string(counterexample ? "counterexample " : "no-counterexample ") + chord +
                              " (beta not closed, reversal not expected)"});
    }

    // Perturbation by a potential bump that vanishes on the boundary.
    std::optional<RandersSpec> bumped;
    double amplitude = 0.25 * F.validity_margin() * R;
    for (int attempt = 0; attempt < 12; ++attempt) {
        try {
            bumped.emplace(F.riemannian(), F.oneform() + catalog::exact_form(catalog::potential_bump(amplitude, R)),
                           s.domain, F.description() + " + dbump(" + shortest(amplitude) + ")");
            break;
        } catch (const ConstructionError&) {
            amplitude *= 0.5;
        }
    }
    if (!bumped) throw ConstructionError("verify: no admissible potential bump could be added");
    const GeodesicSolver solver2(*bumped, s.config.solver);
    double worst_projective = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        const ShootingResult r = solver2.solve_bvp(eight[i].x, eight[j].x);
        worst_projective = std::max(worst_projective, hausdorff_distance(paths[k], r.path) / R);
    }
    checks.push_back({"projective_equivalence", worst_projective, 1e-6, worst_projective <= 1e-6,
                      "bump amplitude=" + shortest(amplitude)});

    const auto points = sample_boundary(s.domain, s.config.domain.n);
    const BoundaryDistanceData d1 = distance_matrix(F, points, s.config.solver);
    const BoundaryDistanceData d2 = distance_matrix(*bumped, points, s.config.solver);
    const double gauge = max_abs_difference(d1.distances, d2.distances);
    checks.push_back({"gauge_invariance", gauge, 2e-8, gauge <= 2e-8, "n=" + std::to_string(points.size())});

    checks.push_back({"unit_speed", worst_speed, 1e-6, worst_speed <= 1e-6, ""});
    checks.push_back({"travel_time_identity", worst_time, 1e-8, worst_time <= 1e-8, "relative to T"});

    bool all = true;
    for (const CheckLine& c : checks) all = all && c.passed;
    const int status = !all ? exit_internal : !closed ? exit_hypothesis : exit_ok;
    const char* verdict = status == exit_ok ? "ok" : status == exit_hypothesis ? "hypothesis-violated" : "property-failed";

    std::ostringstream out;
    out << "[scenario]\n"
        << "name = " << s.config.name << "\n"
        << "spec = " << F.hash() << "\n"
        << "R = " << full_precision(R) << "\n"
        << "closedness = " << full_precision(closedness) << "\n"
        << "closed = " << (closed ? "true" : "false") << "\n\n"
        << "[checks]\n";
    for (const CheckLine& c : checks) {
        out << c.name << " = " << (c.passed ? "pass" : "fail") << " value=" << full_precision(c.value)
            << " threshold=" << shortest(c.threshold);
        if (!c.detail.empty()) out << " " << c.detail;
        out << "\n";
    }
    out << "\n[verdict]\nstatus = " << verdict << "\n";
    write_text(output_dir(cmd) / "verify.txt", out.str());
    log << "verify: " << verdict << "\n";
    return status;
}

int cmd_plotdata(const CommandLine& cmd, std::ostream& log) {
    require_configs(cmd, 1);
    const BuiltScenario s = build_scenario(config_at(cmd, 0));
    const GeodesicSolver solver(s.spec, s.config.solver);
    const fs::path dir = output_dir(cmd);
    const double R = s.domain.radius();

    std::ostringstream paths;
    paths << "# geodesic fan from boundary angle 0 spec=" << s.spec.hash() << " R=" << shortest(R) << "\n"
          << "ray,angle,t,x1,x2,y1,y2\n";
    const std::size_t rays = 32;
    const Vec2 x0 = s.domain.boundary_point(0.0);
    for (std::size_t k = 0; k < rays; ++k) {
        const double angle = -std::numbers::pi / 2 + (static_cast<double>(k) + 0.5) * std::numbers::pi / rays;
        const GeodesicPath path = solver.integrate(x0, solver.ray_direction(0.0, angle));
        for (const PathSample& p : path.samples)
            paths << k << "," << full_precision(angle) << "," << full_precision(p.t) << "," << full_precision(p.x[0])
                  << "," << full_precision(p.x[1]) << "," << full_precision(p.y[0]) << "," << full_precision(p.y[1])
                  << "\n";
    }
    write_text(dir / "paths.csv", paths.str());

    std::ostringstream profile;
    profile << "# sound speed along the ray of angle 0 spec=" << s.spec.hash() << " radial=" << (s.radial ? "true" : "false")
            << "\n"
            << "r,c,herglotz\n";
    for (std::size_t k = 0; k <= 200; ++k) {
        const double r = R * static_cast<double>(k) / 200.0;
        const Jet2 c = s.c.jet({r, 0.0});
        profile << full_precision(r) << "," << full_precision(c.val) << ","
                << full_precision((c.val - r * c.grad[0]) / (c.val * c.val)) << "\n";
    }
    write_text(dir / "profile.csv", profile.str());
    log << "plotdata: " << rays << " rays and 201 profile samples written to " << dir.string() << "\n";
    return exit_ok;
}

}  // namespace

int exit_status_for(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return exit_internal;
    const std::string kind = err->kind();
    if (kind == "usage" || kind == "parse" || kind == "unit" || kind == "io" || kind == "structural") return exit_usage;
    if (kind == "precondition" || kind == "non-admissible" || kind == "connectivity" || kind == "construction" ||
        kind == "inversion")
        return exit_hypothesis;
    if (kind == "convergence" || kind == "trapped-geodesic" || kind == "degenerate-input" || kind == "convexity" ||
        kind == "domain")
        return exit_numerical;
    return exit_internal;
}

int run_command(const CommandLine& cmd, std::ostream& out, std::ostream& err) {
    try {
        if (cmd.threads) {
            if (*cmd.threads < 1) throw UsageError("--threads must be at least 1");
            omp_set_num_threads(*cmd.threads);
        }
        if (cmd.command == "simulate") return cmd_simulate(cmd, out);
        if (cmd.command == "decompose") return cmd_decompose(cmd, out);
        if (cmd.command == "recover") return cmd_recover(cmd, out);
        if (cmd.command == "verify") return cmd_verify(cmd, out);
        if (cmd.command == "plotdata") return cmd_plotdata(cmd, out);
        throw UsageError("unknown command '" + cmd.command + "'");
    } catch (const std::exception& e) {
        const int status = exit_status_for(e);
        const auto* typed = dynamic_cast<const Error*>(&e);
        nlohmann::json block{{"command", cmd.command},
                             {"kind", typed ? typed->kind() : "internal"},
                             {"message", e.what()},
                             {"exit_status", status}};
        if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
            block["line"] = p->line();
            block["column"] = p->column();
        }
        err << nlohmann::json{{"error", block}}.dump() << "\n";
        return status;
    }
}

}  // namespace randers
