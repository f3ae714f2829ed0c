// Acceptance suite: runs each criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "randers/boundary_data.hpp"
#include "randers/cli.hpp"
#include "randers/errors.hpp"
#include "randers/finsler.hpp"
#include "randers/geodesics.hpp"
#include "randers/recovery.hpp"
#include "randers/zermelo.hpp"

using namespace randers;

namespace {

const Domain unit{};
constexpr double R = 1.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

RandersSpec with_form(const RandersSpec& F, const OneFormField& extra) {
    return RandersSpec(F.riemannian(), F.oneform() + extra, F.domain());
}

// ---------------------------------------------------------------------------

Outcome norm_axioms() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<RiemannianMetricField> metrics{
        catalog::euclidean(), catalog::conformal(catalog::constant(1.5), true),
        catalog::conformal(catalog::linear_radial(2, 1), true), catalog::conformal(catalog::quadratic_radial(1, 0.5), true)};
    const std::vector<OneFormField> forms{catalog::zero_form(), catalog::constant_form({0.2, 0.1}),
                                         catalog::rotational_form(0.2),
                                         catalog::exact_form(catalog::potential_bump(0.2, 1.0)),
                                         catalog::exact_form(catalog::linear_potential({0.1, 0.05}))};
    const auto probes = default_probes(unit);
    int passed = 0;
    double worst_margin = 1.0;
    for (const auto& a : metrics)
        for (const auto& b : forms) {
            const ValidityReport r = validate_norm(RandersSpec::unchecked(a, b, unit), probes);
            worst_margin = std::min(worst_margin, r.validity_margin);
            if (r.ok && r.validity_margin > 0.0) ++passed;
        }
    const ValidityReport bad =
        validate_norm(RandersSpec::unchecked(catalog::euclidean(), catalog::constant_form({1.1, 0}), unit), probes);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {passed == 20 && !bad.ok && bad.positivity_margin < 0.0 && seconds < 1.0,
            std::to_string(passed) + "/20 valid, min margin " + fmt(worst_margin) + "; |beta|=1.1 positivity margin " +
                fmt(bad.positivity_margin) + "; " + fmt(seconds) + " s"};
}

Outcome zermelo_oracle() {
    const RandersSpec F =
        zermelo_construct(conformal_medium(unit, catalog::constant(1.0), catalog::constant_form({0.5, 0})));
    const double down = solve_bvp(F, {-1, 0}, {1, 0}).distance;
    const double up = solve_bvp(F, {1, 0}, {-1, 0}).distance;
    const BoundaryDistanceData d = distance_matrix(F, sample_boundary(unit, 2));
    const Decomposition dec = decompose(d);
    // index 0 is (1, 0), index 1 is (-1, 0)
    const double e = std::max({std::abs(down - 4.0 / 3.0), std::abs(up - 4.0), std::abs(dec.sym(1, 0) - 8.0 / 3.0),
                               std::abs(dec.anti(1, 0) + 4.0 / 3.0)});
    return {e <= 1e-7, "T=" + fmt(down) + ", " + fmt(up) + "; sym " + fmt(dec.sym(1, 0)) + ", anti " +
                           fmt(dec.anti(1, 0)) + "; max error " + fmt(e)};
}

struct BumpScenario {
    std::string name;
    RandersSpec base;
    ScalarField phi;
};

std::vector<BumpScenario> bump_scenarios() {
    const auto radial = [](const ScalarField& c) { return catalog::conformal(c, true); };
    std::vector<BumpScenario> out;
    out.push_back({"euclidean", RandersSpec(catalog::euclidean(), catalog::zero_form(), unit),
                   catalog::potential_bump(0.3, R)});
    out.push_back({"c=2-r", RandersSpec(radial(catalog::linear_radial(2, 1)), catalog::zero_form(), unit),
                   catalog::potential_bump(0.3, R)});
    out.push_back({"c=2-r, const beta",
                   RandersSpec(radial(catalog::linear_radial(2, 1)), catalog::constant_form({0.1, 0.05}), unit),
                   catalog::potential_bump(0.2, R)});
    out.push_back({"c=1+0.5r^2", RandersSpec(radial(catalog::quadratic_radial(1, 0.5)), catalog::zero_form(), unit),
                   catalog::potential_bump(-0.2, R)});
    out.push_back({"zermelo c=2-r, W=(0.15,0.1)",
                   zermelo_construct(conformal_medium(unit, catalog::linear_radial(2, 1),
                                                      catalog::constant_form({0.15, 0.1}), true)),
                   catalog::potential_bump(0.25, R)});
    return out;
}

// BVP paths for all ordered pairs i < j among n boundary points, one fan per source.
std::vector<GeodesicPath> pair_paths(const GeodesicSolver& solver, std::size_t n) {
    const auto pts = sample_boundary(unit, n);
    std::vector<GeodesicPath> out;
    for (std::size_t i = 0; i < n; ++i) {
        const ShootingFan fan = solver.fan(pts[i].angle);
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(solver.solve(fan, pts[j].angle).path);
    }
    return out;
}

double max_pair_hausdorff(const std::vector<GeodesicPath>& a, const std::vector<GeodesicPath>& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, hausdorff_distance(a[k], b[k]));
    return worst;
}

Outcome projective_equivalence() {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (const BumpScenario& s : bump_scenarios()) {
        const GeodesicSolver s1(s.base), s2(with_form(s.base, catalog::exact_form(s.phi)));
        const auto p1 = pair_paths(s1, 8), p2 = pair_paths(s2, 8);
        pairs += p1.size();
        worst = std::max(worst, max_pair_hausdorff(p1, p2));
    }
    const RandersSpec flat(catalog::euclidean(), catalog::zero_form(), unit);
    const GeodesicSolver f(flat), rot(with_form(flat, catalog::rotational_form(0.25)));
    const double rotational = max_pair_hausdorff(pair_paths(f, 8), pair_paths(rot, 8));
    return {pairs == 5 * 28 && worst <= 1e-6 * R && rotational > 1e-3 * R,
            std::to_string(pairs) + " pairs, max Hausdorff/R " + fmt(worst / R) + "; rotational perturbation " +
                fmt(rotational / R)};
}

Outcome reversible_geodesics() {
    double worst_closed = 0.0, worst_rot = 0.0;
    std::size_t checks = 0;
    const auto check_all = [&](const RandersSpec& F, double& worst) {
        const GeodesicSolver solver(F);
        for (const GeodesicPath& p : pair_paths(solver, 8)) {
            worst = std::max(worst, reversed_geodesic_check(solver, p).relative);
            ++checks;
        }
    };
    for (const BumpScenario& s : bump_scenarios()) {
        const RandersSpec F = with_form(s.base, catalog::exact_form(s.phi));
        if (closedness_residual(F.oneform(), unit.probe_grid(1000)) > 1e-8) continue;
        check_all(F, worst_closed);
    }
    check_all(RandersSpec(catalog::euclidean(), catalog::rotational_form(0.25), unit), worst_rot);
    return {worst_closed <= 1e-6 && worst_rot > 1e-3,
            std::to_string(checks) + " chords; closed scenarios max " + fmt(worst_closed) + " R; rotational max " +
                fmt(worst_rot) + " R"};
}

struct ForwardPair {
    BoundaryDistanceData d1, d2;
    RandersSpec F1, F2;
    double seconds = 0.0;
};

ForwardPair forward_pair() {
    const RandersSpec F1(catalog::conformal(catalog::linear_radial(2, 1), true), catalog::constant_form({0.1, 0.05}),
                         unit);
    const RandersSpec F2 = with_form(F1, catalog::exact_form(catalog::potential_bump(0.3, R)));
    const auto pts = sample_boundary(unit, 16);
    const auto start = std::chrono::steady_clock::now();
    BoundaryDistanceData d1 = distance_matrix(F1, pts, {}, Execution::parallel, true);
    BoundaryDistanceData d2 = distance_matrix(F2, pts, {}, Execution::parallel, true);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(d1), std::move(d2), F1, F2, seconds};
}

Outcome gauge_forward(const ForwardPair& fp) {
    const double diff = max_abs_difference(fp.d1.distances, fp.d2.distances);
    return {diff <= 2e-8 && fp.seconds < 30.0,
            "n=16, max |D1 - D2| " + fmt(diff) + "; " + fmt(fp.seconds) + " s for both matrices"};
}

Outcome gauge_inverse(const ForwardPair& fp) {
    const BoundaryPotential p = recover_boundary_potential(fp.d1, fp.d2);
    const double sym = max_abs_difference(recover_symmetric_data(fp.d1), recover_symmetric_data(fp.d2));

    const auto pts = sample_boundary(unit, 16);
    const BoundaryDistanceData lin =
        distance_matrix(with_form(fp.F1, catalog::exact_form(catalog::linear_potential({0.1, 0.0}))), pts);
    const BoundaryPotential q = recover_boundary_potential(fp.d1, lin);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            worst = std::max(worst, std::abs((q.values[j] - q.values[i]) - 0.1 * (pts[j].x[0] - pts[i].x[0])));
    return {p.spread <= 1e-6 && sym <= 2e-8 && worst <= 1e-6,
            "potential spread " + fmt(p.spread) + ", sym diff " + fmt(sym) + "; phi=0.1x1 differences error " +
                fmt(worst)};
}

Outcome herglotz_pipeline() {
    const auto start = std::chrono::steady_clock::now();
    const HerglotzResult h = herglotz_check(RadialProfile(catalog::linear_radial(2, 1)), R);
    const auto pts = sample_boundary(unit, 64);

    const RandersSpec lin(catalog::conformal(catalog::linear_radial(2, 1), true), catalog::zero_form(), unit);
    const BoundaryDistanceData d = distance_matrix(lin, pts);
    const RecoveredProfile p = herglotz_invert(recover_symmetric_data(d), d.angles, R);
    double worst_lin = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double r = 0.05 + 0.95 * k / 400.0;
        worst_lin = std::max(worst_lin, std::abs(p.speed_at(r) - (2.0 - r)) / (2.0 - r));
    }

    const RandersSpec flat(catalog::conformal(catalog::constant(1.5), true), catalog::zero_form(), unit);
    const BoundaryDistanceData dc = distance_matrix(flat, pts);
    const RecoveredProfile pc = herglotz_invert(recover_symmetric_data(dc), dc.angles, R);
    double worst_const = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double r = 0.05 + 0.95 * k / 400.0;
        worst_const = std::max(worst_const, std::abs(pc.speed_at(r) - 1.5) / 1.5);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {h.holds && h.margin >= 0.5 && worst_lin <= 1e-2 && worst_const <= 1e-3 && seconds < 120.0,
            "margin " + fmt(h.margin) + "; c=2-r max rel error " + fmt(worst_lin) + "; constant " +
                fmt(worst_const) + "; " + fmt(seconds) + " s"};
}

Outcome conservation(const ForwardPair& fp) {
    double speed = 0.0, identity = 0.0;
    std::size_t paths = 0;
    for (const auto* item : {&fp.d1, &fp.d2}) {
        const RandersSpec& F = item == &fp.d1 ? fp.F1 : fp.F2;
        for (const GeodesicPath& p : item->paths) {
            if (p.samples.empty()) continue;
            ++paths;
            speed = std::max(speed, speed_deviation(F, p));
            identity = std::max(identity, std::abs(p.exit_parameter - curve_length(F, p).total) / p.exit_parameter);
        }
    }
    return {paths == 2 * 16 * 15 && speed <= 1e-6 && identity <= 1e-8,
            std::to_string(paths) + " geodesics, max |F - 1| " + fmt(speed) + ", max |T - L|/T " + fmt(identity)};
}

Outcome linearization() {
    const ScalarField c = catalog::linear_radial(2, 1);
    const auto pts = sample_boundary(unit, 8);
    std::vector<double> rho, gap;
    for (double s : {0.2, 0.1, 0.05}) {
        const VectorField W = catalog::rotational_form(s);
        const LinearizedSpec lin = linearize(c, W, unit, true);
        const RandersSpec exact = zermelo_construct(conformal_medium(unit, c, W, true));
        rho.push_back(lin.rho);
        gap.push_back(max_abs_difference(distance_matrix(exact, pts).distances, distance_matrix(lin.spec, pts).distances));
    }
    const double slope = oracle::loglog_slope(rho, gap);
    return {slope >= 1.7 && slope <= 2.3, "rho " + fmt(rho[0]) + "," + fmt(rho[1]) + "," + fmt(rho[2]) +
                                               "; discrepancy " + fmt(gap[0]) + "," + fmt(gap[1]) + "," + fmt(gap[2]) +
                                               "; exponent " + fmt(slope)};
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "randers_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "noisy.cfg";
    std::ofstream(cfg) << "seed = 5\n[domain]\nn = 12\n[medium]\nc = \"2 - r\"\nW = vortex(0.2)\n"
                          "[pipeline]\nstages = simulate, decompose\nnoise = 1e-6\n";
    std::ostringstream sink;
    bool runs_ok = true;
    for (const char* dir : {"a", "b"})
        runs_ok = runs_ok && run_command({"simulate", {cfg.string()}, {}, (root / dir).string()}, sink, sink) == exit_ok;
    bool same = runs_ok;
    for (const char* f : {"distances.csv", "symmetric.csv", "beta_integrals.csv"})
        same = same && slurp(root / "a" / f) == slurp(root / "b" / f) && !slurp(root / "a" / f).empty();
    fs::remove_all(root);

    const RandersSpec F = zermelo_construct(
        conformal_medium(unit, catalog::linear_radial(2, 1), catalog::rotational_form(0.2), true));
    const auto pts = sample_boundary(unit, 12);
    const bool parallel_serial = bitwise_equal(distance_matrix(F, pts).distances, distance_matrix_serial(F, pts).distances);
    return {same && parallel_serial, std::string("repeated CLI artifacts ") + (same ? "identical" : "DIFFER") +
                                         "; parallel vs serial " + (parallel_serial ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::optional<ForwardPair> fp;
    auto pair = [&]() -> const ForwardPair& {
        if (!fp) fp = forward_pair();
        return *fp;
    };
    const std::vector<Criterion> criteria{
        {1, "norm axioms", norm_axioms},
        {2, "constant-wind oracle", zermelo_oracle},
        {3, "projective equivalence", projective_equivalence},
        {4, "reversed geodesics", reversible_geodesics},
        {5, "gauge forward", [&] { return gauge_forward(pair()); }},
        {6, "gauge inverse", [&] { return gauge_inverse(pair()); }},
        {7, "Herglotz pipeline", herglotz_pipeline},
        {8, "conservation", [&] { return conservation(pair()); }},
        {9, "linearization order", linearization},
        {10, "determinism", determinism},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failures;
        std::printf("[%s] %2d %-24s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
