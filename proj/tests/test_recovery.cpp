#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "randers/errors.hpp"
#include "randers/recovery.hpp"
#include "randers/zermelo.hpp"

using namespace randers;

namespace {

const Domain unit{};

RandersSpec radial_base(const OneFormField& beta = catalog::zero_form()) {
    return RandersSpec(catalog::conformal(catalog::linear_radial(2, 1), true), beta, unit);
}

RandersSpec shifted(const RandersSpec& F, const ScalarField& phi) {
    return RandersSpec(F.riemannian(), F.oneform() + catalog::exact_form(phi), F.domain());
}

}  // namespace

TEST_CASE("beta integrals of reversible and constant-wind data") {
    const BoundaryDistanceData rev = distance_matrix(radial_base(), sample_boundary(unit, 8));
    CHECK(recover_beta_integrals(rev).max_abs_offdiagonal() <= 2 * SolverOptions{}.miss_tol);

    const RandersSpec wind = zermelo_construct(conformal_medium(unit, catalog::constant(1.0), catalog::constant_form({0.5, 0})));
    const BoundaryDistanceData d = distance_matrix(wind, sample_boundary(unit, 2));
    CHECK(recover_beta_integrals(d)(1, 0) == doctest::Approx(-4.0 / 3.0).epsilon(1e-10));
    CHECK(recover_beta_integrals(d)(0, 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
    CHECK(recover_symmetric_data(d)(1, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-10));
    CHECK(recover_symmetric_data(d)(0, 1) == recover_symmetric_data(d)(1, 0));
}

TEST_CASE("beta integrals equal the line integral along the geodesic") {
    const RandersSpec F = radial_base(catalog::constant_form({0.1, -0.2}));
    const auto pts = sample_boundary(unit, 6);
    const BoundaryDistanceData d = distance_matrix(F, pts, {}, Execution::parallel, true);
    const Matrix anti = recover_beta_integrals(d);
    // β is constant, so ∫_γ β = b · (x_j - x_i) along any curve with those endpoints
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            if (i == j) continue;
            const Vec2 dx = pts[j].x - pts[i].x;
            CHECK(std::abs(anti(i, j) - (0.1 * dx[0] - 0.2 * dx[1])) <= 1e-8);
        }
}

TEST_CASE("boundary potential of a boundary-vanishing bump is constant") {
    const RandersSpec F1 = radial_base(catalog::constant_form({0.1, 0.05}));
    const ScalarField bump = catalog::potential_bump(0.3, 1.0);
    const auto pts = sample_boundary(unit, 8);
    const BoundaryDistanceData d1 = distance_matrix(F1, pts), d2 = distance_matrix(shifted(F1, bump), pts);
    const BoundaryPotential p = recover_boundary_potential(d1, d2);
    CHECK(p.consistent);
    CHECK(p.spread <= 1e-6);
    CHECK(p.system_residual <= 1e-6);
    for (double v : p.values) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("boundary potential of a linear function") {
    const RandersSpec F1 = radial_base();
    const ScalarField phi = catalog::linear_potential({0.1, 0.0});
    const auto pts = sample_boundary(unit, 8);
    const BoundaryDistanceData d1 = distance_matrix(F1, pts), d2 = distance_matrix(shifted(F1, phi), pts);

    const BoundaryPotential p = recover_boundary_potential(d1, d2);
    CHECK(p.consistent);
    double mean = 0.0;
    for (double v : p.values) mean += v;
    CHECK(std::abs(mean) <= 1e-12);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            CHECK(std::abs((p.values[j] - p.values[i]) - 0.1 * (pts[j].x[0] - pts[i].x[0])) <= 1e-6);
    CHECK(p.spread == doctest::Approx(0.2).epsilon(1e-5));

    std::vector<double> reference;
    for (const BoundaryPoint& b : pts) reference.push_back(phi.value(b.x));
    const BoundaryPotential q = recover_boundary_potential(d1, d2, 1e-6, reference);
    for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(q.values[i] - reference[i]) <= 1e-6);

    CHECK_THROWS_AS(recover_boundary_potential(d1, distance_matrix(F1, sample_boundary(unit, 6))), PreconditionError);
}

TEST_CASE("inconsistent antisymmetric data are flagged") {
    const auto pts = sample_boundary(unit, 6);
    const BoundaryDistanceData d1 = distance_matrix(radial_base(), pts);
    BoundaryDistanceData d2 = d1;
    // a perturbation that no potential difference can produce
    d2.distances(0, 3) += 1e-3;
    const BoundaryPotential p = recover_boundary_potential(d1, d2);
    CHECK_FALSE(p.consistent);
    CHECK(p.system_residual > 1e-4);
}

TEST_CASE("Herglotz inversion of a constant speed") {
    const RandersSpec F(catalog::conformal(catalog::constant(1.5), true), catalog::zero_form(), unit);
    const BoundaryDistanceData d = distance_matrix(F, sample_boundary(unit, 64));
    const RecoveredProfile prof = herglotz_invert(recover_symmetric_data(d), d.angles, 1.0);
    CHECK(prof.monotone);
    CHECK(prof.radially_consistent);
    REQUIRE_FALSE(prof.radius.empty());
    CHECK(std::is_sorted(prof.radius.begin(), prof.radius.end()));
    for (double r : {0.05, 0.3, 0.6, 0.9, 1.0}) CHECK(std::abs(prof.speed_at(r) - 1.5) <= 1e-3 * 1.5);
    // T(Δ) = 2 sin(Δ/2) / c
    for (std::size_t k = 0; k < prof.separation.size(); ++k)
        CHECK(prof.travel_time[k] == doctest::Approx(2 * std::sin(prof.separation[k] / 2) / 1.5).epsilon(1e-8));
}

TEST_CASE("Herglotz inversion preconditions") {
    const RandersSpec F(catalog::conformal(catalog::constant(1.0), true), catalog::zero_form(), unit);
    const BoundaryDistanceData d = distance_matrix(F, sample_boundary(unit, 16));
    CHECK_THROWS_AS(herglotz_invert(d.distances, d.angles, 1.0), PreconditionError);
    std::vector<double> skewed = d.angles;
    skewed[3] += 0.01;
    InversionOptions few;
    few.min_points = 16;
    CHECK_THROWS_AS(herglotz_invert(d.distances, skewed, 1.0, few), PreconditionError);
}

TEST_CASE("a non-radial medium shows a large same-separation spread") {
    const ScalarField c([](const Vec2& x) {
        return Jet2(1.0) + 0.3 * Jet2::variable(x[0], 0) + 0.0 * Jet2::variable(x[1], 1);
    }, "1 + 0.3 x1");
    const RandersSpec F(catalog::conformal(c, false), catalog::zero_form(), unit);
    const BoundaryDistanceData d = distance_matrix(F, sample_boundary(unit, 16));
    InversionOptions o;
    o.min_points = 16;
    try {
        const RecoveredProfile prof = herglotz_invert(recover_symmetric_data(d), d.angles, 1.0, o);
        CHECK_FALSE(prof.radially_consistent);
        CHECK(prof.same_separation_spread > 1e-3);
    } catch (const InversionError&) {
        // a refusal is also an acceptable outcome for non-radial data
    }
}

TEST_CASE("gauge verification") {
    const OneFormField zero = catalog::zero_form();
    for (double eps : {0.1, 0.01}) {
        const GaugeReport g = verify_gauge(zero, catalog::rotational_form(eps), catalog::constant(0.0), unit);
        CHECK(g.gauge_residual <= eps);
        CHECK(g.gauge_residual >= 0.9 * eps);
        CHECK(g.boundary_residual == 0.0);
    }
    const GaugeReport shift = verify_gauge(zero, zero, catalog::constant(0.2), unit);
    CHECK(shift.gauge_residual == 0.0);
    CHECK(shift.boundary_residual == doctest::Approx(0.2).epsilon(1e-15));

    const ScalarField bump = catalog::potential_bump(0.3, 1.0);
    const GaugeReport exact = verify_gauge(zero, catalog::exact_form(bump), bump, unit,
                                           RadialProfile(catalog::linear_radial(2, 1)),
                                           RadialProfile(catalog::linear_radial(2, 1)));
    CHECK(exact.gauge_residual <= 1e-14);
    CHECK(exact.boundary_residual <= 1e-15);
    CHECK(exact.psi_identity);
    REQUIRE(exact.profile_deviation);
    CHECK(*exact.profile_deviation == 0.0);
}

TEST_CASE("rigidity report on a bump pair") {
    const RandersSpec F1 = radial_base();
    const ScalarField bump = catalog::potential_bump(0.3, 1.0);
    const Scenario s1{"base", F1, std::nullopt, RadialProfile(catalog::linear_radial(2, 1))};
    const Scenario s2{"bump", shifted(F1, bump), bump, RadialProfile(catalog::linear_radial(2, 1))};
    RigidityOptions o;
    o.n = 8;
    const RecoveryReport r = rigidity_report(s1, s2, o);
    CHECK_FALSE(r.hypothesis_violation);
    CHECK(r.verdicts.clause_i);
    CHECK(r.verdicts.clause_ii);
    CHECK(r.verdicts.equivalence_consistent);
    REQUIRE(r.verdicts.gauge_verified);
    CHECK(*r.verdicts.gauge_verified);
    CHECK(r.verdict);
    CHECK(r.decomposition_residual <= 4e-16 * 4);
    CHECK(r.data_difference <= 2e-8);

    const std::string dir = (std::filesystem::temp_directory_path() / "randers_test_report").string();
    write_report(r, dir);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "report.txt"));
    CHECK(render_report(r).find("clause_i") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("rigidity report on different profiles and on violated hypotheses") {
    const Scenario a{"c=2-r", radial_base(), std::nullopt, RadialProfile(catalog::linear_radial(2, 1))};
    const Scenario b{"c=1.5", RandersSpec(catalog::conformal(catalog::constant(1.5), true), catalog::zero_form(), unit),
                     std::nullopt, RadialProfile(catalog::constant(1.5))};
    RigidityOptions o;
    o.n = 8;
    const RecoveryReport r = rigidity_report(a, b, o);
    CHECK_FALSE(r.verdicts.clause_i);
    CHECK_FALSE(r.verdicts.clause_ii);
    CHECK(r.verdicts.equivalence_consistent);
    CHECK_FALSE(r.verdict);

    const Scenario rot{"rotational", RandersSpec(catalog::euclidean(), catalog::rotational_form(0.25), unit)};
    const Scenario flat{"flat", RandersSpec(catalog::euclidean(), catalog::zero_form(), unit)};
    const RecoveryReport v = rigidity_report(flat, rot, o);
    REQUIRE(v.hypothesis_violation);
    CHECK(v.hypothesis_violation->find("closedness") != std::string::npos);
    CHECK_FALSE(v.verdict);

    const Domain annulus(1.0, 2, 0.3);
    const Scenario h1{"a1", RandersSpec(catalog::euclidean(), catalog::zero_form(), annulus)};
    CHECK_THROWS_AS(rigidity_report(h1, h1, o), PreconditionError);
}

TEST_CASE("equivalence is consistent over a family of bump amplitudes") {
    const RandersSpec F1 = radial_base(catalog::constant_form({0.05, 0.0}));
    RigidityOptions o;
    o.n = 6;
    for (double A : {-0.2, 0.05, 0.25}) {
        const ScalarField bump = catalog::potential_bump(A, 1.0);
        const RecoveryReport r = rigidity_report({"base", F1}, {"bump", shifted(F1, bump), bump}, o);
        CHECK(r.verdicts.equivalence_consistent);
        CHECK(r.verdicts.clause_i);
        CHECK(r.potential->spread <= 1e-6);
    }
}
