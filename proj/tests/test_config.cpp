#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "randers/config.hpp"
#include "randers/errors.hpp"
#include "randers/expression.hpp"

using namespace randers;

namespace {

template <class E>
void expect_error_at(const std::string& text, int line, int column) {
    try {
        parse_config(text);
        FAIL("expected an error for: " << text);
    } catch (const E& e) {
        CHECK(e.line() == line);
        CHECK(e.column() == column);
    }
}

}  // namespace

TEST_CASE("a radial speed expression matches 2 - r at 1000 points exactly") {
    const ScenarioConfig cfg = parse_config("[medium]\nc = \"2 - r\"\n");
    CHECK(cfg.medium.c.kind == "expr");
    const ScalarField c = make_speed(cfg.medium.c);
    const BuiltScenario built = build_scenario(cfg);
    CHECK(built.radial);
    REQUIRE(built.profile);
    for (const Vec2& x : Domain().probe_grid(1000)) {
        const double expect = 2.0 - std::sqrt(x[0] * x[0] + x[1] * x[1]);
        CHECK(c.value(x) == expect);
    }
    for (int k = 0; k < 1000; ++k) {
        const double r = k / 999.0;
        CHECK(built.profile->speed(r) == 2.0 - r);
    }
}

TEST_CASE("constant wind preset") {
    const ScenarioConfig cfg = parse_config("[medium]\nW = const(0.5, 0) [speed]\n");
    CHECK(cfg.medium.W == FieldChoice{"const", {0.5, 0.0}, {}});
    const OneFormField W = make_form(cfg.medium.W);
    CHECK(W.value({0.3, -0.2})[0] == 0.5);
    CHECK(W.value({0.3, -0.2})[1] == 0.0);
    const BuiltScenario built = build_scenario(cfg);
    REQUIRE(built.medium);
    CHECK(built.spec.oneform().value({0, 0})[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("a potential expression vanishes on the unit circle") {
    const ScenarioConfig cfg = parse_config("[domain]\nR = 1\n[medium]\nphi = \"0.3*(1 - (x1^2 + x2^2))\"\n");
    const auto phi = make_potential(cfg.medium.phi, cfg.domain.R);
    REQUIRE(phi);
    for (const Vec2& x : Domain().boundary_probes(360)) CHECK(std::abs(phi->value(x)) <= 1e-15);
    CHECK(phi->value({0, 0}) == doctest::Approx(0.3));
    const auto bump = make_potential(FieldChoice{"bump", {0.3}, {}}, 2.0);
    REQUIRE(bump);
    CHECK(bump->value({1.0, 0.0}) == doctest::Approx(0.3 * 0.75));
    CHECK_FALSE(make_potential(FieldChoice{"zero", {}, {}}, 1.0));
}

TEST_CASE("defaults and a full document") {
    CHECK(parse_config("") == ScenarioConfig{});
    const ScenarioConfig cfg = parse_config(R"(# rotating disk
name = "rotating-disk"
seed = 7

[domain]
R = 2 [length]
n = 24 [count]

[medium]
model = zermelo
c = linear(2, 1) [m/s]
W = vortex(0.1)
phi = bump(0.2) [s]

[solver]
rtol = 1e-10
sweep = 360 [count]
min_separation = 0.01 [rad]

[pipeline]
stages = simulate, decompose, invert
noise = 1e-9 [time]
)");
    CHECK(cfg.name == "rotating-disk");
    CHECK(cfg.seed == 7u);
    CHECK(cfg.domain.R == 2.0);
    CHECK(cfg.domain.n == 24u);
    CHECK(cfg.medium.c == FieldChoice{"linear", {2.0, 1.0}, {}});
    CHECK(cfg.medium.W == FieldChoice{"vortex", {0.1}, {}});
    CHECK(cfg.medium.phi == FieldChoice{"bump", {0.2}, {}});
    CHECK(cfg.solver.rtol == 1e-10);
    CHECK(cfg.solver.sweep == 360u);
    CHECK(cfg.solver.min_separation == 0.01);
    CHECK(cfg.pipeline.has("invert"));
    CHECK(cfg.pipeline.noise == 1e-9);
}

TEST_CASE("round trip through the canonical form") {
    const std::vector<std::string> docs{
        "",
        "name = wind\n[medium]\nW = const(0.5, 0)\n",
        "seed = 3\n[domain]\nR = 0.7\nn = 9\n[medium]\nc = \"2 - r\"\nW = field(\"-0.1*x2\", \"0.1*x1\")\nphi = bump(0.1)\n",
        "[medium]\nmodel = direct\nmetric = euclidean\nbeta = grad(\"0.1*x1*x2\")\nphi = \"0.01*sin(x1)\"\n"
        "[solver]\nrtol = 3.3e-11\nmax_steps = 5000\n[pipeline]\nstages = decompose, simulate\nnoise = 0.1\n",
        "[medium]\nmodel = linearized\nc = quadratic(1, 0.5)\nW = grad(\"0.05*r^2\")\n",
    };
    for (const std::string& doc : docs) {
        CAPTURE(doc);
        const ScenarioConfig a = parse_config(doc);
        const std::string canonical = emit_config(a);
        const ScenarioConfig b = parse_config(canonical);
        CHECK(a == b);
        CHECK(emit_config(b) == canonical);
    }
}

TEST_CASE("random solver blocks survive the round trip bitwise") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> e(-13.0, -6.0);
    for (int k = 0; k < 50; ++k) {
        ScenarioConfig cfg;
        cfg.solver.rtol = std::pow(10.0, e(rng));
        cfg.solver.atol = std::pow(10.0, e(rng));
        cfg.pipeline.noise = std::pow(10.0, e(rng));
        cfg.domain.R = 1.0 + std::pow(10.0, e(rng));
        CHECK(parse_config(emit_config(cfg)) == cfg);
    }
}

TEST_CASE("unknown names are reported with their location") {
    expect_error_at<ParseError>("[medium]\nspeed = const(1)\n", 2, 1);
    expect_error_at<ParseError>("\n[mediums]\n", 2, 2);
    expect_error_at<ParseError>("[medium]\nW = tornado(1)\n", 2, 5);
    expect_error_at<ParseError>("[medium]\nc = \"2 - tan(r)\"\n", 2, 10);
    expect_error_at<ParseError>("[medium]\nc = \"2 - q\"\n", 2, 10);
    expect_error_at<ParseError>("[pipeline]\nstages = simulate, plot\n", 2, 20);
    CHECK_THROWS_AS(parse_config("[domain]\nR = 1\nR = 2\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[domain]\n[domain]\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nc = const(1, 2)\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nc = \"2 - \"\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[domain]\nn = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[domain]\nR = -1\n"), ParseError);
}

TEST_CASE("unit annotations") {
    CHECK(parse_config("[domain]\nR = 2 [m]\n").domain.R == 2.0);
    expect_error_at<UnitError>("[domain]\nR = 2 [time]\n", 2, 7);
    expect_error_at<UnitError>("[medium]\nc = const(1) [furlong]\n", 2, 14);
    CHECK_THROWS_AS(parse_config("[medium]\nphi = bump(0.1) [speed]\n"), UnitError);
    try {
        parse_config("[domain]\nR = 2 [time]\n");
    } catch (const UnitError& e) {
        CHECK(std::string(e.kind()) == "unit");
    }
}

TEST_CASE("structural rules of the medium block") {
    CHECK_THROWS_AS(parse_config("[medium]\nmetric = euclidean\nc = const(2)\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nbeta = rotational(0.1)\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[medium]\nmodel = direct\nW = const(0.1, 0)\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[domain]\nR = 1\nhole_radius = 1\n"), ParseError);
    CHECK_THROWS_AS(build_scenario(parse_config("[medium]\nW = const(1.2, 0)\n")), ConstructionError);
}

TEST_CASE("expression grammar and derivatives") {
    const Vec2 x{0.3, -0.45};
    const double h = 1e-6;
    for (const std::string text : {"2 - r", "x1 * x2 + 3", "exp(-x1^2) * cos(x2)", "sqrt(1 + r^2) / (2 + sin(x1))",
                                   "log(2 + x1) - -x2", "0.5 · x1 ^ 2", "2^-x1", "1e-1*x1 + .5*x2"}) {
        CAPTURE(text);
        const Expression e = Expression::parse(text);
        CHECK(e.text() == text);
        const Dual d = e.dual(x);
        CHECK(d.val == e.value(x));
        const double fx = (e.value({x[0] + h, x[1]}) - e.value({x[0] - h, x[1]})) / (2 * h);
        const double fy = (e.value({x[0], x[1] + h}) - e.value({x[0], x[1] - h})) / (2 * h);
        CHECK(d.grad[0] == doctest::Approx(fx).epsilon(1e-7).scale(1.0));
        CHECK(d.grad[1] == doctest::Approx(fy).epsilon(1e-7).scale(1.0));
        const Jet2 j = e.jet(x);
        const Vec2 gp = e.dual({x[0] + h, x[1]}).grad, gm = e.dual({x[0] - h, x[1]}).grad;
        CHECK(j.hess(0, 0) == doctest::Approx((gp[0] - gm[0]) / (2 * h)).epsilon(1e-6).scale(1.0));
        CHECK(j.hess(1, 0) == doctest::Approx((gp[1] - gm[1]) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
    CHECK(Expression::parse("2 - 3 - 4").value({0, 0}) == -5.0);
    CHECK(Expression::parse("2 ^ 3 ^ 2").value({0, 0}) == 512.0);
    CHECK(Expression::parse("-2 ^ 2").value({0, 0}) == -4.0);
    CHECK(Expression::parse("8 / 4 / 2").value({0, 0}) == 1.0);
    CHECK(Expression::parse("r").radial());
    CHECK(Expression::parse("7").radial());
    CHECK_FALSE(Expression::parse("7").uses_position());
    CHECK_FALSE(Expression::parse("r + x1").radial());
}

TEST_CASE("expression errors carry columns") {
    auto column_of = [](const std::string& text) {
        try {
            Expression::parse(text, 4, 10);
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
            return e.column();
        }
        return -1;
    };
    CHECK(column_of("1 + y") == 14);
    CHECK(column_of("foo(1)") == 10);
    CHECK(column_of("(1 + 2") > 10);
    CHECK(column_of("1 +") > 10);
    CHECK(column_of("") == 10);
}
