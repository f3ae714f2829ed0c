#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "randers/errors.hpp"
#include "randers/finsler.hpp"
#include "randers/zermelo.hpp"

using namespace randers;

namespace {

RandersSpec euclid_const(Vec2 b) { return RandersSpec(catalog::euclidean(), catalog::constant_form(b), Domain{}); }

std::vector<RandersSpec> sample_specs() {
    const Domain d;
    std::vector<RandersSpec> out;
    out.emplace_back(catalog::euclidean(), catalog::zero_form(), d);
    out.emplace_back(catalog::euclidean(), catalog::constant_form({0.3, -0.2}), d);
    out.emplace_back(catalog::conformal(catalog::linear_radial(2, 1), true), catalog::rotational_form(0.2), d);
    out.emplace_back(catalog::conformal(catalog::quadratic_radial(1, 0.5), true),
                     catalog::exact_form(catalog::potential_bump(0.2, 1.0)), d);
    out.push_back(zermelo_construct(conformal_medium(d, catalog::linear_radial(2, 1), catalog::rotational_form(0.3), true)));
    return out;
}

}  // namespace

TEST_CASE("Riemannian norm examples") {
    const Domain d;
    CHECK(eval_riemannian_norm(catalog::euclidean(), d, {0, 0}, {3, 4}) == 5.0);
    CHECK(eval_riemannian_norm(catalog::conformal(catalog::constant(2.0), true), d, {0.1, 0}, {3, 4}) == 2.5);
    CHECK(eval_riemannian_norm(catalog::euclidean(), d, {0, 0}, {0, 0}) == 0.0);
    CHECK_THROWS_AS(eval_riemannian_norm(catalog::euclidean(), d, {1.5, 0}, {1, 0}), DomainError);
}

TEST_CASE("Randers norm examples") {
    const RandersSpec F = euclid_const({0.5, 0});
    CHECK(eval_randers(F, {0, 0}, {1, 0}) == 1.5);
    CHECK(eval_randers(F, {0, 0}, {-1, 0}) == 0.5);

    const RandersSpec Z = zermelo_construct(conformal_medium(Domain{}, catalog::constant(1.0), catalog::constant_form({0.5, 0})));
    // reciprocal net speed with and against the wind
    CHECK(eval_randers(Z, {0.2, 0.1}, {1, 0}) == doctest::Approx(1.0 / 1.5).epsilon(1e-14));
    CHECK(eval_randers(Z, {0.2, 0.1}, {-1, 0}) == doctest::Approx(1.0 / 0.5).epsilon(1e-14));

    const RandersSpec G(catalog::conformal(catalog::linear_radial(2, 1), true), catalog::zero_form(), Domain{});
    for (const NormProbe& p : default_probes(Domain{}, 50, 4))
        CHECK(eval_randers(G, p.x, p.y) == eval_riemannian_norm(G.riemannian(), G.domain(), p.x, p.y));
}

TEST_CASE("Randers evaluation agrees with the closed-form oracle") {
    const Domain d;
    const ScalarField c = catalog::linear_radial(2, 1);
    const RandersSpec Z = zermelo_construct(conformal_medium(d, c, catalog::rotational_form(0.3), true));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int k = 0; k < 100; ++k) {
        const Vec2 x{u(rng), u(rng)}, y{u(rng), u(rng)};
        const auto z = oracle::zermelo(c.value(x), {-0.3 * x[1], 0.3 * x[0]});
        CHECK(eval_randers(Z, x, y) == doctest::Approx(oracle::randers(z.alpha, z.beta, {y[0], y[1]})).epsilon(1e-13));
    }
}

TEST_CASE("an invalid spec refuses evaluation") {
    CHECK_THROWS_AS(euclid_const({1.1, 0}), ConstructionError);
    const RandersSpec bad = RandersSpec::unchecked(catalog::euclidean(), catalog::constant_form({1.1, 0}), Domain{});
    CHECK_FALSE(bad.valid());
    CHECK(bad.validity_margin() == doctest::Approx(-0.1));
    CHECK_THROWS_AS(eval_randers(bad, {0, 0}, {1, 0}), ConstructionError);
}

TEST_CASE("dual norm examples") {
    const Domain d;
    CHECK(dual_norm(catalog::euclidean(), d, {0, 0}, {3, 4}) == 5.0);
    CHECK(dual_norm(catalog::conformal(catalog::constant(2.0), true), d, {0, 0}, {1, 0}) == 2.0);

    const RandersSpec F = euclid_const({0.5, 0});
    for (const Vec2 omega : {Vec2{1, 0}, Vec2{0, 1}, Vec2{-0.3, 0.8}}) {
        const double brute = oracle::brute_dual([](const oracle::V2& y) { return std::hypot(y[0], y[1]) + 0.5 * y[0]; },
                                                {omega[0], omega[1]});
        CHECK(dual_norm(F, {0, 0}, omega) == doctest::Approx(brute).epsilon(1e-7));
    }
}

TEST_CASE("validate_norm examples") {
    const ValidityReport e = validate_norm(RandersSpec(catalog::euclidean(), catalog::zero_form(), Domain{}),
                                           default_probes(Domain{}));
    CHECK(e.ok);
    CHECK(e.convexity_margin == doctest::Approx(1.0).epsilon(1e-6));

    const RandersSpec F = euclid_const({0.9, 0});
    const ValidityReport r = validate_norm(F, default_probes(Domain{}));
    CHECK(r.ok);
    CHECK(r.convexity_margin > 0.0);
    // smallest eigenvalue of ½∇²F² by second differences, over directions
    double oracle_min = 1e300;
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * std::numbers::pi * k / 64;
        const auto H = oracle::hessian_half_square([](const oracle::V2& y) { return std::hypot(y[0], y[1]) + 0.9 * y[0]; },
                                                   {std::cos(t), std::sin(t)});
        const double tr = H[0] + H[3], det = H[0] * H[3] - H[1] * H[2];
        oracle_min = std::min(oracle_min, 0.5 * tr - std::sqrt(0.25 * tr * tr - det));
    }
    CHECK(oracle_min > 0.0);

    const RandersSpec bad = RandersSpec::unchecked(catalog::euclidean(), catalog::constant_form({1.1, 0}), Domain{});
    const ValidityReport b = validate_norm(bad, default_probes(Domain{}));
    CHECK_FALSE(b.ok);
    CHECK(b.positivity_margin < 0.0);
    CHECK_FALSE(b.flagged.empty());
}

TEST_CASE("positive homogeneity holds at every probe") {
    for (const RandersSpec& F : sample_specs()) {
        for (const NormProbe& p : default_probes(F.domain(), 100, 8)) {
            const double f = eval_randers(F, p.x, p.y);
            for (double lambda : {0.5, 2.0, 7.0})
                CHECK(std::abs(eval_randers(F, p.x, lambda * p.y) - lambda * f) <= 1e-10 * lambda * f);
        }
    }
}

TEST_CASE("fundamental tensor examples") {
    const RandersSpec E(catalog::euclidean(), catalog::zero_form(), Domain{});
    const Mat2 g = fundamental_tensor(E, {0.1, 0.2}, {0.3, -2.0}).g;
    CHECK(g(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(g(0, 1)) < 1e-8);
    CHECK_THROWS_AS(fundamental_tensor(E, {0, 0}, {0, 0}), DegenerateInputError);

    // Riemannian: y-independent
    const RandersSpec G(catalog::conformal(catalog::linear_radial(2, 1), true), catalog::zero_form(), Domain{});
    const Vec2 x{0.3, 0.4};
    const Mat2 ref = G.riemannian().value(x);
    for (int k = 0; k < 16; ++k) {
        const double t = 2 * std::numbers::pi * k / 16;
        const Mat2 h = fundamental_tensor(G, x, {std::cos(t), std::sin(t)}).g;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(h(i, j) - ref(i, j)) <= 1e-8);
    }

    // Randers: degree-0 homogeneity, closed form and second-difference oracle agree
    for (const RandersSpec& F : sample_specs()) {
        const Vec2 y{0.6, -0.8};
        const Mat2 a = fundamental_tensor(F, x, y).g, b = fundamental_tensor(F, x, 2.0 * y).g;
        const Mat2 c = randers_fundamental_tensor(F.local(x), y);
        const auto o = oracle::hessian_half_square([&](const oracle::V2& v) { return F.raw_eval(x, {v[0], v[1]}); },
                                                   {y[0], y[1]});
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                CHECK(std::abs(a(i, j) - b(i, j)) <= 1e-6);
                CHECK(std::abs(a(i, j) - c(i, j)) <= 1e-7);
                CHECK(std::abs(c(i, j) - o[2 * i + j]) <= 1e-5);
            }
    }
}

TEST_CASE("curve length examples") {
    const RandersSpec E(catalog::euclidean(), catalog::zero_form(), Domain{});
    const LengthBreakdown s = curve_length(E, std::vector<Vec2>{{-1, 0}, {1, 0}});
    CHECK(s.total == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.riemannian_part == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.oneform_part == 0.0);

    const RandersSpec B = euclid_const({-2.0 / 3.0, 0});
    const LengthBreakdown f = curve_length(B, std::vector<Vec2>{{-1, 0}, {1, 0}});
    const LengthBreakdown r = curve_length(B, std::vector<Vec2>{{1, 0}, {-1, 0}});
    CHECK(f.oneform_part == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));
    CHECK(r.oneform_part == -f.oneform_part);
    CHECK(r.riemannian_part == f.riemannian_part);

    const RandersSpec Z = zermelo_construct(conformal_medium(Domain{}, catalog::constant(1.0), catalog::constant_form({0.5, 0})));
    const LengthBreakdown z = curve_length(Z, std::vector<Vec2>{{-1, 0}, {1, 0}});
    CHECK(z.total == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(z.riemannian_part == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
    CHECK(z.oneform_part == doctest::Approx(-4.0 / 3.0).epsilon(1e-14));

    CHECK_THROWS_AS(curve_length(E, std::vector<Vec2>{{0, 0}, {2, 0}}), DomainError);
}

TEST_CASE("length decomposition and orientation on curved polylines") {
    std::vector<Vec2> poly;
    for (int k = 0; k <= 40; ++k) {
        const double t = k / 40.0;
        poly.push_back({0.8 * std::cos(3 * t), 0.5 * std::sin(5 * t)});
    }
    std::vector<Vec2> back(poly.rbegin(), poly.rend());
    for (const RandersSpec& F : sample_specs()) {
        const LengthBreakdown a = curve_length(F, poly), b = curve_length(F, back);
        CHECK(std::abs(a.total - (a.riemannian_part + a.oneform_part)) <= 1e-9 * a.total);
        CHECK(b.oneform_part == doctest::Approx(-a.oneform_part).epsilon(1e-12));
        CHECK(b.riemannian_part == doctest::Approx(a.riemannian_part).epsilon(1e-12));
    }
}

TEST_CASE("reverse_norm is the orientation flip and an involution") {
    const RandersSpec E(catalog::euclidean(), catalog::zero_form(), Domain{});
    const RandersSpec Er = reverse_norm(E);
    for (const NormProbe& p : default_probes(Domain{}, 50, 4)) CHECK(eval_randers(Er, p.x, p.y) == eval_randers(E, p.x, p.y));
    for (const RandersSpec& F : sample_specs()) {
        const RandersSpec R = reverse_norm(F), RR = reverse_norm(R);
        for (const NormProbe& p : default_probes(F.domain(), 50, 4)) {
            CHECK(eval_randers(R, p.x, p.y) == eval_randers(F, p.x, -p.y));
            CHECK(eval_randers(RR, p.x, p.y) == eval_randers(F, p.x, p.y));
        }
    }
}

TEST_CASE("spec hash is stable and distinguishes descriptions") {
    const RandersSpec a = euclid_const({0.5, 0}), b = euclid_const({0.5, 0}), c = euclid_const({0.4, 0});
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
}
