#include "randers/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

Domain::Domain(double radius, int dimension, double hole_radius)
    : radius_(radius), dimension_(dimension), hole_radius_(hole_radius) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ConstructionError("domain radius must be positive and finite");
    if (dimension != 2)
        throw ConstructionError("only planar domains (dimension 2) are supported, got " +
                                std::to_string(dimension));
    if (hole_radius < 0.0 || hole_radius >= radius)
        throw ConstructionError("hole radius must lie in [0, R)");
}

bool Domain::contains(const Vec2& x, double slack) const noexcept {
    const double r = norm(x);
    if (!std::isfinite(r)) return false;
    if (r > radius_ * (1.0 + slack)) return false;
    if (hole_radius_ > 0.0 && r < hole_radius_ * (1.0 - slack)) return false;
    return true;
}

void Domain::require_contains(const Vec2& x, const char* what) const {
    if (!contains(x))
        throw DomainError(std::string(what) + ": point (" + shortest(x[0]) + ", " +
                          shortest(x[1]) + ") lies outside the closed domain of radius " +
                          shortest(radius_));
}

Vec2 Domain::boundary_point(double angle) const noexcept {
    return {radius_ * std::cos(angle), radius_ * std::sin(angle)};
}

std::vector<Vec2> Domain::probe_grid(std::size_t count) const {
    std::vector<Vec2> points;
    points.reserve(count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double inner = hole_radius_ / radius_;
    for (std::size_t k = 0; k < count; ++k) {
        // Area-uniform radii strictly inside the domain.
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(count);
        const double s = std::sqrt(inner * inner + (1.0 - inner * inner) * u);
        const double r = radius_ * s * (1.0 - 1e-6);
        const double theta = golden * static_cast<double>(k);
        points.push_back({r * std::cos(theta), r * std::sin(theta)});
    }
    return points;
}

std::vector<Vec2> Domain::boundary_probes(std::size_t count) const {
    std::vector<Vec2> points;
    points.reserve(count);
    for (std::size_t k = 0; k < count; ++k)
        points.push_back(boundary_point(2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(count)));
    return points;
}

// ---------------------------------------------------------------------------
// ScalarField
// ---------------------------------------------------------------------------

ScalarField::ScalarField(Rule rule, std::string description)
    : rule_(std::move(rule)), description_(std::move(description)) {}

double ScalarField::gradient_consistency(const std::vector<Vec2>& probes, double step) const {
    double worst = 0.0;
    for (const Vec2& x : probes) {
        const Vec2 g = gradient(x);
        for (std::size_t k = 0; k < 2; ++k) {
            Vec2 xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            const double fd = (value(xp) - value(xm)) / (2.0 * step);
            const double scale = std::max({std::abs(g[k]), std::abs(fd), 1.0});
            worst = std::max(worst, std::abs(fd - g[k]) / scale);
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// OneFormField
// ---------------------------------------------------------------------------

OneFormField::OneFormField(Rule rule, std::string description, bool identically_zero)
    : rule_(std::move(rule)), description_(std::move(description)), zero_(identically_zero) {}

Vec2 OneFormField::value(const Vec2& x) const {
    const DualVec2 j = rule_(x);
    return {j[0].val, j[1].val};
}

Mat2 OneFormField::jacobian(const Vec2& x) const {
    const DualVec2 j = rule_(x);
    return {j[0].grad[0], j[0].grad[1], j[1].grad[0], j[1].grad[1]};
}

OneFormField OneFormField::negated() const {
    Rule inner = rule_;
    return OneFormField(
        [inner](const Vec2& x) {
            const DualVec2 j = inner(x);
            return DualVec2{-j[0], -j[1]};
        },
        "-(" + description_ + ")", zero_);
}

OneFormField OneFormField::scaled(double s) const {
    Rule inner = rule_;
    return OneFormField(
        [inner, s](const Vec2& x) {
            const DualVec2 j = inner(x);
            return DualVec2{Dual(s) * j[0], Dual(s) * j[1]};
        },
        shortest(s) + "*(" + description_ + ")", zero_ || s == 0.0);
}

OneFormField operator+(const OneFormField& a, const OneFormField& b) {
    if (b.zero_) return a;
    if (a.zero_) return b;
    OneFormField::Rule ra = a.rule_, rb = b.rule_;
    return OneFormField(
        [ra, rb](const Vec2& x) {
            const DualVec2 u = ra(x), v = rb(x);
            return DualVec2{u[0] + v[0], u[1] + v[1]};
        },
        a.description_ + " + " + b.description_);
}

// ---------------------------------------------------------------------------
// RiemannianMetricField
// ---------------------------------------------------------------------------

const char* to_string(MetricFlavor flavor) {
    switch (flavor) {
        case MetricFlavor::euclidean: return "euclidean";
        case MetricFlavor::conformal_radial: return "conformal-radial";
        case MetricFlavor::conformal: return "conformal";
        case MetricFlavor::general: return "general";
    }
    return "general";
}

RiemannianMetricField::RiemannianMetricField(Rule rule, MetricFlavor flavor, std::string description)
    : rule_(std::move(rule)), flavor_(flavor), description_(std::move(description)) {}

Mat2 RiemannianMetricField::value(const Vec2& x) const {
    const DualMat2 j = rule_(x);
    return {j(0, 0).val, j(0, 1).val, j(1, 0).val, j(1, 1).val};
}

double RiemannianMetricField::min_eigenvalue(const std::vector<Vec2>& probes) const {
    double worst = std::numeric_limits<double>::infinity();
    for (const Vec2& x : probes) worst = std::min(worst, symmetric_eigenvalues(value(x))[0]);
    return worst;
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

namespace catalog {

namespace {

// r = |x| as a second-order jet; derivatives at the origin are set to zero.
Jet2 radius_jet(const Vec2& x) {
    const double r = norm(x);
    if (r == 0.0) return Jet2(0.0);
    const Vec2 u = x / r;
    const Mat2 h = (1.0 / r) * (identity2() - outer(u, u));
    return {r, u, h};
}

}  // namespace

ScalarField constant(double value) {
    return ScalarField([value](const Vec2&) { return Jet2(value); }, "const(" + shortest(value) + ")");
}

ScalarField linear_radial(double c0, double k) {
    return ScalarField(
        [c0, k](const Vec2& x) { return Jet2(c0) - Jet2(k) * radius_jet(x); },
        "linear(" + shortest(c0) + ", " + shortest(k) + ")");
}

ScalarField quadratic_radial(double c0, double k) {
    return ScalarField(
        [c0, k](const Vec2& x) {
            const double r2 = norm_squared(x);
            return Jet2(c0 + k * r2, 2.0 * k * x, 2.0 * k * identity2());
        },
        "quadratic(" + shortest(c0) + ", " + shortest(k) + ")");
}

ScalarField potential_bump(double amplitude, double radius) {
    const double s = amplitude / (radius * radius);
    return ScalarField(
        [amplitude, s](const Vec2& x) {
            return Jet2(amplitude - s * norm_squared(x), -2.0 * s * x, -2.0 * s * identity2());
        },
        "bump(" + shortest(amplitude) + ", R=" + shortest(radius) + ")");
}

ScalarField linear_potential(Vec2 a) {
    return ScalarField([a](const Vec2& x) { return Jet2(dot(a, x), a, Mat2{}); },
                       "linear_potential(" + shortest(a[0]) + ", " + shortest(a[1]) + ")");
}

OneFormField zero_form() {
    return OneFormField([](const Vec2&) { return DualVec2{}; }, "zero", true);
}

OneFormField constant_form(Vec2 b) {
    return OneFormField([b](const Vec2&) { return DualVec2{Dual(b[0]), Dual(b[1])}; },
                        "const(" + shortest(b[0]) + ", " + shortest(b[1]) + ")",
                        b[0] == 0.0 && b[1] == 0.0);
}

OneFormField rotational_form(double s) {
    return OneFormField(
        [s](const Vec2& x) {
            return DualVec2{Dual(-s * x[1], {0.0, -s}), Dual(s * x[0], {s, 0.0})};
        },
        "rotational(" + shortest(s) + ")", s == 0.0);
}

OneFormField exact_form(const ScalarField& potential) {
    return OneFormField(
        [potential](const Vec2& x) {
            const Jet2 j = potential.jet(x);
            return DualVec2{Dual(j.grad[0], {j.hess(0, 0), j.hess(0, 1)}),
                            Dual(j.grad[1], {j.hess(1, 0), j.hess(1, 1)})};
        },
        "d[" + potential.description() + "]");
}

RiemannianMetricField euclidean() {
    return RiemannianMetricField(
        [](const Vec2&) { return DualMat2{Dual(1.0), Dual(0.0), Dual(0.0), Dual(1.0)}; },
        MetricFlavor::euclidean, "euclidean");
}

RiemannianMetricField conformal(const ScalarField& speed, bool radial) {
    return RiemannianMetricField(
        [speed](const Vec2& x) {
            const Dual c = speed.dual(x);
            const Dual g = Dual(1.0) / (c * c);
            return DualMat2{g, Dual(0.0), Dual(0.0), g};
        },
        radial ? MetricFlavor::conformal_radial : MetricFlavor::conformal,
        "conformal[c=" + speed.description() + "]");
}

}  // namespace catalog

}  // namespace randers
