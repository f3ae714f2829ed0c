#pragma once

// Domains and smooth fields on them: scalar fields (with second-order jets),
// 1-forms / vector fields (with Jacobians) and Riemannian metrics (with first
// derivatives). Every field is an immutable value wrapping an evaluation rule;
// copies share nothing mutable, so fields may be evaluated concurrently.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "randers/autodiff.hpp"

namespace randers {

// Closed disk M = B(0, R) in the plane. A positive hole radius turns it into an
// annulus, which exists only so the inverse pipeline can refuse it.
class Domain {
public:
    explicit Domain(double radius = 1.0, int dimension = 2, double hole_radius = 0.0);

    double radius() const noexcept { return radius_; }
    int dimension() const noexcept { return dimension_; }
    double hole_radius() const noexcept { return hole_radius_; }
    bool simply_connected() const noexcept { return hole_radius_ == 0.0; }

    // Membership in the closed domain, allowing |x| to exceed R by slack·R.
    bool contains(const Vec2& x, double slack = 1e-9) const noexcept;
    // Throws DomainError naming `what` when x lies outside.
    void require_contains(const Vec2& x, const char* what) const;

    // Signed boundary function |x|^2 - R^2 (negative inside).
    double boundary_function(const Vec2& x) const noexcept { return norm_squared(x) - radius_ * radius_; }
    Vec2 boundary_point(double angle) const noexcept;

    // Quasi-uniform interior points (sunflower lattice), deterministic.
    std::vector<Vec2> probe_grid(std::size_t count = 1000) const;
    // Equally spaced points on the boundary circle.
    std::vector<Vec2> boundary_probes(std::size_t count = 360) const;

    bool operator==(const Domain&) const = default;

private:
    double radius_;
    int dimension_;
    double hole_radius_;
};

class ScalarField {
public:
    using Rule = std::function<Jet2(const Vec2&)>;

    ScalarField(Rule rule, std::string description);

    Jet2 jet(const Vec2& x) const { return rule_(x); }
    Dual dual(const Vec2& x) const { return rule_(x).first_order(); }
    double value(const Vec2& x) const { return rule_(x).val; }
    Vec2 gradient(const Vec2& x) const { return rule_(x).grad; }
    Mat2 hessian(const Vec2& x) const { return rule_(x).hess; }
    const std::string& description() const noexcept { return description_; }

    // Largest relative disagreement between the gradient rule and central
    // differences of the values over the probes.
    double gradient_consistency(const std::vector<Vec2>& probes, double step = 1e-5) const;

private:
    Rule rule_;
    std::string description_;
};

// Covector (1-form) field β_i(x) together with its Jacobian ∂β_i/∂x^k.
// The same representation carries vector fields W^i (flow velocities).
class OneFormField {
public:
    using Rule = std::function<DualVec2(const Vec2&)>;

    OneFormField(Rule rule, std::string description, bool identically_zero = false);

    DualVec2 jet(const Vec2& x) const { return rule_(x); }
    Vec2 value(const Vec2& x) const;
    // J(i, k) = ∂β_i/∂x^k
    Mat2 jacobian(const Vec2& x) const;
    const std::string& description() const noexcept { return description_; }
    bool identically_zero() const noexcept { return zero_; }

    OneFormField negated() const;
    OneFormField scaled(double s) const;
    friend OneFormField operator+(const OneFormField& a, const OneFormField& b);

private:
    Rule rule_;
    std::string description_;
    bool zero_;
};

using VectorField = OneFormField;

enum class MetricFlavor { euclidean, conformal_radial, conformal, general };
const char* to_string(MetricFlavor flavor);

class RiemannianMetricField {
public:
    using Rule = std::function<DualMat2(const Vec2&)>;

    RiemannianMetricField(Rule rule, MetricFlavor flavor, std::string description);

    DualMat2 jet(const Vec2& x) const { return rule_(x); }
    Mat2 value(const Vec2& x) const;
    MetricFlavor flavor() const noexcept { return flavor_; }
    const std::string& description() const noexcept { return description_; }

    // Smallest eigenvalue over the probes; positive for a valid metric.
    double min_eigenvalue(const std::vector<Vec2>& probes) const;

private:
    Rule rule_;
    MetricFlavor flavor_;
    std::string description_;
};

// A sound-speed field c depending on r = |x| only, viewed as a profile c(r).
class RadialProfile {
public:
    explicit RadialProfile(ScalarField field) : field_(std::move(field)) {}

    double speed(double r) const { return field_.value({r, 0.0}); }
    double slope(double r) const { return field_.gradient({r, 0.0})[0]; }
    const ScalarField& field() const noexcept { return field_; }
    const std::string& description() const noexcept { return field_.description(); }

private:
    ScalarField field_;
};

// ---------------------------------------------------------------------------
// Field catalog
// ---------------------------------------------------------------------------

namespace catalog {

ScalarField constant(double value);
// c0 - k r
ScalarField linear_radial(double c0, double k);
// c0 + k r^2
ScalarField quadratic_radial(double c0, double k);
// A (1 - |x|^2 / R^2), vanishing on the boundary of the disk of radius R.
ScalarField potential_bump(double amplitude, double radius);
// a1 x1 + a2 x2
ScalarField linear_potential(Vec2 a);

OneFormField zero_form();
OneFormField constant_form(Vec2 b);
// s (-x2, x1); its exterior derivative is 2 s dx1 ∧ dx2.
OneFormField rotational_form(double s);
// dφ, with Jacobian given by the Hessian of φ.
OneFormField exact_form(const ScalarField& potential);

RiemannianMetricField euclidean();
// c^{-2} e; flavor conformal_radial when `radial` is set.
RiemannianMetricField conformal(const ScalarField& speed, bool radial);

}  // namespace catalog

}  // namespace randers
