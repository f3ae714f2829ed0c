#pragma once

// Randers geodesics: spray coefficients, initial-value tracing to the boundary,
// boundary-to-boundary shooting, and probes of admissibility, reversibility
// and conjugate points.

#include <cstddef>
#include <string>
#include <vector>

#include "randers/finsler.hpp"
#include "randers/ode.hpp"
#include "randers/path.hpp"

namespace randers {

struct SolverOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    std::size_t max_steps = 100000;
    std::size_t sweep = 720;       // rays in the shooting fan
    double fan_rtol = 1e-7;        // fan rays only need to bracket roots
    double miss_tol = 1e-8;        // accepted endpoint miss, in units of R
    double refine_tol = 1e-11;     // target miss of the refinement, in units of R
    double exit_tol = 1e-12;       // exit point distance to the circle, in units of R
    double h_max = 0.05;           // in units of R
    double min_separation = 1e-3;  // boundary pairs closer than this (radians) are skipped

    bool operator==(const SolverOptions&) const = default;
};

struct ShootingResult {
    GeodesicPath path;
    double angle = 0.0;         // initial direction, measured from the inward normal (ccw positive)
    double miss = 0.0;          // |exit point - target|
    int branch_count = 0;
    double distance = 0.0;      // d_F(x, x'), F-length corrected to first order for the miss
};

// One ray of a shooting fan: initial angle and boundary angular offset of the
// exit point, in (0, 2π). NaN offset marks a ray that failed to exit.
struct FanRay {
    double angle;
    double offset;
};

struct ShootingFan {
    double source_angle = 0.0;
    std::vector<FanRay> rays;
    std::size_t failures = 0;
};

// Gⁱ(x, y) of the geodesic equation ẍ + 2G(x, ẋ) = 0.
Vec2 spray(const RandersLocal& local, const Vec2& y);
Vec2 spray(const RandersSpec& F, const Vec2& x, const Vec2& y);

class GeodesicSolver {
public:
    // Refuses specs that are invalid or fail validate_norm on the default probes.
    explicit GeodesicSolver(RandersSpec F, SolverOptions options = {});

    const RandersSpec& spec() const noexcept { return F_; }
    const SolverOptions& options() const noexcept { return options_; }

    // Traces the geodesic with initial velocity y0 rescaled to F(x0, y0) = 1.
    GeodesicPath integrate(const Vec2& x0, const Vec2& y0) const;

    // Exit offsets of the uniform ray fan from the boundary point at source_angle.
    ShootingFan fan(double source_angle, bool parallel = true) const;
    // Refines the fan's brackets for the target boundary angle.
    ShootingResult solve(const ShootingFan& fan, double target_angle) const;
    ShootingResult solve_bvp(const Vec2& x, const Vec2& x_prime) const;

    // Initial velocity for the ray at `angle` from the inward normal at boundary angle theta.
    Vec2 ray_direction(double theta, double angle) const;

private:
    double exit_offset(double theta, double angle, double rtol, double atol, GeodesicPath* keep) const;
    StepControl control(double rtol, double atol) const;

    RandersSpec F_;
    SolverOptions options_;
};

GeodesicPath integrate_geodesic(const RandersSpec& F, const Vec2& x0, const Vec2& y0,
                                const SolverOptions& options = {});
ShootingResult solve_bvp(const RandersSpec& F, const Vec2& x, const Vec2& x_prime,
                         const SolverOptions& options = {});

struct ReversalReport {
    double hausdorff = 0.0;     // between the path and the reversed-endpoint solution
    double relative = 0.0;      // hausdorff / R
    double closedness = 0.0;    // closedness residual of β on the domain probe grid
    bool closed = false;        // closedness below 1e-8
    ShootingResult reversed;
};

ReversalReport reversed_geodesic_check(const GeodesicSolver& solver, const GeodesicPath& path);

struct ConjugateScanReport {
    std::size_t rays = 0;
    bool conjugate_found = false;
    double first_angle = 0.0;       // ray angle of the first conjugate point found
    double first_parameter = 0.0;   // arc length at which the Jacobi field vanished
    Vec2 first_point{};
    double min_jacobi_ratio = 0.0;  // min of J(t)/t over all rays and samples t > 0
    std::string note;
};

// Integrates J'' + K J = 0 (K the Gaussian curvature of c⁻²e) along a fan of
// rays from one boundary point and reports the first zero of J before exit.
ConjugateScanReport conjugate_point_scan(const ScalarField& c, const Domain& domain,
                                         std::size_t rays = 64, const SolverOptions& options = {});

// max |F(γ, γ̇) - 1| over the stored samples.
double speed_deviation(const RandersSpec& F, const GeodesicPath& path);
// max over samples of |ẍ + 2G(x, ẋ)| R / |ẋ|², with ẍ from five-point
// divided differences of the stored velocities.
double geodesic_residual(const RandersSpec& F, const GeodesicPath& path);

}  // namespace randers
