#include "randers/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
}

bool on_boundary(const Domain& d, const Vec2& x) {
    return std::abs(norm(x) - d.radius()) <= 1e-9 * d.radius();
}

// ∂F/∂y at (x, y)
Vec2 covelocity(const RandersSpec& F, const Vec2& x, const Vec2& y) {
    const Mat2 a = F.riemannian().value(x);
    const Vec2 ay = a * y;
    return ay / std::sqrt(dot(y, ay)) + F.oneform().value(x);
}

struct SpeedInvariant {
    const RandersSpec* F;
    template <std::size_t N>
    double operator()(const State<N>& s) const {
        return F->raw_eval({s[0], s[1]}, {s[2], s[3]});
    }
};

struct GeodesicRhs {
    const RandersSpec* F;
    State<4> operator()(const State<4>& s) const {
        const Vec2 x{s[0], s[1]}, y{s[2], s[3]};
        const Vec2 G = spray(F->local(x), y);
        return {s[2], s[3], -2.0 * G[0], -2.0 * G[1]};
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Spray
// ---------------------------------------------------------------------------

Vec2 spray(const RandersLocal& local, const Vec2& y) {
    const Vec2 ay = local.a * y;
    const double A = std::sqrt(dot(y, ay));
    const double Fv = A + dot(local.b, y);
    const Vec2 l = ay / A + local.b;

    Vec2 dF, rhs;
    Vec2 dl[2];
    for (std::size_t k = 0; k < 2; ++k) {
        const Vec2 day = local.da[k] * y;
        const double dA = dot(y, day) / (2.0 * A);
        const Vec2 db_k{local.db(0, k), local.db(1, k)};
        dF[k] = dA + dot(db_k, y);
        dl[k] = day / A - (dA / (A * A)) * ay + db_k;
    }
    for (std::size_t m = 0; m < 2; ++m) {
        double v = -Fv * dF[m];
        for (std::size_t k = 0; k < 2; ++k) v += y[k] * (dF[k] * l[m] + Fv * dl[k][m]);
        rhs[m] = v;
    }
    const Mat2 g = randers_fundamental_tensor(local, y);
    if (!(determinant(g) > 0.0) || !(g(0, 0) > 0.0))
        throw ConvexityError("fundamental tensor is not positive definite");
    return 0.5 * (inverse(g) * rhs);
}

Vec2 spray(const RandersSpec& F, const Vec2& x, const Vec2& y) {
    if (y[0] == 0.0 && y[1] == 0.0) throw DegenerateInputError("spray: y must be nonzero");
    F.domain().require_contains(x, "spray");
    return spray(F.local(x), y);
}

// ---------------------------------------------------------------------------
// GeodesicSolver
// ---------------------------------------------------------------------------

GeodesicSolver::GeodesicSolver(RandersSpec F, SolverOptions options)
    : F_(std::move(F)), options_(options) {
    F_.require_valid("GeodesicSolver");
    const ValidityReport report = validate_norm(F_, default_probes(F_.domain()));
    if (!report.ok)
        throw ConstructionError("GeodesicSolver: spec " + F_.description() + " fails the norm axioms at " +
                                std::to_string(report.flagged.size()) + " probes");
    if (options_.sweep < 2) throw PreconditionError("GeodesicSolver: sweep needs at least 2 rays");
}

StepControl GeodesicSolver::control(double rtol, double atol) const {
    const double R = F_.domain().radius();
    StepControl c;
    c.rtol = rtol;
    c.atol = atol;
    c.h_max = options_.h_max * R;
    c.h_init = 0.01 * R;
    c.max_steps = options_.max_steps;
    c.exit_tol = options_.exit_tol;
    return c;
}

GeodesicPath GeodesicSolver::integrate(const Vec2& x0, const Vec2& y0) const {
    const Domain& domain = F_.domain();
    domain.require_contains(x0, "integrate_geodesic");
    if (y0[0] == 0.0 && y0[1] == 0.0) throw DegenerateInputError("integrate_geodesic: y0 must be nonzero");
    const bool start_on_boundary = on_boundary(domain, x0);
    if (start_on_boundary && !(dot(y0, x0) < 0.0))
        throw PreconditionError("integrate_geodesic: initial direction at a boundary point must point inward");

    const Vec2 y = y0 / F_.raw_eval(x0, y0);
    GeodesicPath path;
    path.norm_tag = F_.hash();
    const GeodesicRhs rhs{&F_};
    trace_to_boundary<4>(rhs, State<4>{x0[0], x0[1], y[0], y[1]}, domain,
                         control(options_.rtol, options_.atol), start_on_boundary,
                         [&](double t, const State<4>& s) {
                             path.samples.push_back({t, {s[0], s[1]}, {s[2], s[3]}});
                         },
                         SpeedInvariant{&F_});
    path.exit_point = path.samples.back().x;
    path.exit_parameter = path.samples.back().t;
    path.F_length = curve_length(F_, path).total;
    return path;
}

Vec2 GeodesicSolver::ray_direction(double theta, double angle) const {
    const Vec2 inward{-std::cos(theta), -std::sin(theta)};
    const Vec2 tangent{-std::sin(theta), std::cos(theta)};
    return std::cos(angle) * inward + std::sin(angle) * tangent;
}

double GeodesicSolver::exit_offset(double theta, double angle, double rtol, double atol,
                                   GeodesicPath* keep) const {
    const Vec2 x0 = F_.domain().boundary_point(theta);
    if (keep) {
        *keep = integrate(x0, ray_direction(theta, angle));
        const Vec2 e = keep->exit_point;
        return wrap_angle(std::atan2(e[1], e[0]) - theta);
    }
    const Vec2 u = ray_direction(theta, angle);
    const Vec2 y = u / F_.raw_eval(x0, u);
    const GeodesicRhs rhs{&F_};
    const auto end = trace_to_boundary<4>(rhs, State<4>{x0[0], x0[1], y[0], y[1]}, F_.domain(),
                                          control(rtol, atol), true, [](double, const State<4>&) {},
                                          SpeedInvariant{&F_});
    return wrap_angle(std::atan2(end.state[1], end.state[0]) - theta);
}

ShootingFan GeodesicSolver::fan(double source_angle, bool parallel) const {
    ShootingFan out;
    out.source_angle = source_angle;
    const std::size_t n = options_.sweep;
    out.rays.resize(n);
    const double fan_atol = std::max(options_.atol, 1e-10 * F_.domain().radius());
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = -0.5 * std::numbers::pi + (static_cast<double>(k) + 0.5) * std::numbers::pi /
                                                          static_cast<double>(n);
        double offset = std::numeric_limits<double>::quiet_NaN();
        try {
            offset = exit_offset(source_angle, angle, options_.fan_rtol, fan_atol, nullptr);
        } catch (const Error&) {
        }
        out.rays[k] = {angle, offset};
    }
    for (const FanRay& r : out.rays)
        if (std::isnan(r.offset)) ++out.failures;
    return out;
}

ShootingResult GeodesicSolver::solve(const ShootingFan& fan, double target_angle) const {
    const double R = F_.domain().radius();
    const double target = wrap_angle(target_angle - fan.source_angle);
    if (target < 1e-12 || target > two_pi - 1e-12)
        throw PreconditionError("solve_bvp: source and target coincide");

    // Fan nodes bracketed by the tangential limits, where the exit point
    // approaches the source from either side.
    std::vector<FanRay> nodes;
    nodes.reserve(fan.rays.size() + 2);
    nodes.push_back({-0.5 * std::numbers::pi, two_pi});
    nodes.insert(nodes.end(), fan.rays.begin(), fan.rays.end());
    nodes.push_back({0.5 * std::numbers::pi, 0.0});
    const std::size_t last = nodes.size() - 1;

    std::vector<std::size_t> brackets;
    for (std::size_t k = 0; k < last; ++k) {
        const double o1 = nodes[k].offset, o2 = nodes[k + 1].offset;
        if (std::isnan(o1) || std::isnan(o2) || std::abs(o2 - o1) > std::numbers::pi) continue;
        if ((o1 - target < 0.0) != (o2 - target < 0.0)) brackets.push_back(k);
    }
    const std::string pair = "boundary pair (" + shortest(fan.source_angle) + " -> " +
                             shortest(target_angle) + ")";
    if (brackets.empty()) throw ConnectivityError("no geodesic found for " + pair);
    if (brackets.size() > 1)
        throw NonAdmissibleError(std::to_string(brackets.size()) + " geodesics found for " + pair);

    auto miss_at = [&](std::size_t k) -> double {
        if (k == 0 || k == last) return nodes[k].offset - target;
        return exit_offset(fan.source_angle, nodes[k].angle, options_.rtol, options_.atol, nullptr) - target;
    };
    auto evaluate = [&](double angle) {
        return exit_offset(fan.source_angle, angle, options_.rtol, options_.atol, nullptr) - target;
    };

    std::size_t lo = brackets.front(), hi = lo + 1;
    double a = nodes[lo].angle, b = nodes[hi].angle;
    double ma = miss_at(lo), mb = miss_at(hi);
    if ((ma < 0.0) == (mb < 0.0)) {
        // The fan was traced at a looser tolerance; widen by one ray on each side.
        lo = lo > 0 ? lo - 1 : lo;
        hi = std::min(hi + 1, last);
        a = nodes[lo].angle;
        b = nodes[hi].angle;
        ma = miss_at(lo);
        mb = miss_at(hi);
        if ((ma < 0.0) == (mb < 0.0))
            throw ConvergenceError("solve_bvp: bracket lost under refinement for " + pair);
    }

    double best = std::abs(ma) < std::abs(mb) ? a : b;
    double best_miss = std::min(std::abs(ma), std::abs(mb));
    if (lo == 0 || hi == last) best_miss = std::numeric_limits<double>::infinity();
    int side = 0;
    for (int it = 0; it < 200 && best_miss > options_.refine_tol && b - a > 1e-15; ++it) {
        double c = b - mb * (b - a) / (mb - ma);
        const double margin = 1e-3 * (b - a);
        if (!(c > a + margin && c < b - margin) || it % 8 == 7) c = 0.5 * (a + b);
        const double mc = evaluate(c);
        if (std::abs(mc) < best_miss) {
            best_miss = std::abs(mc);
            best = c;
        }
        if ((mc < 0.0) == (ma < 0.0)) {
            a = c;
            ma = mc;
            if (side == -1) mb *= 0.5;
            side = -1;
        } else {
            b = c;
            mb = mc;
            if (side == 1) ma *= 0.5;
            side = 1;
        }
    }

    ShootingResult result;
    result.angle = best;
    result.branch_count = 1;
    exit_offset(fan.source_angle, best, options_.rtol, options_.atol, &result.path);
    const Vec2 target_point = F_.domain().boundary_point(target_angle);
    const Vec2 exit = result.path.exit_point;
    result.miss = norm(exit - target_point);
    if (result.miss > options_.miss_tol * R)
        throw ConvergenceError("solve_bvp: endpoint miss " + shortest(result.miss) + " exceeds " +
                               shortest(options_.miss_tol * R) + " for " + pair);
    const PathSample& end = result.path.samples.back();
    result.distance = result.path.F_length + dot(covelocity(F_, end.x, end.y), target_point - exit);
    return result;
}

ShootingResult GeodesicSolver::solve_bvp(const Vec2& x, const Vec2& x_prime) const {
    const Domain& d = F_.domain();
    if (!on_boundary(d, x) || !on_boundary(d, x_prime))
        throw PreconditionError("solve_bvp: both endpoints must lie on the boundary circle");
    if (norm(x - x_prime) <= 1e-12 * d.radius())
        throw PreconditionError("solve_bvp: endpoints coincide");
    const ShootingFan f = fan(std::atan2(x[1], x[0]));
    return solve(f, std::atan2(x_prime[1], x_prime[0]));
}

GeodesicPath integrate_geodesic(const RandersSpec& F, const Vec2& x0, const Vec2& y0,
                                const SolverOptions& options) {
    return GeodesicSolver(F, options).integrate(x0, y0);
}

ShootingResult solve_bvp(const RandersSpec& F, const Vec2& x, const Vec2& x_prime,
                         const SolverOptions& options) {
    return GeodesicSolver(F, options).solve_bvp(x, x_prime);
}

// ---------------------------------------------------------------------------
// Probes
// ---------------------------------------------------------------------------

ReversalReport reversed_geodesic_check(const GeodesicSolver& solver, const GeodesicPath& path) {
    const RandersSpec& F = solver.spec();
    if (path.norm_tag != F.hash())
        throw TaggingError("reversed_geodesic_check: path was produced by a different spec");
    ReversalReport report;
    report.reversed = solver.solve_bvp(path.exit_point, path.start());
    report.hausdorff = hausdorff_distance(report.reversed.path, path);
    report.relative = report.hausdorff / F.domain().radius();
    report.closedness = closedness_residual(F.oneform(), F.domain().probe_grid(1000));
    report.closed = report.closedness < 1e-8;
    return report;
}

ConjugateScanReport conjugate_point_scan(const ScalarField& c, const Domain& domain, std::size_t rays,
                                         const SolverOptions& options) {
    if (rays == 0) throw PreconditionError("conjugate_point_scan: need at least one ray");
    const RandersSpec F(catalog::conformal(c, true), catalog::zero_form(), domain);
    const GeodesicSolver solver(F, options);
    const double R = domain.radius();
    StepControl control;
    control.rtol = options.rtol;
    control.atol = options.atol;
    control.h_max = options.h_max * R;
    control.h_init = 0.01 * R;
    control.max_steps = options.max_steps;
    control.exit_tol = options.exit_tol;

    auto rhs = [&F, &c](const State<6>& s) -> State<6> {
        const Vec2 x{s[0], s[1]}, y{s[2], s[3]};
        const Vec2 G = spray(F.local(x), y);
        const Jet2 j = c.jet(x);
        const double K = j.val * (j.hess(0, 0) + j.hess(1, 1)) - norm_squared(j.grad);
        return {s[2], s[3], -2.0 * G[0], -2.0 * G[1], s[5], -K * s[4]};
    };

    ConjugateScanReport report;
    report.rays = rays;
    report.min_jacobi_ratio = std::numeric_limits<double>::infinity();
    std::size_t failed = 0;
    const double theta = 0.0;
    const Vec2 x0 = domain.boundary_point(theta);
    for (std::size_t k = 0; k < rays; ++k) {
        const double angle = -0.5 * std::numbers::pi +
                             (static_cast<double>(k) + 0.5) * std::numbers::pi / static_cast<double>(rays);
        const Vec2 u = solver.ray_direction(theta, angle);
        const Vec2 y = u / F.raw_eval(x0, u);
        double t_prev = 0.0, j_prev = 0.0;
        bool found = false;
        try {
            trace_to_boundary<6>(rhs, State<6>{x0[0], x0[1], y[0], y[1], 0.0, 1.0}, domain, control, true,
                                 [&](double t, const State<6>& s) {
                                     if (t <= 0.0) return;
                                     const double J = s[4];
                                     report.min_jacobi_ratio = std::min(report.min_jacobi_ratio, J / t);
                                     if (!found && J <= 0.0) {
                                         found = true;
                                         const double t_star = t_prev + (t - t_prev) * j_prev / (j_prev - J);
                                         if (!report.conjugate_found || t_star < report.first_parameter) {
                                             report.conjugate_found = true;
                                             report.first_angle = angle;
                                             report.first_parameter = t_star;
                                             report.first_point = {s[0], s[1]};
                                         }
                                     }
                                     t_prev = t;
                                     j_prev = J;
                                 },
                                 SpeedInvariant{&F});
        } catch (const Error&) {
            ++failed;
        }
    }
    report.note = report.conjugate_found ? "conjugate point found on the fan"
                                         : "none found on a finite fan (evidence, not proof)";
    if (failed > 0) report.note += "; " + std::to_string(failed) + " rays failed to exit";
    return report;
}

double speed_deviation(const RandersSpec& F, const GeodesicPath& path) {
    double worst = 0.0;
    for (const PathSample& s : path.samples) worst = std::max(worst, std::abs(F.raw_eval(s.x, s.y) - 1.0));
    return worst;
}

double geodesic_residual(const RandersSpec& F, const GeodesicPath& path) {
    const double R = F.domain().radius();
    const auto& s = path.samples;
    if (s.size() < 5) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        // Derivative of the quartic through five neighbouring velocity samples.
        const std::size_t first = std::min(k >= 2 ? k - 2 : 0, s.size() - 5);
        bool crowded = false;
        for (std::size_t j = first; j + 1 < first + 5; ++j)
            if (s[j + 1].t - s[j].t < 1e-6 * R) crowded = true;
        if (crowded) continue;
        Vec2 acc{};
        const double tk = s[k].t;
        for (std::size_t j = first; j < first + 5; ++j) {
            double w;
            if (j == k) {
                w = 0.0;
                for (std::size_t m = first; m < first + 5; ++m)
                    if (m != k) w += 1.0 / (tk - s[m].t);
            } else {
                double num = 1.0, den = 1.0;
                for (std::size_t m = first; m < first + 5; ++m) {
                    if (m == j) continue;
                    den *= s[j].t - s[m].t;
                    if (m != k) num *= tk - s[m].t;
                }
                w = num / den;
            }
            acc = acc + w * s[j].y;
        }
        const Vec2 residual = acc + 2.0 * spray(F.local(s[k].x), s[k].y);
        worst = std::max(worst, norm(residual) * R / norm_squared(s[k].y));
    }
    return worst;
}

}  // namespace randers
