#include "randers/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

namespace {

Mat2 values_of(const DualMat2& m) { return {m(0, 0).val, m(0, 1).val, m(1, 0).val, m(1, 1).val}; }

Mat2 derivative_of(const DualMat2& m, std::size_t k) {
    return {m(0, 0).grad[k], m(0, 1).grad[k], m(1, 0).grad[k], m(1, 1).grad[k]};
}

// 4-point Gauss-Legendre rule on [0, 1].
struct GaussLegendre4 {
    double nodes[4];
    double weights[4];
};

const GaussLegendre4& gl4() {
    static const GaussLegendre4 rule = [] {
        const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
        const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
        const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
        return GaussLegendre4{{0.5 * (1.0 - b), 0.5 * (1.0 - a), 0.5 * (1.0 + a), 0.5 * (1.0 + b)},
                              {0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb}};
    }();
    return rule;
}

// ∂F²/∂y = 2 F (a y / A + b)
Vec2 randers_gradient_squared(const Mat2& a, const Vec2& b, const Vec2& y) {
    const Vec2 ay = a * y;
    const double A = std::sqrt(dot(y, ay));
    const double F = A + dot(b, y);
    return 2.0 * F * (ay / A + b);
}

double sup_dual_ratio(const RandersSpec& F, const Vec2& x, const Vec2& omega) {
    auto ratio = [&](double theta) {
        const Vec2 u{std::cos(theta), std::sin(theta)};
        return dot(omega, u) / F.raw_eval(x, u);
    };
    constexpr int coarse = 720;
    const double step = 2.0 * std::numbers::pi / coarse;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < coarse; ++k) {
        const double v = ratio(step * k);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    // Golden-section refinement on the bracketing cells.
    double lo = step * (best - 1), hi = step * (best + 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = ratio(c), fd = ratio(d);
    while (hi - lo > 1e-12) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = ratio(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = ratio(d);
        }
    }
    return std::max({best_value, fc, fd});
}

}  // namespace

// ---------------------------------------------------------------------------
// RandersSpec
// ---------------------------------------------------------------------------

RandersSpec::RandersSpec(RiemannianMetricField riemannian, OneFormField oneform, Domain domain,
                         std::string description)
    : RandersSpec(std::move(riemannian), std::move(oneform), std::move(domain),
                  std::move(description), true) {}

RandersSpec RandersSpec::unchecked(RiemannianMetricField riemannian, OneFormField oneform,
                                   Domain domain, std::string description) {
    return RandersSpec(std::move(riemannian), std::move(oneform), std::move(domain),
                       std::move(description), false);
}

RandersSpec::RandersSpec(RiemannianMetricField riemannian, OneFormField oneform, Domain domain,
                         std::string description, bool enforce)
    : riemannian_(std::move(riemannian)),
      oneform_(std::move(oneform)),
      domain_(std::move(domain)),
      description_(std::move(description)) {
    if (description_.empty())
        description_ = "randers(alpha=" + riemannian_.description() +
                       ", beta=" + oneform_.description() + ")";
    hash_ = hex64(fnv1a(description_ + "|R=" + shortest(domain_.radius())));

    double sup_beta = 0.0;
    bool spd = true;
    for (const Vec2& x : domain_.probe_grid(1000)) {
        const Mat2 a = riemannian_.value(x);
        if (!(symmetric_eigenvalues(a)[0] > 0.0)) {
            spd = false;
            break;
        }
        const Vec2 b = oneform_.value(x);
        sup_beta = std::max(sup_beta, std::sqrt(quadratic_form(inverse(a), b)));
    }
    margin_ = spd ? 1.0 - sup_beta : -std::numeric_limits<double>::infinity();
    if (enforce && !(margin_ > 0.0)) {
        if (!spd)
            throw ConstructionError("Riemannian part of " + description_ +
                                    " is not positive definite on the probe grid");
        throw ConstructionError("1-form of " + description_ + " has dual norm " +
                                shortest(sup_beta) + " >= 1 on the probe grid");
    }
}

RandersLocal RandersSpec::local(const Vec2& x) const {
    const DualMat2 a = riemannian_.jet(x);
    const DualVec2 b = oneform_.jet(x);
    RandersLocal out;
    out.a = values_of(a);
    out.da[0] = derivative_of(a, 0);
    out.da[1] = derivative_of(a, 1);
    out.b = {b[0].val, b[1].val};
    out.db = {b[0].grad[0], b[0].grad[1], b[1].grad[0], b[1].grad[1]};
    return out;
}

double RandersSpec::raw_eval(const Vec2& x, const Vec2& y) const {
    const Mat2 a = riemannian_.value(x);
    const double alpha = std::sqrt(quadratic_form(a, y));
    if (oneform_.identically_zero()) return alpha;
    return alpha + dot(oneform_.value(x), y);
}

double RandersSpec::raw_eval_squared(const Vec2& x, const Vec2& y) const {
    const double f = raw_eval(x, y);
    return f * f;
}

void RandersSpec::require_valid(const char* what) const {
    if (!valid())
        throw ConstructionError(std::string(what) + ": spec " + description_ +
                                " has non-positive validity margin " + shortest(margin_));
}

// ---------------------------------------------------------------------------
// Norm evaluation
// ---------------------------------------------------------------------------

double eval_riemannian_norm(const RiemannianMetricField& g, const Domain& domain, const Vec2& x,
                            const Vec2& y) {
    domain.require_contains(x, "eval_riemannian_norm");
    return std::sqrt(quadratic_form(g.value(x), y));
}

double eval_randers(const RandersSpec& F, const Vec2& x, const Vec2& y) {
    F.require_valid("eval_randers");
    F.domain().require_contains(x, "eval_randers");
    return F.raw_eval(x, y);
}

double dual_norm(const RiemannianMetricField& g, const Domain& domain, const Vec2& x,
                 const Vec2& omega) {
    domain.require_contains(x, "dual_norm");
    return std::sqrt(quadratic_form(inverse(g.value(x)), omega));
}

double dual_norm(const RandersSpec& F, const Vec2& x, const Vec2& omega) {
    F.require_valid("dual_norm");
    F.domain().require_contains(x, "dual_norm");
    if (F.reversible()) return dual_norm(F.riemannian(), F.domain(), x, omega);
    return sup_dual_ratio(F, x, omega);
}

// ---------------------------------------------------------------------------
// Fundamental tensor and axiom checks
// ---------------------------------------------------------------------------

Mat2 randers_fundamental_tensor(const RandersLocal& local, const Vec2& y) {
    const Vec2 ay = local.a * y;
    const double A = std::sqrt(dot(y, ay));
    const double F = A + dot(local.b, y);
    const Vec2 l = ay / A + local.b;
    const Mat2 curvature = (1.0 / A) * local.a - (1.0 / (A * A * A)) * outer(ay, ay);
    return outer(l, l) + F * curvature;
}

FundamentalTensor fundamental_tensor(const RandersSpec& F, const Vec2& x, const Vec2& y) {
    if (y[0] == 0.0 && y[1] == 0.0)
        throw DegenerateInputError("fundamental_tensor: F is not smooth at y = 0");
    F.domain().require_contains(x, "fundamental_tensor");
    const Mat2 a = F.riemannian().value(x);
    const Vec2 b = F.oneform().value(x);
    const double h = 1e-4 * std::max(norm(y), 1.0);
    Mat2 g;
    for (std::size_t i = 0; i < 2; ++i) {
        Vec2 yp = y, ym = y;
        yp[i] += h;
        ym[i] -= h;
        const Vec2 gp = randers_gradient_squared(a, b, yp);
        const Vec2 gm = randers_gradient_squared(a, b, ym);
        for (std::size_t j = 0; j < 2; ++j) g(i, j) = 0.5 * (gp[j] - gm[j]) / (2.0 * h);
    }
    const double off = 0.5 * (g(0, 1) + g(1, 0));
    g(0, 1) = off;
    g(1, 0) = off;
    return {g};
}

std::vector<NormProbe> default_probes(const Domain& domain, std::size_t points,
                                      std::size_t directions) {
    std::vector<NormProbe> probes;
    probes.reserve(points * directions);
    for (const Vec2& x : domain.probe_grid(points)) {
        for (std::size_t k = 0; k < directions; ++k) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(directions);
            probes.push_back({x, {std::cos(theta), std::sin(theta)}});
        }
    }
    return probes;
}

ValidityReport validate_norm(const RandersSpec& F, const std::vector<NormProbe>& probes) {
    if (probes.empty()) throw PreconditionError("validate_norm: empty probe set");
    ValidityReport report;
    report.validity_margin = F.validity_margin();
    report.positivity_margin = std::numeric_limits<double>::infinity();
    report.convexity_margin = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto& [x, y] = probes[k];
        bool bad = false;
        const double f = F.raw_eval(x, y);
        const double alpha = std::sqrt(quadratic_form(F.riemannian().value(x), y));
        const double positivity = f / alpha;
        report.positivity_margin = std::min(report.positivity_margin, positivity);
        if (!(f > 0.0)) bad = true;

        for (double lambda : {0.5, 2.0}) {
            const double scaled = F.raw_eval(x, lambda * y);
            const double err = std::abs(scaled - lambda * f) / std::max(std::abs(lambda * f), 1e-300);
            report.homogeneity_error = std::max(report.homogeneity_error, err);
            if (err > 1e-10) bad = true;
        }

        const double convexity = fundamental_tensor(F, x, y).min_eigenvalue();
        report.convexity_margin = std::min(report.convexity_margin, convexity);
        if (!(convexity > 0.0)) bad = true;

        if (bad) report.flagged.push_back(k);
    }
    report.ok = report.flagged.empty() && report.validity_margin > 0.0;
    return report;
}

// ---------------------------------------------------------------------------
// Lengths
// ---------------------------------------------------------------------------

LengthBreakdown curve_length(const RandersSpec& F, const std::vector<Vec2>& polyline) {
    for (std::size_t k = 0; k < polyline.size(); ++k) {
        if (!F.domain().contains(polyline[k]))
            throw DomainError("curve_length: curve leaves the domain at parameter t = " +
                              std::to_string(k) + " (vertex " + std::to_string(k) + ")");
    }
    LengthBreakdown out;
    const auto& rule = gl4();
    for (std::size_t k = 0; k + 1 < polyline.size(); ++k) {
        const Vec2 p = polyline[k];
        const Vec2 d = polyline[k + 1] - p;
        for (int q = 0; q < 4; ++q) {
            const Vec2 x = p + rule.nodes[q] * d;
            const double w = rule.weights[q];
            const double alpha = std::sqrt(quadratic_form(F.riemannian().value(x), d));
            const double beta = dot(F.oneform().value(x), d);
            out.total += w * F.raw_eval(x, d);
            out.riemannian_part += w * alpha;
            out.oneform_part += w * beta;
        }
    }
    return out;
}

LengthBreakdown curve_length(const RandersSpec& F, const GeodesicPath& path) {
    for (const PathSample& s : path.samples) {
        if (!F.domain().contains(s.x))
            throw DomainError("curve_length: path leaves the domain at parameter t = " +
                              shortest(s.t));
    }
    LengthBreakdown out;
    const auto& rule = gl4();
    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
        for (int q = 0; q < 4; ++q) {
            const HermitePoint hp = hermite_segment(path, k, rule.nodes[q]);
            const double w = rule.weights[q];
            const double alpha = std::sqrt(quadratic_form(F.riemannian().value(hp.x), hp.dx_ds));
            const double beta = dot(F.oneform().value(hp.x), hp.dx_ds);
            out.total += w * F.raw_eval(hp.x, hp.dx_ds);
            out.riemannian_part += w * alpha;
            out.oneform_part += w * beta;
        }
    }
    return out;
}

RandersSpec reverse_norm(const RandersSpec& F) {
    std::string description = "reverse(" + F.description() + ")";
    if (F.valid())
        return RandersSpec(F.riemannian(), F.oneform().negated(), F.domain(), std::move(description));
    return RandersSpec::unchecked(F.riemannian(), F.oneform().negated(), F.domain(),
                                  std::move(description));
}

double closedness_residual(const OneFormField& beta, const std::vector<Vec2>& probes) {
    double worst = 0.0;
    for (const Vec2& x : probes) {
        const Mat2 j = beta.jacobian(x);
        worst = std::max(worst, std::abs(j(1, 0) - j(0, 1)));
    }
    return worst;
}

}  // namespace randers
