#include "randers/zermelo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

RiemannianMetricField MediumModel::background() const {
    if (metric) return *metric;
    return catalog::conformal(c, flavor == MetricFlavor::conformal_radial);
}

double MediumModel::sup_flow_norm() const {
    const RiemannianMetricField g = background();
    double worst = 0.0;
    for (const Vec2& x : domain.probe_grid(1000))
        worst = std::max(worst, std::sqrt(quadratic_form(g.value(x), W.value(x))));
    return worst;
}

MediumModel conformal_medium(Domain domain, ScalarField c, VectorField W, bool radial) {
    return MediumModel{std::move(domain), std::move(c), std::move(W),
                       radial ? MetricFlavor::conformal_radial : MetricFlavor::conformal, std::nullopt};
}

MediumModel general_medium(Domain domain, RiemannianMetricField g, VectorField W) {
    const MetricFlavor flavor = g.flavor();
    return MediumModel{std::move(domain), catalog::constant(1.0), std::move(W), flavor, std::move(g)};
}

RandersSpec zermelo_construct(const MediumModel& m) {
    const double sup = m.sup_flow_norm();
    if (!(sup < 1.0))
        throw ConstructionError("zermelo_construct: flow speed ‖W‖_g reaches " + shortest(sup) +
                                " >= 1 on the probe grid");
    const RiemannianMetricField g = m.background();
    const VectorField W = m.W;
    const std::string tag = "zermelo[g=" + g.description() + ", W=" + W.description() + "]";
    if (W.identically_zero()) return RandersSpec(g, catalog::zero_form(), m.domain, tag);

    auto lowered = [g, W](const Vec2& x, Dual& lambda) {
        const DualMat2 gx = g.jet(x);
        const DualVec2 w = W.jet(x);
        const DualVec2 low{gx(0, 0) * w[0] + gx(0, 1) * w[1], gx(1, 0) * w[0] + gx(1, 1) * w[1]};
        lambda = Dual(1.0) - (low[0] * w[0] + low[1] * w[1]);
        return std::pair{gx, low};
    };
    RiemannianMetricField alpha(
        [lowered](const Vec2& x) {
            Dual lambda;
            const auto [gx, low] = lowered(x, lambda);
            const Dual l2 = lambda * lambda;
            DualMat2 a;
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t j = 0; j < 2; ++j) a(i, j) = gx(i, j) / lambda + low[i] * low[j] / l2;
            return a;
        },
        MetricFlavor::general, "alpha(" + tag + ")");
    OneFormField beta(
        [lowered](const Vec2& x) {
            Dual lambda;
            const auto [gx, low] = lowered(x, lambda);
            return DualVec2{-low[0] / lambda, -low[1] / lambda};
        },
        "beta(" + tag + ")");
    return RandersSpec(std::move(alpha), std::move(beta), m.domain, tag);
}

RandersSpec conformal_specialize(const ScalarField& c, const VectorField& W, const Domain& domain, bool radial) {
    const MediumModel m = conformal_medium(domain, c, W, radial);
    const double sup = m.sup_flow_norm();
    if (!(sup < 1.0))
        throw ConstructionError("conformal_specialize: |W| reaches " + shortest(sup) +
                                " times the sound speed on the probe grid");
    const std::string tag = "conformal-zermelo[c=" + c.description() + ", W=" + W.description() + "]";
    if (W.identically_zero()) return RandersSpec(catalog::conformal(c, radial), catalog::zero_form(), domain, tag);

    RiemannianMetricField alpha(
        [c, W](const Vec2& x) {
            const Dual cx = c.dual(x);
            const DualVec2 w = W.jet(x);
            const Dual s = Dual(1.0) / (cx * cx);
            const Dual q = Dual(1.0) - s * (w[0] * w[0] + w[1] * w[1]);
            const Dual diag = s / q, cross = s * s / (q * q);
            return DualMat2{diag + cross * w[0] * w[0], cross * w[0] * w[1], cross * w[1] * w[0],
                            diag + cross * w[1] * w[1]};
        },
        MetricFlavor::general, "alpha(" + tag + ")");
    OneFormField beta(
        [c, W](const Vec2& x) {
            const Dual cx = c.dual(x);
            const DualVec2 w = W.jet(x);
            const Dual s = Dual(1.0) / (cx * cx);
            const Dual q = Dual(1.0) - s * (w[0] * w[0] + w[1] * w[1]);
            return DualVec2{-s * w[0] / q, -s * w[1] / q};
        },
        "beta(" + tag + ")");
    return RandersSpec(std::move(alpha), std::move(beta), domain, tag);
}

LinearizedSpec linearize(const ScalarField& c, const VectorField& W, const Domain& domain, bool radial) {
    double rho = 0.0;
    for (const Vec2& x : domain.probe_grid(1000)) rho = std::max(rho, norm(W.value(x)) / c.value(x));
    const std::string tag = "linearized[c=" + c.description() + ", W=" + W.description() + "]";
    OneFormField beta = W.identically_zero()
                            ? catalog::zero_form()
                            : OneFormField(
                                  [c, W](const Vec2& x) {
                                      const Dual cx = c.dual(x);
                                      const DualVec2 w = W.jet(x);
                                      const Dual s = Dual(1.0) / (cx * cx);
                                      return DualVec2{-s * w[0], -s * w[1]};
                                  },
                                  "beta(" + tag + ")");
    return {RandersSpec(catalog::conformal(c, radial), std::move(beta), domain, tag), rho};
}

HerglotzResult herglotz_check(const RadialProfile& c, double R, std::size_t points) {
    if (points < 2) throw PreconditionError("herglotz_check: need at least two grid points");
    HerglotzResult result;
    result.margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < points; ++k) {
        const double r = R * static_cast<double>(k) / static_cast<double>(points - 1);
        const double v = c.speed(r);
        const double d = (v - r * c.slope(r)) / (v * v);
        if (d < result.margin) {
            result.margin = d;
            result.worst_radius = r;
        }
    }
    result.holds = result.margin > 0.0;
    return result;
}

double travel_time_consistency(const MediumModel& m, const GeodesicPath& path) {
    const RandersSpec F = zermelo_construct(m);
    if (path.norm_tag != F.hash())
        throw TaggingError("travel_time_consistency: path was traced under spec " + path.norm_tag +
                           ", the medium builds " + F.hash());
    return std::abs(path.exit_parameter - curve_length(F, path).total);
}

}  // namespace randers
