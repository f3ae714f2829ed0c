#pragma once

// Moving-medium models and the Randers norms of their least-time paths:
// the Zermelo construction, its conformal specialization and first-order
// linearization, the travel-time identity and the Herglotz condition.

#include <cstddef>
#include <optional>
#include <string>

#include "randers/fields.hpp"
#include "randers/finsler.hpp"
#include "randers/path.hpp"

namespace randers {

// Sound speed c, flow W and background metric g (c⁻²e unless a general
// metric is supplied) on a domain.
struct MediumModel {
    Domain domain;
    ScalarField c;
    VectorField W;
    MetricFlavor flavor = MetricFlavor::conformal;
    std::optional<RiemannianMetricField> metric;

    RiemannianMetricField background() const;
    // sup ‖W‖_g over the domain's probe grid
    double sup_flow_norm() const;
};

MediumModel conformal_medium(Domain domain, ScalarField c, VectorField W, bool radial = false);
MediumModel general_medium(Domain domain, RiemannianMetricField g, VectorField W);

// α_ij = g_ij/λ + W_iW_j/λ², β_i = -W_i/λ with W_i = g_ij W^j and λ = 1 - ‖W‖_g².
RandersSpec zermelo_construct(const MediumModel& m);

// The same norm for g = c⁻²e written directly in terms of c and W.
RandersSpec conformal_specialize(const ScalarField& c, const VectorField& W, const Domain& domain = Domain{},
                                 bool radial = false);

struct LinearizedSpec {
    RandersSpec spec;
    double rho;  // sup |W|/c over the probe grid
};

// α = c⁻²e, β = -W/c².
LinearizedSpec linearize(const ScalarField& c, const VectorField& W, const Domain& domain = Domain{},
                         bool radial = false);

struct HerglotzResult {
    bool holds = false;
    double margin = 0.0;        // min of d/dr(r/c) on the grid
    double worst_radius = 0.0;  // where the minimum is attained
};

// Evaluates d/dr(r/c(r)) = (c - r c')/c² at `points` equally spaced radii in [0, R].
HerglotzResult herglotz_check(const RadialProfile& c, double R, std::size_t points = 1000);

// |T - L_F(γ)| for a path traced under zermelo_construct(m).
double travel_time_consistency(const MediumModel& m, const GeodesicPath& path);

}  // namespace randers
