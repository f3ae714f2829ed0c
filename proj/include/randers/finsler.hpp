#pragma once

// Randers norms F(x, y) = sqrt(a_ij(x) y^i y^j) + b_i(x) y^i and their
// pointwise geometry: norm evaluation, dual norms, fundamental tensor,
// validity checks of the norm axioms, and curve lengths.

#include <cstddef>
#include <string>
#include <vector>

#include "randers/autodiff.hpp"
#include "randers/fields.hpp"
#include "randers/path.hpp"

namespace randers {

// Coefficients of a Randers norm at one point with their first x-derivatives.
struct RandersLocal {
    Mat2 a;      // a_ij
    Mat2 da[2];  // ∂a_ij/∂x^k for k = 0, 1
    Vec2 b;      // b_i
    Mat2 db;     // db(i, k) = ∂b_i/∂x^k
};

class RandersSpec {
public:
    // Throws ConstructionError unless the validity margin 1 - sup ||β||_{α*}
    // over the domain's probe grid is positive.
    RandersSpec(RiemannianMetricField riemannian, OneFormField oneform, Domain domain,
                std::string description = {});

    // Builds the norm without enforcing the margin. Such a norm can be
    // inspected by validate_norm but refuses eval_randers and every solver.
    static RandersSpec unchecked(RiemannianMetricField riemannian, OneFormField oneform,
                                 Domain domain, std::string description = {});

    const RiemannianMetricField& riemannian() const noexcept { return riemannian_; }
    const OneFormField& oneform() const noexcept { return oneform_; }
    const Domain& domain() const noexcept { return domain_; }
    const std::string& description() const noexcept { return description_; }
    // Stable identifier derived from the description.
    const std::string& hash() const noexcept { return hash_; }

    double validity_margin() const noexcept { return margin_; }
    bool valid() const noexcept { return margin_ > 0.0; }
    bool reversible() const noexcept { return oneform_.identically_zero(); }

    RandersLocal local(const Vec2& x) const;
    // Evaluation without domain or validity checks, for solver inner loops.
    double raw_eval(const Vec2& x, const Vec2& y) const;
    double raw_eval_squared(const Vec2& x, const Vec2& y) const;

    // Throws ConstructionError if the norm is not valid.
    void require_valid(const char* what) const;

private:
    RandersSpec(RiemannianMetricField riemannian, OneFormField oneform, Domain domain,
                std::string description, bool enforce);

    RiemannianMetricField riemannian_;
    OneFormField oneform_;
    Domain domain_;
    std::string description_;
    std::string hash_;
    double margin_ = 0.0;
};

// g_ij(x, y) = ½ ∂²F²/∂y^i∂y^j
struct FundamentalTensor {
    Mat2 g;
    double min_eigenvalue() const { return symmetric_eigenvalues(g)[0]; }
};

struct LengthBreakdown {
    double total = 0.0;
    double riemannian_part = 0.0;
    double oneform_part = 0.0;
};

struct NormProbe {
    Vec2 x;
    Vec2 y;
};

struct ValidityReport {
    bool ok = true;
    double validity_margin = 0.0;     // 1 - sup ||β||_{α*} on the probe grid
    double positivity_margin = 0.0;   // min F(x, y) / α(x, y)
    double homogeneity_error = 0.0;   // max relative |F(λy) - λF(y)|
    double convexity_margin = 0.0;    // min eigenvalue of the fundamental tensor
    std::vector<std::size_t> flagged; // indices of probes violating an axiom
};

// sqrt(g_ij(x) y^i y^j)
double eval_riemannian_norm(const RiemannianMetricField& g, const Domain& domain, const Vec2& x,
                            const Vec2& y);
double eval_randers(const RandersSpec& F, const Vec2& x, const Vec2& y);

// sup { ω(y) : norm(x, y) = 1 }
double dual_norm(const RiemannianMetricField& g, const Domain& domain, const Vec2& x,
                 const Vec2& omega);
double dual_norm(const RandersSpec& F, const Vec2& x, const Vec2& omega);

// Points from the domain's probe grid, each with `directions` equally spaced
// unit directions.
std::vector<NormProbe> default_probes(const Domain& domain, std::size_t points = 200,
                                      std::size_t directions = 8);
ValidityReport validate_norm(const RandersSpec& F, const std::vector<NormProbe>& probes);

// Central differences of the analytic y-gradient of F², step 1e-4 max(|y|, 1).
FundamentalTensor fundamental_tensor(const RandersSpec& F, const Vec2& x, const Vec2& y);
// Closed-form Randers fundamental tensor from the local coefficients.
Mat2 randers_fundamental_tensor(const RandersLocal& local, const Vec2& y);

// F-length of a polyline with straight segments, composite 4-point Gauss-Legendre.
LengthBreakdown curve_length(const RandersSpec& F, const std::vector<Vec2>& polyline);
// F-length of a traced geodesic along its cubic Hermite interpolant.
LengthBreakdown curve_length(const RandersSpec& F, const GeodesicPath& path);

// Spec of F(x, -y): same Riemannian part, negated 1-form.
RandersSpec reverse_norm(const RandersSpec& F);

// max |∂β_2/∂x^1 - ∂β_1/∂x^2| over the probes.
double closedness_residual(const OneFormField& beta, const std::vector<Vec2>& probes);

}  // namespace randers
