#pragma once

// The inverse pipeline: from boundary distance data recover the line
// integrals of β, the boundary potential relating two data sets, the
// symmetrized distances and, for radial sound speeds, the profile c(r).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "randers/boundary_data.hpp"
#include "randers/fields.hpp"
#include "randers/finsler.hpp"

namespace randers {

// ∫_γ β = (D(i, j) - D(j, i))/2 for the geodesic from x_i to x_j.
Matrix recover_beta_integrals(const BoundaryDistanceData& data);
// d_{F_r}(x_i, x_j) = (D(i, j) + D(j, i))/2.
Matrix recover_symmetric_data(const BoundaryDistanceData& data);

struct BoundaryPotential {
    std::vector<double> values;        // φ₂ - φ₁ at the boundary points, normalized
    double normalization_constant = 0; // constant subtracted from the least-squares solution
    double system_residual = 0;        // max |φ_j - φ_i - (anti₂ - anti₁)_ij|
    double spread = 0;                 // max - min of the values
    bool consistent = true;            // system_residual within tolerance
};

// Least squares for φ_j - φ_i = anti₂(i, j) - anti₁(i, j) over all pairs.
// Without a reference the values have zero mean; with reference boundary
// values the additive constant is chosen to match their mean.
BoundaryPotential recover_boundary_potential(const BoundaryDistanceData& d1, const BoundaryDistanceData& d2,
                                             double tolerance = 1e-6,
                                             const std::optional<std::vector<double>>& reference = std::nullopt);

struct RecoveredProfile {
    std::vector<double> radius;       // turning radii, ascending
    std::vector<double> speed;        // c at those radii
    std::vector<double> separation;   // T(Δ) nodes: Δ_k
    std::vector<double> travel_time;  //              T(Δ_k)
    std::vector<double> ray_parameter;//              p(Δ_k)
    double same_separation_spread = 0;  // max over Δ of the spread of T among pairs with that Δ
    bool radially_consistent = true;    // spread within tolerance
    bool monotone = true;

    // Linear interpolation of the recovered speed at radius r.
    double speed_at(double r) const;
};

struct InversionOptions {
    std::size_t min_points = 64;
    std::size_t samples = 400;         // turning points evaluated in (0, π)
    double spread_tolerance = 1e-6;    // relative to the largest travel time
};

// Herglotz-Wiechert inversion of symmetric data sampled uniformly in angle.
// Throws InversionError when the ray parameter p(Δ) fails to decrease.
RecoveredProfile herglotz_invert(const Matrix& sym, const std::vector<double>& angles, double R,
                                 const InversionOptions& options = {});

struct GaugeReport {
    double gauge_residual = 0;     // max over interior probes of |β₂ - β₁ - dφ|
    double boundary_residual = 0;  // max over boundary probes of |φ|
    bool psi_identity = false;     // conformal-radial case: the diffeomorphism is the identity
    std::optional<double> profile_deviation;  // max |c₂ - c₁| on [0, R]
};

GaugeReport verify_gauge(const OneFormField& beta1, const OneFormField& beta2, const ScalarField& phi,
                         const Domain& domain, const std::optional<RadialProfile>& c1 = std::nullopt,
                         const std::optional<RadialProfile>& c2 = std::nullopt);

struct Scenario {
    std::string name;
    RandersSpec spec;
    std::optional<ScalarField> potential;    // ground truth: β of this scenario = β_base + dφ
    std::optional<RadialProfile> profile;    // conformal-radial sound speed, when known
};

struct RigidityOptions {
    std::size_t n = 16;
    SolverOptions solver;
    double data_tolerance = 2e-8;
    double potential_tolerance = 1e-6;
    double closedness_tolerance = 1e-8;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    bool invert_profile = true;  // only when both scenarios are conformal-radial and n ≥ 64
};

struct ClauseVerdicts {
    bool clause_i = false;    // boundary distance data agree
    bool clause_ii = false;   // potential constant on ∂M and symmetric data agree
    bool equivalence_consistent = false;  // clause (i) holds exactly when clause (ii) does
    std::optional<bool> gauge_verified;   // against the ground-truth potential
    std::optional<bool> profiles_agree;   // conformal-radial instance: recovered c agree
};

struct RecoveryReport {
    std::string scenario1, scenario2;
    std::size_t n = 0;
    double radius = 1;
    std::optional<std::string> hypothesis_violation;

    double closedness1 = 0, closedness2 = 0;
    std::optional<BoundaryDistanceData> data1, data2;
    Matrix beta_integrals1, beta_integrals2;
    Matrix symmetric1, symmetric2;
    double data_difference = 0;
    double symmetric_difference = 0;
    double decomposition_residual = 0;  // max |sym + anti - D| over both data sets
    std::optional<BoundaryPotential> potential;
    std::optional<GaugeReport> gauge;
    std::optional<RecoveredProfile> profile1, profile2;
    std::optional<double> profile_deviation;  // max relative |c₂ - c₁| on [0.05R, R]
    ClauseVerdicts verdicts;
    bool verdict = false;  // all residuals under tolerance and no hypothesis violated
    std::vector<std::string> notes;
};

// Runs both forward simulations (unless data are supplied), decomposes,
// recovers the potential and symmetric data, optionally inverts the profiles,
// verifies the gauge against ground truth and renders per-clause verdicts.
// Throws PreconditionError for non-simply-connected domains.
RecoveryReport rigidity_report(const Scenario& s1, const Scenario& s2, const RigidityOptions& options = {},
                               const std::optional<BoundaryDistanceData>& data1 = std::nullopt,
                               const std::optional<BoundaryDistanceData>& data2 = std::nullopt);

// report.txt with key-value sections plus CSV attachments in `directory`.
void write_report(const RecoveryReport& report, const std::string& directory);
std::string render_report(const RecoveryReport& report);

}  // namespace randers
