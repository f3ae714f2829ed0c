#include "randers/recovery.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

Matrix recover_beta_integrals(const BoundaryDistanceData& data) { return decompose(data).anti; }

Matrix recover_symmetric_data(const BoundaryDistanceData& data) { return decompose(data).sym; }

// ---------------------------------------------------------------------------
// Boundary potential
// ---------------------------------------------------------------------------

BoundaryPotential recover_boundary_potential(const BoundaryDistanceData& d1, const BoundaryDistanceData& d2,
                                             double tolerance, const std::optional<std::vector<double>>& reference) {
    const std::size_t n = d1.size();
    if (d2.size() != n || d1.angles != d2.angles)
        throw PreconditionError("recover_boundary_potential: the data sets use different boundary points");
    if (reference && reference->size() != n)
        throw PreconditionError("recover_boundary_potential: reference has the wrong length");
    const Matrix a1 = recover_beta_integrals(d1), a2 = recover_beta_integrals(d2);

    struct Equation {
        std::size_t i, j;
        double rhs;
    };
    std::vector<Equation> equations;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double rhs = a2(i, j) - a1(i, j);
            if (std::isfinite(rhs)) equations.push_back({i, j, rhs});
        }
    if (equations.empty()) throw PreconditionError("recover_boundary_potential: no usable pairs");

    // One extra row pins the mean to zero.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(equations.size() + 1),
                                              static_cast<Eigen::Index>(n));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
    for (std::size_t r = 0; r < equations.size(); ++r) {
        A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(equations[r].j)) = 1.0;
        A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(equations[r].i)) = -1.0;
        b(static_cast<Eigen::Index>(r)) = equations[r].rhs;
    }
    A.row(A.rows() - 1).setOnes();
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);

    BoundaryPotential out;
    out.values.assign(x.data(), x.data() + n);
    const double mean = x.mean();
    double shift = mean;
    if (reference) {
        double ref_mean = 0.0;
        for (double v : *reference) ref_mean += v;
        ref_mean /= static_cast<double>(n);
        shift = mean - ref_mean;
    }
    for (double& v : out.values) v -= shift;
    out.normalization_constant = shift;
    for (const Equation& e : equations)
        out.system_residual =
            std::max(out.system_residual, std::abs(out.values[e.j] - out.values[e.i] - e.rhs));
    const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
    out.spread = *hi - *lo;
    out.consistent = out.system_residual <= tolerance;
    return out;
}

// ---------------------------------------------------------------------------
// Herglotz-Wiechert inversion
// ---------------------------------------------------------------------------

namespace {

// Derivative at x[k] of the polynomial through x[first..first+count).
double lagrange_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t k, std::size_t first,
                      std::size_t count) {
    double slope = 0.0;
    const double xk = x[k];
    for (std::size_t j = first; j < first + count; ++j) {
        double w;
        if (j == k) {
            w = 0.0;
            for (std::size_t m = first; m < first + count; ++m)
                if (m != k) w += 1.0 / (xk - x[m]);
        } else {
            double num = 1.0, den = 1.0;
            for (std::size_t m = first; m < first + count; ++m) {
                if (m == j) continue;
                den *= x[j] - x[m];
                if (m != k) num *= xk - x[m];
            }
            w = num / den;
        }
        slope += w * y[j];
    }
    return slope;
}

// Shape-preserving cubic Hermite interpolant with Fritsch-Carlson limited slopes.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
        : x_(std::move(x)), y_(std::move(y)), d_(std::move(slopes)) {
        const std::size_t n = x_.size();
        std::vector<double> secant(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) secant[k] = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
        for (std::size_t k = 0; k < n; ++k) {
            const bool left = k > 0, right = k + 1 < n;
            if (left && right && (secant[k - 1] * secant[k] <= 0.0)) d_[k] = 0.0;
            if (right && secant[k] * d_[k] < 0.0) d_[k] = 0.0;
            if (left && secant[k - 1] * d_[k] < 0.0) d_[k] = 0.0;
        }
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (secant[k] == 0.0) {
                d_[k] = d_[k + 1] = 0.0;
                continue;
            }
            const double a = d_[k] / secant[k], b = d_[k + 1] / secant[k];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double t = 3.0 / std::sqrt(s);
                d_[k] = t * a * secant[k];
                d_[k + 1] = t * b * secant[k];
            }
        }
    }

    double derivative(double x) const {
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double s = (x - x_[k]) / h;
        const double d00 = 6 * s * s - 6 * s, d10 = 3 * s * s - 4 * s + 1;
        const double d01 = -6 * s * s + 6 * s, d11 = 3 * s * s - 2 * s;
        return (d00 * y_[k] + d01 * y_[k + 1]) / h + d10 * d_[k] + d11 * d_[k + 1];
    }

    const std::vector<double>& slopes() const { return d_; }

private:
    std::size_t segment(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        return std::min(k, x_.size() - 2);
    }

    std::vector<double> x_, y_, d_;
};

}  // namespace

double RecoveredProfile::speed_at(double r) const {
    if (radius.empty()) throw PreconditionError("speed_at: empty profile");
    if (r <= radius.front()) return speed.front();
    if (r >= radius.back()) return speed.back();
    const auto it = std::upper_bound(radius.begin(), radius.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - radius.begin()) - 1;
    const double w = (r - radius[k]) / (radius[k + 1] - radius[k]);
    return (1.0 - w) * speed[k] + w * speed[k + 1];
}

RecoveredProfile herglotz_invert(const Matrix& sym, const std::vector<double>& angles, double R,
                                 const InversionOptions& options) {
    const std::size_t n = sym.size();
    if (angles.size() != n) throw PreconditionError("herglotz_invert: matrix size does not match the angles");
    if (n < options.min_points)
        throw PreconditionError("herglotz_invert: needs at least " + std::to_string(options.min_points) +
                                " boundary points, got " + std::to_string(n));
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(std::remainder(angles[i] - two_pi * static_cast<double>(i) / static_cast<double>(n), two_pi)) >
            1e-12)
            throw PreconditionError("herglotz_invert: boundary points must be uniformly spaced in angle");

    RecoveredProfile out;
    // T(Δ_k) on the full circle, Δ_k = 2πk/n, averaged over pairs with index separation k.
    std::vector<double> delta(n + 1), T(n + 1, 0.0);
    double largest = 0.0;
    for (std::size_t k = 0; k <= n; ++k) delta[k] = two_pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t k = 1; k < n; ++k) {
        double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = sym(i, (i + k) % n);
            if (!std::isfinite(v)) continue;
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            ++count;
        }
        if (count == 0) throw InversionError("herglotz_invert: no data at angular separation " + shortest(delta[k]));
        T[k] = sum / static_cast<double>(count);
        largest = std::max(largest, T[k]);
        out.same_separation_spread = std::max(out.same_separation_spread, hi - lo);
    }
    for (std::size_t k = 1; k < n; ++k) T[k] = T[n - k] = 0.5 * (T[k] + T[n - k]);
    out.radially_consistent = out.same_separation_spread <= options.spread_tolerance * largest;

    std::vector<double> raw(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const std::size_t first = std::min(k >= 2 ? k - 2 : 0, n + 1 - 5);
        raw[k] = lagrange_slope(delta, T, k, first, 5);
    }
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < half; ++k) {
        if (!(raw[k + 1] < raw[k])) {
            out.monotone = false;
            throw InversionError("herglotz_invert: ray parameter p(Δ) is not decreasing near Δ = " +
                                 shortest(delta[k + 1]) + " (triplication or conjugate points)");
        }
    }
    const MonotoneCubic spline(delta, T, raw);
    for (std::size_t k = 0; k <= half; ++k) {
        out.separation.push_back(delta[k]);
        out.travel_time.push_back(T[k]);
        out.ray_parameter.push_back(spline.slopes()[k]);
    }

    // ln(R/r₁) = (1/π) ∫_0^{Δ₁} arccosh(p(Δ)/p₁) dΔ, with Δ = Δ₁(1 - u²).
    const double ga = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double gb = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
    const double wa = (18.0 + std::sqrt(30.0)) / 36.0, wb = (18.0 - std::sqrt(30.0)) / 36.0;
    const double nodes[4] = {-gb, -ga, ga, gb};
    const double weights[4] = {wb, wa, wa, wb};
    constexpr int panels = 48;

    std::vector<std::pair<double, double>> profile;
    const double p0 = spline.slopes()[0];
    if (p0 > 0.0) profile.emplace_back(R, R / p0);
    for (std::size_t m = 1; m < options.samples; ++m) {
        const double d1 = std::numbers::pi * static_cast<double>(m) / static_cast<double>(options.samples);
        const double p1 = spline.derivative(d1);
        if (!(p1 > 0.0)) continue;
        double integral = 0.0;
        for (int q = 0; q < panels; ++q) {
            const double u0 = static_cast<double>(q) / panels, u1 = static_cast<double>(q + 1) / panels;
            for (int g = 0; g < 4; ++g) {
                const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * nodes[g];
                const double p = spline.derivative(d1 * (1.0 - u * u));
                integral += 0.5 * (u1 - u0) * weights[g] * std::acosh(std::max(1.0, p / p1)) * 2.0 * d1 * u;
            }
        }
        const double r1 = R * std::exp(-integral / std::numbers::pi);
        profile.emplace_back(r1, r1 / p1);
    }
    std::sort(profile.begin(), profile.end());
    for (const auto& [r, c] : profile) {
        out.radius.push_back(r);
        out.speed.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gauge verification
// ---------------------------------------------------------------------------

GaugeReport verify_gauge(const OneFormField& beta1, const OneFormField& beta2, const ScalarField& phi,
                         const Domain& domain, const std::optional<RadialProfile>& c1,
                         const std::optional<RadialProfile>& c2) {
    GaugeReport report;
    for (const Vec2& x : domain.probe_grid(1000))
        report.gauge_residual =
            std::max(report.gauge_residual, norm(beta2.value(x) - beta1.value(x) - phi.gradient(x)));
    for (const Vec2& x : domain.boundary_probes(360))
        report.boundary_residual = std::max(report.boundary_residual, std::abs(phi.value(x)));
    if (c1 && c2) {
        report.psi_identity = true;
        double worst = 0.0;
        for (std::size_t k = 0; k < 1000; ++k) {
            const double r = domain.radius() * static_cast<double>(k) / 999.0;
            worst = std::max(worst, std::abs(c2->speed(r) - c1->speed(r)));
        }
        report.profile_deviation = worst;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Rigidity report
// ---------------------------------------------------------------------------

RecoveryReport rigidity_report(const Scenario& s1, const Scenario& s2, const RigidityOptions& options,
                               const std::optional<BoundaryDistanceData>& data1,
                               const std::optional<BoundaryDistanceData>& data2) {
    const Domain& domain = s1.spec.domain();
    if (!(domain == s2.spec.domain())) throw PreconditionError("rigidity_report: scenarios live on different domains");
    if (!domain.simply_connected())
        throw PreconditionError("rigidity_report: the domain is not simply connected; "
                                "closed 1-forms need not be exact there");

    RecoveryReport report;
    report.scenario1 = s1.name;
    report.scenario2 = s2.name;
    report.n = options.n;
    report.radius = domain.radius();
    report.notes.push_back("admissibility is probed by an angle sweep of " + std::to_string(options.solver.sweep) +
                           " rays per source (heuristic certificate)");

    const auto grid = domain.probe_grid(1000);
    report.closedness1 = closedness_residual(s1.spec.oneform(), grid);
    report.closedness2 = closedness_residual(s2.spec.oneform(), grid);
    if (report.closedness1 > options.closedness_tolerance || report.closedness2 > options.closedness_tolerance) {
        report.hypothesis_violation = "closedness: dβ residuals " + shortest(report.closedness1) + " and " +
                                      shortest(report.closedness2) + " exceed " +
                                      shortest(options.closedness_tolerance);
    }

    const auto points = sample_boundary(domain, options.n);
    try {
        report.data1 = data1 ? *data1 : distance_matrix(s1.spec, points, options.solver);
        report.data2 = data2 ? *data2 : distance_matrix(s2.spec, points, options.solver);
    } catch (const NonAdmissibleError& e) {
        report.hypothesis_violation = std::string("admissibility: ") + e.what();
        return report;
    } catch (const ConnectivityError& e) {
        report.hypothesis_violation = std::string("admissibility: ") + e.what();
        return report;
    }
    if (options.noise_sigma > 0.0) {
        report.data1 = add_noise(*report.data1, options.noise_sigma, options.seed);
        report.data2 = add_noise(*report.data2, options.noise_sigma, options.seed + 1);
        report.notes.push_back("gaussian noise sigma=" + shortest(options.noise_sigma) + " added to both data sets");
    }
    report.n = report.data1->size();

    const Decomposition dec1 = decompose(*report.data1), dec2 = decompose(*report.data2);
    report.beta_integrals1 = dec1.anti;
    report.beta_integrals2 = dec2.anti;
    report.symmetric1 = dec1.sym;
    report.symmetric2 = dec2.sym;
    for (const auto* pair : {&dec1, &dec2}) {
        const BoundaryDistanceData& d = pair == &dec1 ? *report.data1 : *report.data2;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < d.size(); ++j) {
                const double D = d.distances(i, j);
                if (std::isfinite(D))
                    report.decomposition_residual =
                        std::max(report.decomposition_residual, std::abs(pair->sym(i, j) + pair->anti(i, j) - D));
            }
    }
    report.data_difference = max_abs_difference(report.data1->distances, report.data2->distances);
    report.symmetric_difference = max_abs_difference(dec1.sym, dec2.sym);

    std::optional<std::vector<double>> reference;
    if (s2.potential) {
        reference.emplace();
        for (std::size_t i = 0; i < report.data1->size(); ++i) reference->push_back(s2.potential->value(report.data1->point(i)));
    }
    report.potential =
        recover_boundary_potential(*report.data1, *report.data2, options.potential_tolerance, reference);

    const bool radial = s1.spec.riemannian().flavor() == MetricFlavor::conformal_radial &&
                        s2.spec.riemannian().flavor() == MetricFlavor::conformal_radial;
    if (s2.potential) {
        report.gauge = verify_gauge(s1.spec.oneform(), s2.spec.oneform(), *s2.potential, domain,
                                    radial ? s1.profile : std::nullopt, radial ? s2.profile : std::nullopt);
    }

    if (options.invert_profile && radial && report.n >= 64) {
        try {
            report.profile1 = herglotz_invert(dec1.sym, report.data1->angles, domain.radius());
            report.profile2 = herglotz_invert(dec2.sym, report.data2->angles, domain.radius());
            double worst = 0.0;
            for (std::size_t k = 0; k < 200; ++k) {
                const double r = domain.radius() * (0.05 + 0.95 * static_cast<double>(k) / 199.0);
                const double a = report.profile1->speed_at(r), b = report.profile2->speed_at(r);
                worst = std::max(worst, std::abs(a - b) / std::abs(a));
            }
            report.profile_deviation = worst;
            report.verdicts.profiles_agree = worst <= 1e-2;
            report.notes.push_back("profile rigidity checked for conformal-radial metrics only, where the "
                                   "diffeomorphism is the identity; a general diffeomorphism is not searched for");
        } catch (const InversionError& e) {
            report.notes.push_back(std::string("profile inversion failed: ") + e.what());
            report.verdicts.profiles_agree = false;
        }
    }

    ClauseVerdicts& v = report.verdicts;
    v.clause_i = report.data_difference <= options.data_tolerance;
    v.clause_ii = report.potential->spread <= options.potential_tolerance &&
                  report.symmetric_difference <= options.data_tolerance;
    v.equivalence_consistent = v.clause_i == v.clause_ii;
    if (report.gauge)
        v.gauge_verified = report.gauge->gauge_residual <= options.potential_tolerance &&
                           report.gauge->boundary_residual <= options.potential_tolerance;

    report.verdict = !report.hypothesis_violation && v.clause_i && v.clause_ii && v.equivalence_consistent &&
                     report.potential->consistent && v.gauge_verified.value_or(true) && v.profiles_agree.value_or(true);
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string render_report(const RecoveryReport& r) {
    std::ostringstream out;
    out << "[scenarios]\n"
        << "first = " << r.scenario1 << "\n"
        << "second = " << r.scenario2 << "\n"
        << "n = " << r.n << "\n"
        << "R = " << full_precision(r.radius) << "\n\n";
    out << "[hypotheses]\n"
        << "simply_connected = true\n"
        << "closedness_1 = " << full_precision(r.closedness1) << "\n"
        << "closedness_2 = " << full_precision(r.closedness2) << "\n"
        << "violation = " << (r.hypothesis_violation ? *r.hypothesis_violation : "none") << "\n\n";
    if (r.potential) {
        out << "[residuals]\n"
            << "data_difference = " << full_precision(r.data_difference) << "\n"
            << "symmetric_difference = " << full_precision(r.symmetric_difference) << "\n"
            << "decomposition_residual = " << full_precision(r.decomposition_residual) << "\n"
            << "potential_spread = " << full_precision(r.potential->spread) << "\n"
            << "potential_system_residual = " << full_precision(r.potential->system_residual) << "\n"
            << "normalization_constant = " << full_precision(r.potential->normalization_constant) << "\n";
        if (r.gauge) {
            out << "gauge_residual = " << full_precision(r.gauge->gauge_residual) << "\n"
                << "boundary_residual = " << full_precision(r.gauge->boundary_residual) << "\n";
            if (r.gauge->profile_deviation)
                out << "ground_truth_profile_deviation = " << full_precision(*r.gauge->profile_deviation) << "\n";
        }
        if (r.profile_deviation) out << "recovered_profile_deviation = " << full_precision(*r.profile_deviation) << "\n";
        if (r.profile1)
            out << "same_separation_spread_1 = " << full_precision(r.profile1->same_separation_spread) << "\n"
                << "same_separation_spread_2 = " << full_precision(r.profile2->same_separation_spread) << "\n";
        out << "\n";
    }
    const ClauseVerdicts& v = r.verdicts;
    out << "[verdicts]\n"
        << "clause_i = " << flag(v.clause_i) << "\n"
        << "clause_ii = " << flag(v.clause_ii) << "\n"
        << "equivalence_consistent = " << flag(v.equivalence_consistent) << "\n";
    if (v.gauge_verified) out << "gauge_verified = " << flag(*v.gauge_verified) << "\n";
    if (v.profiles_agree) out << "profiles_agree = " << flag(*v.profiles_agree) << "\n" << "psi = identity\n";
    out << "verdict = " << flag(r.verdict) << "\n";
    if (!r.notes.empty()) {
        out << "\n[notes]\n";
        for (const std::string& note : r.notes) out << "note = " << note << "\n";
    }
    return out.str();
}

void write_report(const RecoveryReport& report, const std::string& directory) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path dir(directory);
    {
        std::ofstream out(dir / "report.txt");
        if (!out) throw IoError("cannot write " + (dir / "report.txt").string());
        out << render_report(report);
    }
    if (!report.data1) return;
    const auto& d1 = *report.data1;
    const auto& d2 = *report.data2;
    save(d1, (dir / "distances_1.csv").string());
    save(d2, (dir / "distances_2.csv").string());
    save_matrix(report.beta_integrals1, d1.angles, d1.radius, d1.spec_hash, (dir / "beta_integrals_1.csv").string(),
                "part=anti");
    save_matrix(report.beta_integrals2, d2.angles, d2.radius, d2.spec_hash, (dir / "beta_integrals_2.csv").string(),
                "part=anti");
    save_matrix(report.symmetric1, d1.angles, d1.radius, d1.spec_hash, (dir / "symmetric_1.csv").string(), "part=sym");
    save_matrix(report.symmetric2, d2.angles, d2.radius, d2.spec_hash, (dir / "symmetric_2.csv").string(), "part=sym");
    if (report.potential) {
        std::ofstream out(dir / "potential.csv");
        out << "# boundary potential phi2 - phi1, normalization_constant="
            << full_precision(report.potential->normalization_constant) << "\n"
            << "i,angle,value\n";
        for (std::size_t i = 0; i < report.potential->values.size(); ++i)
            out << i << ',' << full_precision(d1.angles[i]) << ',' << full_precision(report.potential->values[i])
                << '\n';
    }
    int index = 1;
    for (const auto* profile : {&report.profile1, &report.profile2}) {
        if (*profile) {
            std::ofstream out(dir / ("profile_" + std::to_string(index) + ".csv"));
            out << "# recovered sound speed, units: r in length, c in speed\n"
                << "r,c\n";
            for (std::size_t k = 0; k < (*profile)->radius.size(); ++k)
                out << full_precision((*profile)->radius[k]) << ',' << full_precision((*profile)->speed[k]) << '\n';
        }
        ++index;
    }
}

}  // namespace randers
