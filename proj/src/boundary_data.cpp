#include "randers/boundary_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

double max_abs_difference(const Matrix& a, const Matrix& b) {
    if (a.size() != b.size()) throw PreconditionError("matrix sizes differ");
    double worst = 0.0;
    for (std::size_t k = 0; k < a.data_.size(); ++k) {
        const double x = a.data_[k], y = b.data_[k];
        if (std::isnan(x) || std::isnan(y)) {
            if (std::isnan(x) != std::isnan(y)) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, std::abs(x - y));
    }
    return worst;
}

double Matrix::max_abs_offdiagonal() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j && std::isfinite((*this)(i, j))) worst = std::max(worst, std::abs((*this)(i, j)));
    return worst;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data().data(), b.data().data(), a.data().size() * sizeof(double)) == 0;
}

// ---------------------------------------------------------------------------
// Sampling and assembly
// ---------------------------------------------------------------------------

std::vector<BoundaryPoint> sample_boundary(const Domain& domain, std::size_t n) {
    if (n < 2) throw PreconditionError("sample_boundary: need at least 2 points, got " + std::to_string(n));
    std::vector<BoundaryPoint> points;
    points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        points.push_back({angle, domain.boundary_point(angle)});
    }
    return points;
}

Vec2 BoundaryDistanceData::point(std::size_t i) const {
    return {radius * std::cos(angles.at(i)), radius * std::sin(angles.at(i))};
}

namespace {

double angular_separation(double a, double b) {
    const double d = std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
    return d;
}

}  // namespace

BoundaryDistanceData distance_matrix(const RandersSpec& F, const std::vector<BoundaryPoint>& points,
                                     const SolverOptions& options, Execution execution, bool keep_paths) {
    const std::size_t n = points.size();
    if (n < 2) throw PreconditionError("distance_matrix: need at least 2 boundary points");
    const GeodesicSolver solver(F, options);

    BoundaryDistanceData data;
    data.radius = F.domain().radius();
    data.spec_hash = F.hash();
    data.distances = Matrix(n, 0.0);
    for (const BoundaryPoint& p : points) data.angles.push_back(p.angle);
    data.diagnostics.branch_counts.assign(n * n, 0);
    data.diagnostics.misses.assign(n * n, 0.0);
    if (keep_paths) data.paths.resize(n * n);

    std::vector<std::exception_ptr> failures(n);
    std::vector<std::size_t> fan_failures(n, 0);
    const bool parallel = execution == Execution::parallel;

#pragma omp parallel for schedule(dynamic, 1) if (parallel)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            const ShootingFan fan = solver.fan(points[i].angle, false);
            fan_failures[i] = fan.failures;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                if (angular_separation(points[i].angle, points[j].angle) < options.min_separation) {
                    data.distances(i, j) = std::numeric_limits<double>::quiet_NaN();
                    continue;
                }
                ShootingResult r = solver.solve(fan, points[j].angle);
                data.distances(i, j) = r.distance;
                data.diagnostics.branch_counts[i * n + j] = r.branch_count;
                data.diagnostics.misses[i * n + j] = r.miss;
                if (keep_paths) data.paths[i * n + j] = std::move(r.path);
            }
        } catch (...) {
            failures[i] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        if (failures[i]) std::rethrow_exception(failures[i]);

    for (std::size_t i = 0; i < n; ++i) {
        data.diagnostics.fan_failures += fan_failures[i];
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && std::isnan(data.distances(i, j))) data.diagnostics.excluded.emplace_back(i, j);
    }
    return data;
}

BoundaryDistanceData distance_matrix_serial(const RandersSpec& F, const std::vector<BoundaryPoint>& points,
                                            const SolverOptions& options) {
    return distance_matrix(F, points, options, Execution::serial);
}

Decomposition decompose(const BoundaryDistanceData& data) {
    const std::size_t n = data.size();
    if (data.distances.size() != n)
        throw PreconditionError("decompose: matrix size does not match the point list");
    Decomposition out{Matrix(n), Matrix(n)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double a = data.distances(i, j), b = data.distances(j, i);
            out.sym(i, j) = 0.5 * (a + b);
            out.anti(i, j) = a - out.sym(i, j);
        }
    return out;
}

BoundaryDistanceData add_noise(const BoundaryDistanceData& data, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw PreconditionError("add_noise: sigma must be non-negative");
    BoundaryDistanceData out = data;
    out.diagnostics.noise_sigma = sigma;
    out.diagnostics.noise_seed = seed;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !std::isfinite(out.distances(i, j))) continue;
            out.distances(i, j) += normal(rng);
        }
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void save_matrix(const Matrix& m, const std::vector<double>& angles, double radius, const std::string& spec_hash,
                 const std::string& file, const std::string& extra) {
    const std::size_t n = m.size();
    if (angles.size() != n) throw PreconditionError("save: matrix size does not match the point list");
    std::ofstream out(file);
    if (!out) throw IoError("cannot open " + file + " for writing");
    out << "# n=" << n << " R=" << full_precision(radius) << " spec=" << spec_hash << " units=time";
    if (!extra.empty()) out << ' ' << extra;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            out << i << ',' << j << ',' << full_precision(angles[i]) << ',' << full_precision(angles[j]) << ','
                << full_precision(m(i, j)) << '\n';
        }
    if (!out) throw IoError("write to " + file + " failed");
}

void save(const BoundaryDistanceData& data, const std::string& file) {
    save_matrix(data.distances, data.angles, data.radius, data.spec_hash, file);
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        parts.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::size_t parse_index(std::string_view token, std::size_t line, std::size_t column) {
    const auto v = parse_double(token);
    if (!v || *v < 0 || *v != std::floor(*v) || *v > 1e9)
        throw ParseError("expected a non-negative integer index, got '" + std::string(token) + "'", line, column);
    return static_cast<std::size_t>(*v);
}

}  // namespace

BoundaryDistanceData parse_data(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t n = 0;
    BoundaryDistanceData data;
    std::vector<char> seen;
    std::size_t rows = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string_view line(raw);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        if (!have_header) {
            if (line.substr(0, 1) != "#") throw ParseError("missing '# n=... R=... spec=... units=...' header", line_no);
            std::map<std::string, std::string> fields;
            std::istringstream tokens{std::string(line.substr(1))};
            std::string token;
            while (tokens >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) throw ParseError("header token '" + token + "' is not key=value", line_no);
                fields[token.substr(0, eq)] = token.substr(eq + 1);
            }
            for (const char* key : {"n", "R", "spec", "units"})
                if (!fields.count(key)) throw ParseError(std::string("header lacks '") + key + "='", line_no);
            const auto nv = parse_double(fields["n"]);
            if (!nv || *nv < 2 || *nv != std::floor(*nv)) throw ParseError("header n must be an integer >= 2", line_no);
            const auto rv = parse_double(fields["R"]);
            if (!rv || !(*rv > 0)) throw ParseError("header R must be positive", line_no);
            if (fields["units"] != "time") throw UnitError("distance data must be in units of time", line_no);
            n = static_cast<std::size_t>(*nv);
            data.radius = *rv;
            data.spec_hash = fields["spec"];
            data.angles.assign(n, std::numeric_limits<double>::quiet_NaN());
            data.distances = Matrix(n, 0.0);
            seen.assign(n * n, 0);
            have_header = true;
            continue;
        }
        if (line.substr(0, 1) == "#") continue;
        const auto parts = split(line, ',');
        if (parts.size() != 5)
            throw ParseError("expected 5 comma-separated fields i,j,angle_i,angle_j,d, found " +
                                 std::to_string(parts.size()),
                             line_no);
        const std::size_t i = parse_index(parts[0], line_no, 1);
        const std::size_t j = parse_index(parts[1], line_no, 2);
        double values[3];
        for (int k = 0; k < 3; ++k) {
            const auto v = parse_double(parts[2 + k]);
            if (!v) throw ParseError("malformed number '" + std::string(parts[2 + k]) + "'", line_no, 3 + k);
            values[k] = *v;
        }
        if (i >= n || j >= n)
            throw StructuralError("line " + std::to_string(line_no) + ": index out of range for n=" + std::to_string(n));
        if (i == j) throw StructuralError("line " + std::to_string(line_no) + ": diagonal entries are not stored");
        if (seen[i * n + j]) throw StructuralError("line " + std::to_string(line_no) + ": duplicate pair");
        seen[i * n + j] = 1;
        for (auto [idx, angle] : {std::pair{i, values[0]}, std::pair{j, values[1]}}) {
            double& stored = data.angles[idx];
            if (std::isnan(stored)) {
                stored = angle;
            } else if (std::memcmp(&stored, &angle, sizeof(double)) != 0) {
                throw StructuralError("line " + std::to_string(line_no) + ": inconsistent angle for point " +
                                      std::to_string(idx));
            }
        }
        data.distances(i, j) = values[2];
        ++rows;
    }
    if (!have_header) throw ParseError("empty distance file", line_no == 0 ? 1 : line_no);
    if (rows != n * (n - 1))
        throw StructuralError("header declares n=" + std::to_string(n) + " (" + std::to_string(n * (n - 1)) +
                              " rows) but the file has " + std::to_string(rows) + " rows");
    data.diagnostics.branch_counts.assign(n * n, 0);
    data.diagnostics.misses.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && std::isnan(data.distances(i, j))) data.diagnostics.excluded.emplace_back(i, j);
    return data;
}

BoundaryDistanceData load(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_data(buffer.str());
}

}  // namespace randers
