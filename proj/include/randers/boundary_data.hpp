#pragma once

// Boundary distance data: sampled boundary points, the non-symmetric matrix
// of boundary-to-boundary geodesic lengths, its symmetric/antisymmetric split,
// noise injection and CSV persistence.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randers/fields.hpp"
#include "randers/geodesics.hpp"

namespace randers {

// Dense row-major n×n matrix.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const std::vector<double>& data() const noexcept { return data_; }

    // Largest |a - b| over entries where both are finite; NaN positions must agree.
    friend double max_abs_difference(const Matrix& a, const Matrix& b);
    // Largest |entry| over finite off-diagonal entries.
    double max_abs_offdiagonal() const;
    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

bool bitwise_equal(const Matrix& a, const Matrix& b);

struct BoundaryPoint {
    double angle;
    Vec2 x;
};

// n equally spaced boundary points at angles 2πk/n.
std::vector<BoundaryPoint> sample_boundary(const Domain& domain, std::size_t n);

struct DataDiagnostics {
    std::vector<int> branch_counts;  // row-major, 0 on the diagonal and for excluded pairs
    std::vector<double> misses;      // row-major endpoint misses
    std::vector<std::pair<std::size_t, std::size_t>> excluded;  // pairs closer than min_separation
    std::size_t fan_failures = 0;    // fan rays that did not exit
    double noise_sigma = 0.0;
    std::optional<std::uint64_t> noise_seed;
};

struct BoundaryDistanceData {
    double radius = 1.0;
    std::vector<double> angles;
    Matrix distances;  // D(i, j) = d_F(x_i, x_j); NaN for excluded pairs
    std::string spec_hash;
    DataDiagnostics diagnostics;
    std::vector<GeodesicPath> paths;  // row-major, filled only on request

    std::size_t size() const noexcept { return angles.size(); }
    Vec2 point(std::size_t i) const;
};

enum class Execution { serial, parallel };

// Solves every ordered boundary pair. Sources are distributed over OpenMP
// threads; each writes only its own row, so both modes give identical bits.
// Any pair with zero or several geodesics aborts with that pair named.
BoundaryDistanceData distance_matrix(const RandersSpec& F, const std::vector<BoundaryPoint>& points,
                                     const SolverOptions& options = {},
                                     Execution execution = Execution::parallel, bool keep_paths = false);
// Serial reference build.
BoundaryDistanceData distance_matrix_serial(const RandersSpec& F, const std::vector<BoundaryPoint>& points,
                                            const SolverOptions& options = {});

struct Decomposition {
    Matrix sym;   // (D + Dᵀ)/2
    Matrix anti;  // D - sym, equal to (D - Dᵀ)/2 up to rounding
};
Decomposition decompose(const BoundaryDistanceData& data);

// Adds N(0, σ²) to every finite off-diagonal entry, drawing in row-major order
// from a 64-bit Mersenne twister seeded with `seed`.
BoundaryDistanceData add_noise(const BoundaryDistanceData& data, double sigma, std::uint64_t seed);

// Writes `# n=<n> R=<R> spec=<hash> units=time[ extra]` and rows i,j,angle_i,angle_j,d.
void save(const BoundaryDistanceData& data, const std::string& file);
void save_matrix(const Matrix& m, const std::vector<double>& angles, double radius, const std::string& spec_hash,
                 const std::string& file, const std::string& extra = {});
BoundaryDistanceData load(const std::string& file);
BoundaryDistanceData parse_data(const std::string& text);

}  // namespace randers
