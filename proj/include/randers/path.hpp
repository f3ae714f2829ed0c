#pragma once

#include <string>
#include <vector>

#include "randers/autodiff.hpp"

namespace randers {

// One state of a geodesic: parameter t, position x and velocity y = dx/dt.
struct PathSample {
    double t = 0.0;
    Vec2 x{};
    Vec2 y{};
};

// A geodesic traced until it leaves the domain. Samples are the accepted
// integrator steps, the last one being the exit state.
struct GeodesicPath {
    std::vector<PathSample> samples;
    Vec2 exit_point{};
    double exit_parameter = 0.0;  // T, the travel time under unit F-speed
    double F_length = 0.0;        // equals exit_parameter for unit-speed paths
    std::string norm_tag;         // hash of the RandersSpec that produced the path

    const Vec2& start() const { return samples.front().x; }
    std::vector<Vec2> points() const;
};

// Position and velocity on the cubic Hermite interpolant of segment k at local
// parameter s in [0, 1]. The velocity is d/ds, i.e. scaled by the segment span.
struct HermitePoint {
    Vec2 x;
    Vec2 dx_ds;
};
HermitePoint hermite_segment(const GeodesicPath& path, std::size_t k, double s);

// Directed Hausdorff distance from the knots and segment midpoints of `from`
// to the continuous Hermite curve of `to`.
double directed_hausdorff(const GeodesicPath& from, const GeodesicPath& to);
// Symmetric Hausdorff distance between the point sets of two paths.
double hausdorff_distance(const GeodesicPath& a, const GeodesicPath& b);

// Writes "t,x1,x2,y1,y2" rows behind a self-describing comment header.
void write_path_csv(const GeodesicPath& path, const std::string& file);

}  // namespace randers
