#include "randers/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "randers/errors.hpp"
#include "randers/numeric_text.hpp"

namespace randers {

std::vector<Vec2> GeodesicPath::points() const {
    std::vector<Vec2> out;
    out.reserve(samples.size());
    for (const PathSample& s : samples) out.push_back(s.x);
    return out;
}

HermitePoint hermite_segment(const GeodesicPath& path, std::size_t k, double s) {
    const PathSample& p = path.samples.at(k);
    const PathSample& q = path.samples.at(k + 1);
    const double h = q.t - p.t;
    const Vec2 m0 = h * p.y, m1 = h * q.y;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
    const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
    return {h00 * p.x + h10 * m0 + h01 * q.x + h11 * m1,
            d00 * p.x + d10 * m0 + d01 * q.x + d11 * m1};
}

namespace {

double segment_distance(const GeodesicPath& path, std::size_t k, const Vec2& point) {
    auto dist = [&](double s) { return norm(hermite_segment(path, k, s).x - point); };
    constexpr int coarse = 8;
    int best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= coarse; ++i) {
        const double v = dist(static_cast<double>(i) / coarse);
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    double lo = std::max(0.0, (best - 1.0) / coarse), hi = std::min(1.0, (best + 1.0) / coarse);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
    double fc = dist(c), fd = dist(d);
    for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = dist(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = dist(d);
        }
    }
    return std::min({best_value, fc, fd});
}

double distance_to_curve(const GeodesicPath& path, const Vec2& point) {
    if (path.samples.size() == 1) return norm(path.samples.front().x - point);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
        const PathSample& p = path.samples[k];
        const PathSample& q = path.samples[k + 1];
        const double h = q.t - p.t;
        // The Hermite arc stays within this margin of its chord.
        const double margin = 0.25 * (norm(h * p.y) + norm(h * q.y));
        const Vec2 chord = q.x - p.x;
        const double len2 = norm_squared(chord);
        const double u = len2 > 0 ? std::clamp(dot(point - p.x, chord) / len2, 0.0, 1.0) : 0.0;
        const double chord_distance = norm(p.x + u * chord - point);
        if (chord_distance - margin >= best) continue;
        best = std::min(best, segment_distance(path, k, point));
    }
    return best;
}

}  // namespace

double directed_hausdorff(const GeodesicPath& from, const GeodesicPath& to) {
    if (from.samples.empty() || to.samples.empty())
        throw std::invalid_argument("directed_hausdorff: empty path");
    double worst = 0.0;
    for (std::size_t k = 0; k < from.samples.size(); ++k) {
        worst = std::max(worst, distance_to_curve(to, from.samples[k].x));
        if (k + 1 < from.samples.size())
            worst = std::max(worst, distance_to_curve(to, hermite_segment(from, k, 0.5).x));
    }
    return worst;
}

double hausdorff_distance(const GeodesicPath& a, const GeodesicPath& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

void write_path_csv(const GeodesicPath& path, const std::string& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot open " + file + " for writing");
    out << "# geodesic path spec=" << path.norm_tag << " T=" << full_precision(path.exit_parameter)
        << " length=" << full_precision(path.F_length) << "\n";
    out << "t,x1,x2,y1,y2\n";
    for (const PathSample& s : path.samples)
        out << full_precision(s.t) << ',' << full_precision(s.x[0]) << ',' << full_precision(s.x[1])
            << ',' << full_precision(s.y[0]) << ',' << full_precision(s.y[1]) << '\n';
}

}  // namespace randers
