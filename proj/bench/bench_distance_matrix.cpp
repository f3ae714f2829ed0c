// Times the serial reference build of the boundary distance matrix against
// the OpenMP build and checks that both give the same bits.
//
//   bench_distance_matrix [n ...] [--repeat k]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "randers/boundary_data.hpp"
#include "randers/zermelo.hpp"

using namespace randers;

namespace {

template <class F>
double best_of(int repeat, F&& f) {
    double best = 1e300;
    for (int k = 0; k < repeat; ++k) {
        const auto start = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes;
    int repeat = 1;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--repeat" && i + 1 < argc) repeat = std::max(1, std::atoi(argv[++i]));
        else sizes.push_back(static_cast<std::size_t>(std::atol(argv[i])));
    }
    if (sizes.empty()) sizes = {8, 16, 32};

    const Domain unit;
    struct Case {
        const char* name;
        RandersSpec F;
    };
    const std::vector<Case> cases{
        {"euclidean", RandersSpec(catalog::euclidean(), catalog::zero_form(), unit)},
        {"c=2-r vortex(0.2)", zermelo_construct(conformal_medium(unit, catalog::linear_radial(2, 1),
                                                                 catalog::rotational_form(0.2), true))},
    };

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-20s %5s %12s %12s %8s %s\n", "scenario", "n", "serial [s]", "openmp [s]", "speedup", "identical");
    bool all_identical = true;
    for (const Case& c : cases)
        for (std::size_t n : sizes) {
            const auto pts = sample_boundary(unit, n);
            BoundaryDistanceData serial, parallel;
            const double ts = best_of(repeat, [&] { serial = distance_matrix_serial(c.F, pts); });
            const double tp = best_of(repeat, [&] { parallel = distance_matrix(c.F, pts); });
            const bool same = bitwise_equal(serial.distances, parallel.distances);
            all_identical = all_identical && same;
            std::printf("%-20s %5zu %12.3f %12.3f %8.2f %s\n", c.name, n, ts, tp, ts / tp, same ? "yes" : "NO");
        }
    return all_identical ? 0 : 1;
}
