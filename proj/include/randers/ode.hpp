#pragma once

// Adaptive Dormand-Prince 5(4) integration of autonomous systems whose first
// two state components are a planar position, traced until the position leaves
// a disk domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "randers/errors.hpp"
#include "randers/fields.hpp"

namespace randers {

template <std::size_t N>
using State = std::array<double, N>;

struct StepControl {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_max = 0.05;
    double h_init = 0.01;
    std::size_t max_steps = 100000;
    // Exit refinement stops once |x| is within this fraction of R of the circle.
    double exit_tol = 1e-12;
    // Allowed change of the conserved quantity per step, relative to rtol.
    double invariant_share = 0.1;
};

// Placeholder for systems without a conserved quantity.
struct NoInvariant {
    template <class S>
    double operator()(const S&) const { return 0.0; }
};

template <std::size_t N>
struct TraceEnd {
    State<N> state{};
    double t = 0.0;
    std::size_t steps = 0;
};

namespace detail {

template <std::size_t N>
State<N> axpy(const State<N>& s, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = s;
    for (const auto& [c, k] : terms) {
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    }
    return out;
}

template <std::size_t N>
struct DPStep {
    State<N> next;
    State<N> error;
    State<N> k_last;
};

template <std::size_t N, class Rhs>
DPStep<N> dormand_prince_step(const Rhs& f, const State<N>& s, const State<N>& k1, double h) {
    const State<N> k2 = f(axpy<N>(s, h, {{1.0 / 5, &k1}}));
    const State<N> k3 = f(axpy<N>(s, h, {{3.0 / 40, &k1}, {9.0 / 40, &k2}}));
    const State<N> k4 = f(axpy<N>(s, h, {{44.0 / 45, &k1}, {-56.0 / 15, &k2}, {32.0 / 9, &k3}}));
    const State<N> k5 = f(axpy<N>(s, h,
                                  {{19372.0 / 6561, &k1},
                                   {-25360.0 / 2187, &k2},
                                   {64448.0 / 6561, &k3},
                                   {-212.0 / 729, &k4}}));
    const State<N> k6 = f(axpy<N>(s, h,
                                  {{9017.0 / 3168, &k1},
                                   {-355.0 / 33, &k2},
                                   {46732.0 / 5247, &k3},
                                   {49.0 / 176, &k4},
                                   {-5103.0 / 18656, &k5}}));
    const State<N> next = axpy<N>(s, h,
                                  {{35.0 / 384, &k1},
                                   {500.0 / 1113, &k3},
                                   {125.0 / 192, &k4},
                                   {-2187.0 / 6784, &k5},
                                   {11.0 / 84, &k6}});
    const State<N> k7 = f(next);
    constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                     e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                     e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
    State<N> err{};
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    return {next, err, k7};
}

template <std::size_t N>
double error_ratio(const State<N>& a, const State<N>& b, const State<N>& err, const StepControl& c) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double scale = c.atol + c.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

template <std::size_t N>
double boundary_value(const State<N>& s, const Domain& d) {
    return d.boundary_function({s[0], s[1]});
}

}  // namespace detail

// Integrates s' = f(s) from s0 until the position (s[0], s[1]) crosses the
// boundary of `domain`. `on_accept(t, state)` sees the initial state, every
// accepted step and finally the located exit state. When `from_boundary` is
// set the start lies on the boundary and the first step is shortened until it
// lands inside. Steps that change `invariant` by more than
// invariant_share * rtol are rejected like steps failing the error test; this
// catches right-hand sides with kinks that the embedded estimate misses.
// Throws TrappedGeodesicError after max_steps steps.
template <std::size_t N, class Rhs, class Observer, class Invariant = NoInvariant>
TraceEnd<N> trace_to_boundary(const Rhs& f, const State<N>& s0, const Domain& domain,
                              const StepControl& control, bool from_boundary, Observer&& on_accept,
                              const Invariant& invariant = {}) {
    const double R = domain.radius();
    State<N> s = s0;
    State<N> k1 = f(s);
    double t = 0.0;
    double h = std::min(control.h_init, control.h_max);
    on_accept(t, s);

    bool first = true;
    double level = invariant(s);
    const double drift_tol = control.invariant_share * control.rtol;
    for (std::size_t step = 0; step < control.max_steps; ++step) {
        auto trial = detail::dormand_prince_step<N>(f, s, k1, h);
        double ratio = detail::error_ratio<N>(s, trial.next, trial.error, control);
        const double next_level = invariant(trial.next);
        if (drift_tol > 0.0) ratio = std::max(ratio, std::abs(next_level - level) / drift_tol);
        if (!(ratio <= 1.0)) {
            const double shrink = std::isfinite(ratio) ? std::max(0.2, 0.9 * std::pow(ratio, -0.2)) : 0.2;
            h *= std::min(shrink, 1.0);
            if (h < 1e-15 * R) throw ConvergenceError("step size underflow while tracing a geodesic");
            continue;
        }
        const double f_next = detail::boundary_value<N>(trial.next, domain);
        if (first && from_boundary && f_next >= 0.0) {
            // Still touching the boundary: the step overshot a short chord.
            h *= 0.5;
            if (h < 1e-14 * R)
                throw DegenerateInputError("geodesic leaves the domain immediately (tangential start)");
            continue;
        }
        first = false;

        if (f_next >= 0.0) {
            // Root of |x(t + tau)|^2 - R^2 on (0, h] by Illinois iteration,
            // re-stepping from the last interior state.
            double a = 0.0, fa = detail::boundary_value<N>(s, domain);
            double b = h, fb = f_next;
            State<N> best = trial.next;
            double best_tau = h, best_f = f_next;
            int side = 0;
            const double tol_f = 2.0 * control.exit_tol * R * R;
            for (int it = 0; it < 200 && std::abs(best_f) > tol_f && b - a > 1e-15 * h; ++it) {
                double tau = b - fb * (b - a) / (fb - fa);
                if (!(tau > a && tau < b)) tau = 0.5 * (a + b);
                const State<N> probe = detail::dormand_prince_step<N>(f, s, k1, tau).next;
                const double fp = detail::boundary_value<N>(probe, domain);
                if (std::abs(fp) < std::abs(best_f)) {
                    best = probe;
                    best_tau = tau;
                    best_f = fp;
                }
                if (fp >= 0.0) {
                    b = tau;
                    fb = fp;
                    if (side == 1) fa *= 0.5;
                    side = 1;
                } else {
                    a = tau;
                    fa = fp;
                    if (side == -1) fb *= 0.5;
                    side = -1;
                }
            }
            t += best_tau;
            on_accept(t, best);
            return {best, t, step + 1};
        }

        s = trial.next;
        k1 = trial.k_last;
        level = next_level;
        t += h;
        on_accept(t, s);
        const double grow = ratio > 0.0 ? std::min(5.0, 0.9 * std::pow(ratio, -0.2)) : 5.0;
        h = std::min(h * std::max(grow, 0.2), control.h_max);
    }
    throw TrappedGeodesicError("no boundary exit within " + std::to_string(control.max_steps) +
                               " integration steps");
}

}  // namespace randers
