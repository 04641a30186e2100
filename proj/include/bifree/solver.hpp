#pragma once

#include <cmath>
#include <complex>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"

namespace bifree {

struct SolverConfig {
    double tolerance = 1e-13;
    int max_iterations = 500;
    /// Convex-combination weight used once the plain iteration stalls;
    /// 1 means undamped until stall detection kicks in.
    double damping = 1.0;
};

struct SubordinationResult {
    cplx omega1;
    cplx omega2;
    double residual = 0.0;
    int iterations = 0;
};

namespace detail {

inline constexpr double kNearAxisThreshold = 1e-8;
inline constexpr double kLadderStart = 1e-4;
inline constexpr int kStallWindow = 20;

/// Newton's method on T(u) - u = 0 with a numerical derivative, halving
/// steps that would leave the upper half-plane.  The Denjoy-Wolff point is
/// the only fixed point of T in C+, so a converged result is the right one.
/// Returns the iteration count on success, 0 on failure.
template <class Map>
int newton_polish(Map& T, cplx& u, const SolverConfig& cfg, int budget) {
    cplx v = u;
    for (int it = 1; it <= budget; ++it) {
        cplx tv = T(v);
        double res = std::abs(tv - v);
        if (res <= cfg.tolerance) {
            u = tv;
            return it;
        }
        double h = 1e-7 * std::max(1.0, std::abs(v));
        cplx dt = (T(v + h) - T(v - h)) / (2.0 * h);
        if (!(std::abs(dt - 1.0) > 1e-14)) return 0;
        cplx step = -(tv - v) / (dt - 1.0);
        double s = 1.0;
        while (s > 1e-8 && !((v + s * step).imag() > 0.0)) s *= 0.5;
        if (!((v + s * step).imag() > 0.0)) return 0;
        v += s * step;
    }
    return 0;
}

/// Iterate u <- T(u) until |T(u)-u| <= tol.  Engages damping when the
/// residual has not improved over a 20-step window, or after a flat budget
/// of plain steps (slow creep near the real axis can evade the window), and
/// from then on periodically hands the iterate to the Newton polish.
template <class Map>
SubordinationResult iterate_to_fixed_point(Map&& T, cplx u0, const SolverConfig& cfg) {
    cplx u = u0;
    double best = std::numeric_limits<double>::infinity();
    int since_improvement = 0;
    double d = cfg.damping < 1.0 ? cfg.damping : 1.0;
    bool damped = cfg.damping < 1.0;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        cplx tu = T(u);
        if (!(tu.imag() > 0.0))
            throw LeftHalfPlaneEscape("subordination iterate left the upper half-plane");
        double res = std::abs(tu - u);
        if (res <= cfg.tolerance) return {tu, {}, res, it};
        if (res < best * (1.0 - 1e-3)) {
            best = res;
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        if (!damped && (since_improvement >= kStallWindow || it >= 50)) {
            damped = true;
            d = 0.5;
        }
        if (damped && it % 10 == 0) {
            cplx polished = u;
            int took = newton_polish(T, polished, cfg, 60);
            if (took > 0) return {polished, {}, std::abs(T(polished) - polished), it + took};
        }
        u = damped ? (1.0 - d) * u + d * tu : tu;
    }
    throw NoConvergence(cfg.max_iterations, best);
}

/// Solve the fixed point at z, descending a geometric ladder of imaginary
/// parts when z is too close to the real axis for the contraction to hold.
template <class MapAt>
SubordinationResult solve_with_ladder(MapAt&& map_at, cplx z, const SolverConfig& cfg) {
    if (z.imag() >= kNearAxisThreshold)
        return iterate_to_fixed_point(map_at(z), z, cfg);
    int total_iters = 0;
    double y = kLadderStart;
    cplx zk(z.real(), y);
    SubordinationResult r = iterate_to_fixed_point(map_at(zk), zk, cfg);
    total_iters += r.iterations;
    while (y > z.imag()) {
        y = std::max(y * 0.5, z.imag());
        zk = cplx(z.real(), y);
        r = iterate_to_fixed_point(map_at(zk), r.omega1, cfg);
        total_iters += r.iterations;
    }
    r.iterations = total_iters;
    return r;
}

inline cplx h_transform(const Measure1D& m, cplx u) { return 1.0 / m.cauchy(u) - u; }

} // namespace detail

/// Subordination functions of the free additive convolution: returns
/// (omega1, omega2) with omega1 + omega2 - z = 1/G_{mu1}(omega1) =
/// 1/G_{mu2}(omega2).  The iteration map T(u) = z + h2(z + h1(u)) is a
/// self-map of C+, so convergence is geometric off the real axis.
inline SubordinationResult free_subordination(const Measure1D& mu1, const Measure1D& mu2, cplx z,
                                              const SolverConfig& cfg = {}) {
    if (!(z.imag() > 0.0)) throw Error("free_subordination: z must lie in the upper half-plane");
    auto map_at = [&](cplx zz) {
        return [&, zz](cplx u) {
            return zz + detail::h_transform(mu2, zz + detail::h_transform(mu1, u));
        };
    };
    SubordinationResult r = detail::solve_with_ladder(map_at, z, cfg);
    r.omega2 = z + detail::h_transform(mu1, r.omega1);
    return r;
}

/// The semigroup subordination function omega_mu(t, z): the unique point of
/// C+ with omega = z/t + (1 - 1/t) / G_mu(omega), t >= 1.
inline cplx semigroup_subordination(const Measure1D& mu, double t, cplx z,
                                    const SolverConfig& cfg = {}) {
    if (t < 1.0) throw InvalidTime("semigroup_subordination: t must be >= 1");
    if (!(z.imag() > 0.0))
        throw Error("semigroup_subordination: z must lie in the upper half-plane");
    if (t == 1.0) return z;
    auto map_at = [&](cplx zz) {
        return [&, zz](cplx v) { return zz / t + (1.0 - 1.0 / t) / mu.cauchy(v); };
    };
    return detail::solve_with_ladder(map_at, z, cfg).omega1;
}

} // namespace bifree
