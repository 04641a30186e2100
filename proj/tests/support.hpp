#pragma once

// Shared helpers for the test suites: deterministic random fixtures and
// moment extraction from transform samples (the analytic cross-check route,
// deliberately independent of the series code under test).

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <bifree/measure.hpp>

namespace testsupport {

using bifree::cplx;

inline std::mt19937& rng() {
    static std::mt19937 gen(20260823u);
    return gen;
}

inline bifree::Measure1D random_measure1(int natoms, double span = 2.0) {
    std::uniform_real_distribution<double> loc(-span, span), mass(0.2, 1.0);
    std::vector<bifree::Atom1D> atoms;
    double total = 0.0;
    for (int i = 0; i < natoms; ++i) {
        atoms.push_back({loc(rng()), mass(rng())});
        total += atoms.back().mass;
    }
    for (auto& a : atoms) a.mass /= total;
    return bifree::Measure1D(std::move(atoms), {}, true);
}

inline bifree::PlanarMeasure random_planar(int natoms, double span = 2.0) {
    std::uniform_real_distribution<double> loc(-span, span), mass(0.2, 1.0);
    std::vector<bifree::PlanarAtom> atoms;
    double total = 0.0;
    for (int i = 0; i < natoms; ++i) {
        atoms.push_back({loc(rng()), loc(rng()), mass(rng())});
        total += atoms.back().mass;
    }
    for (auto& a : atoms) a.mass /= total;
    return bifree::PlanarMeasure(std::move(atoms), {}, true);
}

/// The worked example measure: eta = 3/4 d(1,1) + 1/8 d(0,0) + 1/8 d(1,0).
inline bifree::PlanarMeasure example_eta() {
    return bifree::PlanarMeasure({{1.0, 1.0, 0.75}, {0.0, 0.0, 0.125}, {1.0, 0.0, 0.125}});
}

/// Semicircle law of the given variance as a trapezoid quadrature measure.
inline bifree::Measure1D semicircle(double variance, int nodes = 2000) {
    double r = 2.0 * std::sqrt(variance);
    std::vector<bifree::QuadNode> qs;
    double dx = 2.0 * r / (nodes - 1);
    for (int i = 0; i < nodes; ++i) {
        double x = -r + dx * i;
        double val = std::sqrt(std::max(0.0, r * r - x * x)) / (2.0 * M_PI * variance);
        double w = val * dx * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0);
        if (w > 0.0) qs.push_back({x, w});
    }
    return bifree::Measure1D({}, std::move(qs), true);
}

/// Moments m_0..m_order of the measure behind a one-variable transform,
/// via the contour average m_k = (1/N) sum z_j^{k+1} G(z_j) over a circle
/// enclosing the support.  The callable is only invoked on the upper
/// half-plane; the lower half uses G(conj z) = conj G(z).
inline std::vector<double> moments_from_transform1(const std::function<cplx(cplx)>& g, int order,
                                                   double radius, int n = 512) {
    std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * M_PI * (j + 0.5) / n;
        cplx z = radius * cplx(std::cos(th), std::sin(th));
        cplx gz = z.imag() > 0.0 ? g(z) : std::conj(g(std::conj(z)));
        cplx zp = z;  // z^{k+1}
        for (int k = 0; k <= order; ++k) {
            m[static_cast<std::size_t>(k)] += (zp * gz).real() / n;
            zp *= z;
        }
    }
    return m;
}

/// Solve a small dense complex linear system in place (partial pivoting).
inline std::vector<cplx> solve_dense(std::vector<std::vector<cplx>> a, std::vector<cplx> b) {
    std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            cplx f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<cplx> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cplx acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

/// Mixed moments of the planar measure behind a two-variable transform,
/// recovered by interpolating G(z,w) ~ sum m_jk z^{-j-1} w^{-k-1} on an
/// upper-arc sampling grid of each variable (no mixed-region evaluation).
inline bifree::MomentTable2D moments_from_transform2(const std::function<cplx(cplx, cplx)>& g,
                                                     int order, double radius,
                                                     int fit_extra = 3) {
    // Fitting beyond the requested order pushes the truncation-tail error
    // of the reported coefficients down by (support/radius)^fit_extra.
    int n = order + 1 + fit_extra;
    std::vector<cplx> zs, ws;
    for (int p = 0; p < n; ++p) {
        double th = M_PI * (p + 0.5) / n;
        zs.push_back(radius * cplx(std::cos(th), std::sin(th)));
        ws.push_back(radius * cplx(std::cos(th), std::sin(th)));
    }
    // Vandermonde in the decay variables 1/z, 1/w.
    auto vander = [n](const std::vector<cplx>& pts) {
        std::vector<std::vector<cplx>> v(static_cast<std::size_t>(n),
                                         std::vector<cplx>(static_cast<std::size_t>(n)));
        for (int p = 0; p < n; ++p) {
            cplx u = 1.0 / pts[static_cast<std::size_t>(p)];
            cplx up = u;
            for (int j = 0; j < n; ++j) {
                v[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] = up;
                up *= u;
            }
        }
        return v;
    };
    std::vector<std::vector<cplx>> gv(static_cast<std::size_t>(n),
                                      std::vector<cplx>(static_cast<std::size_t>(n)));
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            gv[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
                g(zs[static_cast<std::size_t>(p)], ws[static_cast<std::size_t>(q)]);
    // Solve A M B^T = G column-wise then row-wise.
    auto a = vander(zs);
    auto b = vander(ws);
    // First: for each w-sample column q, solve A x = G(:,q).
    std::vector<std::vector<cplx>> half(static_cast<std::size_t>(n),
                                        std::vector<cplx>(static_cast<std::size_t>(n)));
    for (int q = 0; q < n; ++q) {
        std::vector<cplx> rhs(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) rhs[static_cast<std::size_t>(p)] = gv[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
        auto x = solve_dense(a, rhs);
        for (int j = 0; j < n; ++j) half[static_cast<std::size_t>(j)][static_cast<std::size_t>(q)] = x[static_cast<std::size_t>(j)];
    }
    bifree::MomentTable2D out;
    out.m.assign(static_cast<std::size_t>(order) + 1,
                 std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    for (int j = 0; j <= order; ++j) {
        auto x = solve_dense(b, half[static_cast<std::size_t>(j)]);
        for (int k = 0; k <= order; ++k)
            out.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)].real();
    }
    return out;
}

/// Mixed moments from full-torus contour averages,
///   m_jk = avg over p,q of z_p^{j+1} w_q^{k+1} G(z_p, w_q),
/// sampling both circles away from the real axis.  Needs a callable defined
/// on all four half-plane sign combinations, but is far better conditioned
/// than the one-sided interpolation above.
inline bifree::MomentTable2D moments_from_transform2_torus(
    const std::function<cplx(cplx, cplx)>& g, int order, double radius, int n = 48) {
    bifree::MomentTable2D out;
    out.m.assign(static_cast<std::size_t>(order) + 1,
                 std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    for (int p = 0; p < n; ++p) {
        double th = 2.0 * M_PI * (p + 0.5) / n;
        cplx z = radius * cplx(std::cos(th), std::sin(th));
        for (int q = 0; q < n; ++q) {
            double ph = 2.0 * M_PI * (q + 0.5) / n;
            cplx w = radius * cplx(std::cos(ph), std::sin(ph));
            cplx val = g(z, w);
            cplx zp = z;
            for (int j = 0; j <= order; ++j) {
                cplx wp = w;
                for (int k = 0; k <= order; ++k) {
                    out.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] +=
                        (zp * wp * val).real() / (static_cast<double>(n) * n);
                    wp *= w;
                }
                zp *= z;
            }
        }
    }
    return out;
}

/// Residue of a one-variable transform at a real point: the atom mass,
/// extrapolated from (iy) G(x + iy) along a geometric ladder.
inline double residue_at(const std::function<cplx(cplx)>& g, double x,
                         std::vector<double> ys = {1e-2, 1e-3, 1e-4, 1e-5}) {
    std::vector<double> est;
    for (double y : ys) est.push_back((cplx(0.0, y) * g(cplx(x, y))).real());
    std::size_t n = ys.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            est[i] = (-ys[i + m] * est[i] + ys[i] * est[i + 1]) / (ys[i] - ys[i + m]);
    return est[0];
}

} // namespace testsupport
