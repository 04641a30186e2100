#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "bifree/errors.hpp"
#include "bifree/freeconv.hpp"
#include "bifree/measure.hpp"
#include "bifree/series.hpp"
#include "bifree/solver.hpp"

namespace bifree {

/// Intermediate transforms behind one bi-free evaluation: the two input
/// Cauchy transforms at the subordinated points, the convolved marginal
/// transforms, and the assembly denominator.
struct BiEvalDiagnostics {
    cplx g1;
    cplx g2;
    cplx gmu;
    cplx gnu;
    cplx denominator;
    cplx omega_a1, omega_a2, omega_b1, omega_b2;
};

struct UpperTriangular2 {
    cplx z;
    cplx zeta;
    cplx w;

    /// Im z > 0, Im w > 0 and 4 Im z Im w > |zeta|^2: the matrix has
    /// positive definite imaginary part.
    bool positive_imaginary() const {
        return z.imag() > 0.0 && w.imag() > 0.0 &&
               4.0 * z.imag() * w.imag() > std::norm(zeta);
    }
};

struct Grid2Spec {
    double x0 = 0.0, x1 = 0.0;
    int nx = 0;
    double y0 = 0.0, y1 = 0.0;
    int ny = 0;

    double x(int i) const { return nx > 1 ? x0 + (x1 - x0) * i / (nx - 1) : x0; }
    double y(int j) const { return ny > 1 ? y0 + (y1 - y0) * j / (ny - 1) : y0; }
};

struct Density2D {
    Grid2Spec grid;
    /// values[i][j] = density at (grid.x(i), grid.y(j)).
    std::vector<std::vector<double>> values;
    bool experimental = true;
};

/// Evaluator of the bi-free additive convolution eta1 boxplus-boxplus eta2.
/// All two-variable evaluations go through the marginal subordination
/// functions and the division-free assembly
///   G = G1 G2 / (G1 + G2 - G1 G2 / (G_mu G_nu)),
/// which stays finite through zeros of the individual G_j.
class BiFreeEvaluator {
public:
    BiFreeEvaluator(PlanarMeasure eta1, PlanarMeasure eta2, SolverConfig cfg = {})
        : eta1_(std::move(eta1)), eta2_(std::move(eta2)), cfg_(cfg) {
        auto m1 = eta1_.marginals();
        auto m2 = eta2_.marginals();
        mu1_ = std::make_unique<Measure1D>(std::move(m1.first));
        nu1_ = std::make_unique<Measure1D>(std::move(m1.second));
        mu2_ = std::make_unique<Measure1D>(std::move(m2.first));
        nu2_ = std::make_unique<Measure1D>(std::move(m2.second));
    }

    BiFreeEvaluator(const BiFreeEvaluator& o) : BiFreeEvaluator(o.eta1_, o.eta2_, o.cfg_) {}

    const PlanarMeasure& first() const { return eta1_; }
    const PlanarMeasure& second() const { return eta2_; }
    const Measure1D& mu1() const { return *mu1_; }
    const Measure1D& nu1() const { return *nu1_; }
    const Measure1D& mu2() const { return *mu2_; }
    const Measure1D& nu2() const { return *nu2_; }

    /// G_{eta1 boxplus2 eta2}(z, w).  Both half-plane signs are accepted in
    /// each variable; mixed signs use the Schwarz reflection of the
    /// subordination functions and are experimental (the assembly identity
    /// is only proved on matching signs and near infinity).
    std::pair<cplx, BiEvalDiagnostics> eval(cplx z, cplx w) const {
        if (z.imag() == 0.0 || w.imag() == 0.0)
            throw Error("bifree eval: arguments must be off the real axis");
        if (z.imag() < 0.0) {
            auto [g, d] = eval(std::conj(z), std::conj(w));
            return {std::conj(g), conj_diag(d)};
        }
        // z in C+ from here; reflect the w side if needed.
        bool reflect_w = w.imag() < 0.0;
        cplx wp = reflect_w ? std::conj(w) : w;

        SubordinationResult sa = free_subordination(*mu1_, *mu2_, z, cfg_);
        SubordinationResult sb = free_subordination(*nu1_, *nu2_, wp, cfg_);
        cplx ob1 = reflect_w ? std::conj(sb.omega1) : sb.omega1;
        cplx ob2 = reflect_w ? std::conj(sb.omega2) : sb.omega2;

        BiEvalDiagnostics d;
        d.omega_a1 = sa.omega1;
        d.omega_a2 = sa.omega2;
        d.omega_b1 = ob1;
        d.omega_b2 = ob2;
        d.g1 = eta1_.cauchy2(sa.omega1, ob1);
        d.g2 = eta2_.cauchy2(sa.omega2, ob2);
        d.gmu = mu1_->cauchy(sa.omega1);
        cplx gnu_up = nu1_->cauchy(sb.omega1);
        d.gnu = reflect_w ? std::conj(gnu_up) : gnu_up;
        d.denominator = d.g1 + d.g2 - d.g1 * d.g2 / (d.gmu * d.gnu);
        double scale = std::max({std::abs(d.g1), std::abs(d.g2), 1.0});
        if (std::abs(d.denominator) < 1e-14 * scale)
            throw DenominatorNearZero("bifree eval: assembly denominator vanishes");
        return {d.g1 * d.g2 / d.denominator, d};
    }

    cplx cauchy2(cplx z, cplx w) const { return eval(z, w).first; }

    /// The (1,2) entry map of the linearized transform in its scalar form:
    /// Pi1(z, zeta, w) = zeta G(z,w) / G_{eta1}(omega_a1, omega_b1), which
    /// the assembly reduces to zeta G2 / denominator.
    cplx pi1(cplx z, cplx zeta, cplx w) const {
        auto [g, d] = eval(z, w);
        (void)g;
        double scale = std::max({std::abs(d.g1), std::abs(d.g2), 1.0});
        if (std::abs(d.g1) < 1e-14 * scale)
            throw DenominatorNearZero("pi1: G_{eta1} vanishes at the subordinated point");
        return zeta * d.g2 / d.denominator;
    }

    /// Minimum over j of Im(omega_aj) Im(omega_bj) |G_j|^2 -
    /// Im z Im w |G|^2; the subordination inequality asserts this is >= 0.
    double bound_check(cplx z, cplx w) const {
        auto [g, d] = eval(z, w);
        double rhs = z.imag() * w.imag() * std::norm(g);
        double s1 = d.omega_a1.imag() * d.omega_b1.imag() * std::norm(d.g1) - rhs;
        double s2 = d.omega_a2.imag() * d.omega_b2.imag() * std::norm(d.g2) - rhs;
        return std::min(s1, s2);
    }

private:
    static BiEvalDiagnostics conj_diag(const BiEvalDiagnostics& d) {
        return {std::conj(d.g1),       std::conj(d.g2),       std::conj(d.gmu),
                std::conj(d.gnu),      std::conj(d.denominator),
                std::conj(d.omega_a1), std::conj(d.omega_a2), std::conj(d.omega_b1),
                std::conj(d.omega_b2)};
    }

    PlanarMeasure eta1_, eta2_;
    SolverConfig cfg_;
    std::unique_ptr<Measure1D> mu1_, nu1_, mu2_, nu2_;
};

struct BiAtomResult {
    PlanarAtom atom;
    double algebraic_mass = 0.0;
    double limit_mass = 0.0;
};

namespace detail {

/// Polynomial extrapolation of f(y) to y = 0 (Neville's scheme).
inline double extrapolate_to_zero(const std::vector<double>& ys, std::vector<double> fs) {
    std::size_t n = ys.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            fs[i] = ((0.0 - ys[i + m]) * fs[i] - (0.0 - ys[i]) * fs[i + 1]) / (ys[i] - ys[i + m]);
    return fs[0];
}

} // namespace detail

/// Atoms of eta1 boxplus2 eta2.  Candidates are coordinatewise sums of
/// input atoms whose marginal excesses are positive; the mass solves
///   1 + p_mu p_nu / m = sum_j mu_j nu_j / eta_j
/// and is cross-checked against the analytic limit y^2 |G| at the atom.
inline std::vector<BiAtomResult> bifree_atoms(const PlanarMeasure& eta1, const PlanarMeasure& eta2,
                                              const SolverConfig& cfg = {}) {
    BiFreeEvaluator ev(eta1, eta2, cfg);
    std::vector<BiAtomResult> out;
    for (const auto& a1 : eta1.atoms())
        for (const auto& a2 : eta2.atoms()) {
            double pmu = ev.mu1().atom_mass_at(a1.x) + ev.mu2().atom_mass_at(a2.x) - 1.0;
            double pnu = ev.nu1().atom_mass_at(a1.y) + ev.nu2().atom_mass_at(a2.y) - 1.0;
            if (!(pmu > 0.0) || !(pnu > 0.0)) continue;
            double s = ev.mu1().atom_mass_at(a1.x) * ev.nu1().atom_mass_at(a1.y) / a1.mass +
                       ev.mu2().atom_mass_at(a2.x) * ev.nu2().atom_mass_at(a2.y) / a2.mass;
            if (!(s > 1.0)) continue;
            double m = pmu * pnu / (s - 1.0);
            double x = a1.x + a2.x, y = a1.y + a2.y;
            bool dup = false;
            for (const auto& r : out)
                if (std::abs(r.atom.x - x) <= kAtomMergeDistance &&
                    std::abs(r.atom.y - y) <= kAtomMergeDistance)
                    dup = true;
            if (dup) continue;

            std::vector<double> ys = {1e-2, 1e-3, 1e-4, 1e-5}, est;
            for (double h : ys) {
                cplx g = ev.cauchy2(cplx(x, h), cplx(y, h));
                est.push_back((cplx(0.0, h) * cplx(0.0, h) * g).real());
            }
            double limit = detail::extrapolate_to_zero(ys, est);
            if (std::abs(limit - m) > 1e-4)
                throw InconsistentAtom("bifree atoms: analytic mass limit disagrees with the algebraic value");
            out.push_back({{x, y, m}, m, limit});
        }
    return out;
}

/// Double Poisson smoothing of the convolution on a rectangular grid:
/// h(x,y) = Re[G(x+i eps, y-i delta) - G(x+i eps, y+i delta)] / (2 pi^2).
/// Uses the mixed-sign evaluation, hence experimental output.
inline Density2D density2d_smoothed(const BiFreeEvaluator& ev, const Grid2Spec& grid, double eps,
                                    double delta) {
    if (!(eps > 0.0) || !(delta > 0.0))
        throw Error("density2d: eps and delta must be positive");
    Density2D out;
    out.grid = grid;
    out.values.assign(static_cast<std::size_t>(grid.nx),
                      std::vector<double>(static_cast<std::size_t>(grid.ny), 0.0));
    long failures = 0;
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            cplx zz(grid.x(i), eps);
            try {
                cplx lower = ev.cauchy2(zz, cplx(grid.y(j), -delta));
                cplx upper = ev.cauchy2(zz, cplx(grid.y(j), delta));
                out.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    (lower - upper).real() / (2.0 * M_PI * M_PI);
            } catch (const DenominatorNearZero&) {
                ++failures;
                out.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    std::numeric_limits<double>::quiet_NaN();
            }
        }
    long total = static_cast<long>(grid.nx) * grid.ny;
    if (total > 0 && failures * 100 > total)
        throw RegionNotSupported("density2d: mixed-sign evaluation degenerate on more than 1% of nodes");
    return out;
}

/// The 2x2 upper-triangular Cauchy transform of a planar measure: diagonal
/// (G_mu(z), G_nu(w)), corner -zeta G_eta(z,w).
inline UpperTriangular2 matrix_cauchy_2x2(const PlanarMeasure& eta, const UpperTriangular2& arg) {
    auto [mu, nu] = eta.marginals();
    return {mu.cauchy(arg.z), -arg.zeta * eta.cauchy2(arg.z, arg.w), nu.cauchy(arg.w)};
}

struct MatrixRSeries2 {
    Series1 r_mu;
    Series1 r_nu;
    /// Coefficient series of the corner entry: (R(z,w) - z R_mu - w R_nu)/(zw).
    Series2 corner;
};

/// Series description of the 2x2 upper-triangular R-transform of the
/// measure behind the given mixed-moment table (order >= order + 2).
inline MatrixRSeries2 matrix_r_2x2(const MomentTable2D& mt, int order) {
    const int s = order + 1;
    if (mt.order() < s + 1)
        throw NonInvertible("matrix_r_2x2: moment table order too small");
    std::vector<double> mmu(static_cast<std::size_t>(mt.order()) + 1),
        mnu(static_cast<std::size_t>(mt.order()) + 1);
    for (int j = 0; j <= mt.order(); ++j) {
        mmu[static_cast<std::size_t>(j)] = mt.at(j, 0);
        mnu[static_cast<std::size_t>(j)] = mt.at(0, j);
    }
    Series1 rmu = r_from_moments(mmu, s);
    Series1 rnu = r_from_moments(mnu, s);
    Series2 p = partial_bifree_r(mt, s);
    for (int k = 0; k + 1 <= s; ++k) {
        p.at(k + 1, 0) -= rmu[k];
        p.at(0, k + 1) -= rnu[k];
    }
    Series2 corner = p.shift_down_zw(1e-7);
    Series1 rmu_out(order), rnu_out(order);
    for (int k = 0; k <= order; ++k) {
        rmu_out[k] = rmu[k];
        rnu_out[k] = rnu[k];
    }
    return {std::move(rmu_out), std::move(rnu_out), std::move(corner)};
}

inline MatrixRSeries2 matrix_r_2x2(const PlanarMeasure& eta, int order) {
    return matrix_r_2x2(eta.mixed_moments(order + 2), order);
}

} // namespace bifree
