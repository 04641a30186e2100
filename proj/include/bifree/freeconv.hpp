#pragma once

#include <cmath>
#include <vector>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"
#include "bifree/solver.hpp"

namespace bifree {

/// Cauchy transform of the free additive convolution mu1 boxplus mu2,
/// computed through the subordination functions: G(z) = G_{mu1}(omega1(z)).
class FreeConvEvaluator {
public:
    FreeConvEvaluator(Measure1D mu1, Measure1D mu2, SolverConfig cfg = {})
        : mu1_(std::move(mu1)), mu2_(std::move(mu2)), cfg_(cfg) {}

    cplx cauchy(cplx z) const { return mu1_.cauchy(subordination(z).omega1); }

    SubordinationResult subordination(cplx z) const {
        return free_subordination(mu1_, mu2_, z, cfg_);
    }

    const Measure1D& first() const { return mu1_; }
    const Measure1D& second() const { return mu2_; }

private:
    Measure1D mu1_, mu2_;
    SolverConfig cfg_;
};

/// Density of mu1 boxplus mu2 at x, recovered from the boundary values of
/// the Cauchy transform: -Im G(x + i eps) / pi.  With `richardson` the
/// evaluation at 2 eps is used to cancel the leading O(eps) error.
inline double free_density(const Measure1D& mu1, const Measure1D& mu2, double x, double eps,
                           bool richardson = false, const SolverConfig& cfg = {}) {
    if (!(eps > 0.0)) throw Error("free_density: eps must be positive");
    FreeConvEvaluator ev(mu1, mu2, cfg);
    double d1 = -ev.cauchy(cplx(x, eps)).imag() / M_PI;
    if (!richardson) return d1;
    double d2 = -ev.cauchy(cplx(x, 2.0 * eps)).imag() / M_PI;
    return 2.0 * d1 - d2;
}

/// Atoms of mu1 boxplus mu2.  A point gamma carries an atom exactly when
/// gamma = xi1 + xi2 with mu1({xi1}) + mu2({xi2}) > 1, and then the mass is
/// that excess.  Candidates are pairwise sums of the input atoms.
inline std::vector<Atom1D> free_atoms(const Measure1D& mu1, const Measure1D& mu2) {
    std::vector<Atom1D> out;
    for (const auto& a1 : mu1.atoms())
        for (const auto& a2 : mu2.atoms()) {
            double excess = a1.mass + a2.mass - 1.0;
            if (excess > 0.0) out.push_back({a1.location + a2.location, excess});
        }
    return out;
}

} // namespace bifree
