#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"
#include "bifree/solver.hpp"

namespace bifree {

/// The convolution semigroup eta_t, t >= 1, anchored at the time-1 state.
struct SemigroupState {
    PlanarMeasure eta;
    double t = 1.0;
};

/// G_{mu_t}(z) = G_mu(omega_mu(t, z)).
inline cplx semigroup_marginal_eval(const Measure1D& mu, double t, cplx z,
                                    const SolverConfig& cfg = {}) {
    if (z.imag() < 0.0) return std::conj(semigroup_marginal_eval(mu, t, std::conj(z), cfg));
    return mu.cauchy(semigroup_subordination(mu, t, z, cfg));
}

/// G_{eta_t}(z, w) assembled from the marginal subordination functions:
///   G_t = G_eta Gm / (t Gm + (1-t) G_eta),  Gm = G_mu(omega_mu) G_nu(omega_nu),
/// the division-free form of 1/(t/G_eta + (1-t)/Gm).
inline cplx semigroup_eval(const SemigroupState& s, cplx z, cplx w, const SolverConfig& cfg = {}) {
    if (z.imag() == 0.0 || w.imag() == 0.0)
        throw Error("semigroup eval: arguments must be off the real axis");
    if (z.imag() < 0.0)
        return std::conj(semigroup_eval(s, std::conj(z), std::conj(w), cfg));
    bool reflect_w = w.imag() < 0.0;
    cplx wp = reflect_w ? std::conj(w) : w;

    auto [mu, nu] = s.eta.marginals();
    cplx om_mu = semigroup_subordination(mu, s.t, z, cfg);
    cplx om_nu_up = semigroup_subordination(nu, s.t, wp, cfg);
    cplx om_nu = reflect_w ? std::conj(om_nu_up) : om_nu_up;

    cplx geta = s.eta.cauchy2(om_mu, om_nu);
    cplx gm = mu.cauchy(om_mu) * (reflect_w ? std::conj(nu.cauchy(om_nu_up)) : nu.cauchy(om_nu_up));
    cplx den = s.t * gm + (1.0 - s.t) * geta;
    double scale = std::max({std::abs(geta), std::abs(gm), 1.0});
    if (std::abs(den) < 1e-14 * scale)
        throw DenominatorNearZero("semigroup eval: assembly denominator vanishes");
    return geta * gm / den;
}

struct SemigroupAtom {
    PlanarAtom atom;       // position (t x, t y) and joint mass of eta_t
    double mu_mass = 0.0;  // mu_t({t x})
    double nu_mass = 0.0;  // nu_t({t y})
};

/// Atoms of eta_t.  Every atom of eta_t sits over an atom (x, y) of eta at
/// the scaled position (tx, ty); the marginal masses evolve affinely,
///   mu_t({tx}) = t mu({x}) + 1 - t,
/// and the joint mass solves mu_t nu_t / m = t mu nu / eta + 1 - t.
inline std::vector<SemigroupAtom> atom_evolution(const SemigroupState& s) {
    auto [mu, nu] = s.eta.marginals();
    std::vector<SemigroupAtom> out;
    for (const auto& a : s.eta.atoms()) {
        double pm = mu.atom_mass_at(a.x);
        double pn = nu.atom_mass_at(a.y);
        double mx = s.t * pm + 1.0 - s.t;
        double my = s.t * pn + 1.0 - s.t;
        if (!(mx > 0.0) || !(my > 0.0)) continue;
        double den = s.t * pm * pn / a.mass + 1.0 - s.t;
        if (!(den > 0.0)) continue;
        double m = mx * my / den;
        if (!(m > 0.0)) continue;
        out.push_back({{s.t * a.x, s.t * a.y, m}, mx, my});
    }
    return out;
}

/// Atoms of the marginal semigroup mu_t = mu^{boxplus t}.
inline std::vector<Atom1D> marginal_atom_evolution(const Measure1D& mu, double t) {
    std::vector<Atom1D> out;
    for (const auto& a : mu.atoms()) {
        double m = t * a.mass + 1.0 - t;
        if (m > 0.0) out.push_back({t * a.location, m});
    }
    return out;
}

} // namespace bifree
