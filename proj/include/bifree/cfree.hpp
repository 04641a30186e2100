#pragma once

#include <cmath>
#include <utility>

#include "bifree/bifreeconv.hpp"
#include "bifree/errors.hpp"
#include "bifree/measure.hpp"
#include "bifree/solver.hpp"

namespace bifree {

/// Distribution pair (sigma, mu) of the two-state setting: sigma under the
/// first state, mu under the second (the one driving subordination).
struct CPair1D {
    Measure1D sigma;
    Measure1D mu;
};

/// Planar distribution pair (theta, eta) of the two-state setting.
struct CPair2D {
    PlanarMeasure theta;
    PlanarMeasure eta;
};

/// h_mu(z) = 1/G_mu(z) - z; additive under Boolean convolution.
inline cplx h_function(const Measure1D& m, cplx z) {
    cplx g = m.cauchy(z);
    if (std::abs(g) < 1e-14)
        throw PoleAtArgument("h_function: Cauchy transform vanishes at the argument");
    return 1.0 / g - z;
}

/// G of the Boolean convolution mu1 uplus mu2: 1/(z + h1(z) + h2(z)).
inline cplx boolean_eval(const Measure1D& mu1, const Measure1D& mu2, cplx z) {
    return 1.0 / (z + h_function(mu1, z) + h_function(mu2, z));
}

namespace detail {

/// Etilde_eta(z,w) = G_eta(z,w)/(G_mu(z) G_nu(w)) - 1 with mu, nu the
/// marginals of eta; additive under bi-Boolean convolution.
inline cplx e_tilde(const PlanarMeasure& eta, const Measure1D& mu, const Measure1D& nu, cplx z,
                    cplx w) {
    cplx gm = mu.cauchy(z), gn = nu.cauchy(w);
    if (std::abs(gm) < 1e-14 || std::abs(gn) < 1e-14)
        throw DenominatorNearZero("e_tilde: marginal Cauchy transform vanishes");
    return eta.cauchy2(z, w) / (gm * gn) - 1.0;
}

} // namespace detail

/// G of the bi-Boolean convolution eta1 uplus2 eta2: the marginal pairs
/// Boolean-convolve, the Etilde functions add.
inline cplx bi_boolean_eval(const PlanarMeasure& eta1, const PlanarMeasure& eta2, cplx z, cplx w) {
    if (z.imag() == 0.0 || w.imag() == 0.0)
        throw Error("bi_boolean_eval: arguments must be off the real axis");
    auto [mu1, nu1] = eta1.marginals();
    auto [mu2, nu2] = eta2.marginals();
    cplx gz = boolean_eval(mu1, mu2, z);
    cplx gw = boolean_eval(nu1, nu2, w);
    cplx e = detail::e_tilde(eta1, mu1, nu1, z, w) + detail::e_tilde(eta2, mu2, nu2, z, w);
    return gz * gw * (1.0 + e);
}

/// Conditionally free convolution of (sigma1, mu1) and (sigma2, mu2):
/// returns (G_sigma(z), G_{mu1 boxplus mu2}(z)), where h_sigma is the sum
/// of the input h's at the free subordination points of the mu's.
inline std::pair<cplx, cplx> cfree_eval(const CPair1D& p1, const CPair1D& p2, cplx z,
                                        const SolverConfig& cfg = {}) {
    if (z.imag() < 0.0) {
        auto [a, b] = cfree_eval(p1, p2, std::conj(z), cfg);
        return {std::conj(a), std::conj(b)};
    }
    SubordinationResult s = free_subordination(p1.mu, p2.mu, z, cfg);
    cplx hs = h_function(p1.sigma, s.omega1) + h_function(p2.sigma, s.omega2);
    return {1.0 / (z + hs), p1.mu.cauchy(s.omega1)};
}

/// Conditionally bi-free convolution of (theta1, eta1) and (theta2, eta2):
/// returns (G_theta(z,w), G_{eta1 boxplus2 eta2}(z,w)).  The theta part is
/// assembled as G_sigma G_tau (1 + Etilde_theta) with
///   Etilde_theta = G_eta sum_j Etilde_{theta_j}(omega_aj, omega_bj) / G_{eta_j}(omega_aj, omega_bj).
inline std::pair<cplx, cplx> cbifree_eval(const CPair2D& p1, const CPair2D& p2, cplx z, cplx w,
                                          const SolverConfig& cfg = {}) {
    if (!(z.imag() > 0.0) || !(w.imag() > 0.0))
        throw Error("cbifree_eval: arguments must lie in the upper half-plane");
    BiFreeEvaluator ev(p1.eta, p2.eta, cfg);
    auto [geta, d] = ev.eval(z, w);

    auto [sig1, tau1] = p1.theta.marginals();
    auto [sig2, tau2] = p2.theta.marginals();

    double scale = std::max({std::abs(d.g1), std::abs(d.g2), 1.0});
    if (std::abs(d.g1) < 1e-14 * scale || std::abs(d.g2) < 1e-14 * scale)
        throw DenominatorNearZero("cbifree_eval: G_{eta_j} vanishes at the subordinated point");
    cplx sum = detail::e_tilde(p1.theta, sig1, tau1, d.omega_a1, d.omega_b1) / d.g1 +
               detail::e_tilde(p2.theta, sig2, tau2, d.omega_a2, d.omega_b2) / d.g2;
    cplx etheta = geta * sum;

    cplx gsigma = cfree_eval({sig1, ev.mu1()}, {sig2, ev.mu2()}, z, cfg).first;
    cplx gtau = cfree_eval({tau1, ev.nu1()}, {tau2, ev.nu2()}, w, cfg).first;
    return {gsigma * gtau * (1.0 + etheta), geta};
}

} // namespace bifree
