#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "bifree/errors.hpp"
#include "bifree/measure.hpp"

namespace bifree {

/// Truncated formal power series in one variable; coefficients c[0..order].
class Series1 {
public:
    explicit Series1(int order) : c_(static_cast<std::size_t>(order) + 1, 0.0) {}
    Series1(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {}

    int order() const { return static_cast<int>(c_.size()) - 1; }
    cplx& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
    const cplx& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    const std::vector<cplx>& coeffs() const { return c_; }

    static Series1 identity(int order) {
        Series1 s(order);
        if (order >= 1) s[1] = 1.0;
        return s;
    }

    Series1& operator+=(const Series1& o) {
        for (int k = 0; k <= std::min(order(), o.order()); ++k) c_[static_cast<std::size_t>(k)] += o[k];
        return *this;
    }
    Series1& operator-=(const Series1& o) {
        for (int k = 0; k <= std::min(order(), o.order()); ++k) c_[static_cast<std::size_t>(k)] -= o[k];
        return *this;
    }
    friend Series1 operator+(Series1 a, const Series1& b) { return a += b; }
    friend Series1 operator-(Series1 a, const Series1& b) { return a -= b; }

    friend Series1 operator*(const Series1& a, const Series1& b) {
        int n = std::min(a.order(), b.order());
        Series1 r(n);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n && j <= b.order(); ++j)
                if (i <= a.order()) r[i + j] += a[i] * b[j];
        return r;
    }

    friend Series1 operator*(cplx s, Series1 a) {
        for (auto& c : a.c_) c *= s;
        return a;
    }

    Series1 reciprocal() const {
        if (c_[0] == 0.0) throw NonInvertible("series reciprocal: zero constant term");
        int n = order();
        Series1 r(n);
        r[0] = 1.0 / c_[0];
        for (int k = 1; k <= n; ++k) {
            cplx acc = 0.0;
            for (int j = 1; j <= k; ++j) acc += c_[static_cast<std::size_t>(j)] * r[k - j];
            r[k] = -acc / c_[0];
        }
        return r;
    }

    /// this(inner); requires inner constant term zero.
    Series1 compose(const Series1& inner) const {
        if (inner[0] != 0.0) throw NonInvertible("series compose: inner constant term must vanish");
        int n = std::min(order(), inner.order());
        Series1 r(n);
        // Horner from the top coefficient down.
        for (int k = order(); k >= 0; --k) {
            Series1 next = r * inner;
            next[0] += c_[static_cast<std::size_t>(k)];
            r = next;
        }
        return r;
    }

    /// Compositional inverse: requires zero constant term and nonzero
    /// linear term.
    Series1 reversion() const {
        if (c_[0] != 0.0 || order() < 1 || c_[1] == 0.0)
            throw NonInvertible("series reversion: need f(0)=0 and f'(0) != 0");
        int n = order();
        Series1 g(n);
        g[1] = 1.0 / c_[1];
        for (int k = 2; k <= n; ++k) {
            Series1 h = compose(g);
            g[k] = -h[k] / c_[1];
        }
        return g;
    }

private:
    std::vector<cplx> c_;
};

/// Truncated bivariate series; coefficient table c[i][j] of z^i w^j.
class Series2 {
public:
    explicit Series2(int order)
        : n_(order), c_(static_cast<std::size_t>(order) + 1,
                        std::vector<cplx>(static_cast<std::size_t>(order) + 1, 0.0)) {}

    int order() const { return n_; }
    cplx& at(int i, int j) { return c_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const cplx& at(int i, int j) const {
        return c_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    Series2& operator+=(const Series2& o) {
        for (int i = 0; i <= n_; ++i)
            for (int j = 0; j <= n_; ++j) at(i, j) += o.at(i, j);
        return *this;
    }
    Series2& operator-=(const Series2& o) {
        for (int i = 0; i <= n_; ++i)
            for (int j = 0; j <= n_; ++j) at(i, j) -= o.at(i, j);
        return *this;
    }
    friend Series2 operator+(Series2 a, const Series2& b) { return a += b; }
    friend Series2 operator-(Series2 a, const Series2& b) { return a -= b; }

    friend Series2 operator*(cplx s, Series2 a) {
        for (auto& row : a.c_)
            for (auto& v : row) v *= s;
        return a;
    }

    friend Series2 operator*(const Series2& a, const Series2& b) {
        Series2 r(a.n_);
        for (int i = 0; i <= a.n_; ++i)
            for (int j = 0; j <= a.n_; ++j) {
                if (a.at(i, j) == 0.0) continue;
                for (int p = 0; i + p <= a.n_; ++p)
                    for (int q = 0; j + q <= a.n_; ++q)
                        r.at(i + p, j + q) += a.at(i, j) * b.at(p, q);
            }
        return r;
    }

    Series2 reciprocal() const {
        if (at(0, 0) == 0.0) throw NonInvertible("series2 reciprocal: zero constant term");
        Series2 r(n_);
        // Solve (this * r) = 1 by increasing total degree.
        for (int d = 0; d <= 2 * n_; ++d)
            for (int i = 0; i <= std::min(d, n_); ++i) {
                int j = d - i;
                if (j > n_) continue;
                cplx acc = (i == 0 && j == 0) ? cplx(1.0) : cplx(0.0);
                for (int p = 0; p <= i; ++p)
                    for (int q = 0; q <= j; ++q) {
                        if (p == i && q == j) continue;
                        acc -= at(i - p, j - q) * r.at(p, q);
                    }
                r.at(i, j) = acc / at(0, 0);
            }
        return r;
    }

    /// Embed a one-variable series as a function of the first (axis 0) or
    /// second (axis 1) variable.
    static Series2 from_series1(const Series1& s, int axis, int order) {
        Series2 r(order);
        for (int k = 0; k <= std::min(order, s.order()); ++k)
            (axis == 0 ? r.at(k, 0) : r.at(0, k)) = s[k];
        return r;
    }

    /// Divide by z*w; requires row 0 and column 0 to vanish (checked
    /// within `tol`, which absorbs roundoff in floating point inputs).
    Series2 shift_down_zw(double tol = 1e-9) const {
        for (int i = 0; i <= n_; ++i)
            if (std::abs(at(i, 0)) > tol || std::abs(at(0, i)) > tol)
                throw NonInvertible("series2 shift: not divisible by z*w");
        Series2 r(n_);
        for (int i = 1; i <= n_; ++i)
            for (int j = 1; j <= n_; ++j) r.at(i - 1, j - 1) = at(i, j);
        return r;
    }

    /// Multiply by z*w (top coefficients fall off the truncation).
    Series2 shift_up_zw() const {
        Series2 r(n_);
        for (int i = 0; i + 1 <= n_; ++i)
            for (int j = 0; j + 1 <= n_; ++j) r.at(i + 1, j + 1) = at(i, j);
        return r;
    }

private:
    int n_;
    std::vector<std::vector<cplx>> c_;
};

inline constexpr int kDefaultOrder1 = 16;
inline constexpr int kDefaultOrder2 = 8;

namespace detail {

/// g(y) = G(1/y) = sum m_k y^{k+1}: the Cauchy transform at infinity in the
/// variable y = 1/z.
inline Series1 g_at_infinity(const std::vector<double>& moments, int order) {
    Series1 g(order);
    for (int k = 0; k + 1 <= order && k < static_cast<int>(moments.size()); ++k)
        g[k + 1] = moments[static_cast<std::size_t>(k)];
    return g;
}

/// 1/K_mu(z) as a power series (zero constant term, unit linear term),
/// built from the R-transform: 1/K = z / (1 + z R(z)).
inline Series1 inv_k_series(const Series1& r, int order) {
    Series1 zr(order);
    for (int k = 0; k + 1 <= order; ++k) zr[k + 1] = r[k];
    zr[0] += 1.0;  // 1 + z R(z)
    Series1 rec = zr.reciprocal();
    Series1 a(order);
    for (int k = 0; k + 1 <= order; ++k) a[k + 1] = rec[k];
    return a;
}

} // namespace detail

/// Free R-transform from moments: the G-series at infinity is reverted to K
/// and the 1/z pole removed (handled as the shifted series z*K - 1).
/// Coefficient k of the result depends on moments up to k+1; missing input
/// moments are treated as zero (formal semantics).
inline Series1 r_from_moments(const std::vector<double>& moments, int order) {
    if (moments.empty() || std::abs(moments[0] - 1.0) > 1e-9)
        throw NonInvertible("r_from_moments: m[0] must be 1");
    // g(y) = G(1/y); its reversion is 1/K(u) as a series in u = G(z).
    Series1 g = detail::g_at_infinity(moments, order + 2);
    Series1 invk = g.reversion();
    // R(u) = K(u) - 1/u = (1/u)(u/invk(u) - 1).
    Series1 invk_over_u(order + 1);
    for (int k = 0; k <= order + 1; ++k) invk_over_u[k] = invk[k + 1];
    Series1 u_over_invk = invk_over_u.reciprocal();  // = 1 + u R(u)
    Series1 r(order);
    for (int k = 0; k <= order; ++k) r[k] = u_over_invk[k + 1];
    return r;
}

/// Moments from a free R-transform (inverse of r_from_moments).
inline std::vector<double> moments_from_r(const Series1& r, int order) {
    // K(u) = 1/u + R(u); the G-series at infinity is the reversion of
    // 1/K(u) = u / (1 + u R(u)).
    Series1 invk = detail::inv_k_series(r, order + 1);
    Series1 g = invk.reversion();
    std::vector<double> m(static_cast<std::size_t>(order) + 1, 0.0);
    for (int k = 0; k <= order; ++k) m[static_cast<std::size_t>(k)] = g[k + 1].real();
    return m;
}

/// G_eta(K_mu(z), K_nu(w)) / (z w) as a bivariate series with constant term
/// 1; the common kernel of the partial bi-free transforms.
inline Series2 subordinated_cauchy2_over_zw(const MomentTable2D& mt, const Series1& rmu,
                                            const Series1& rnu, int order) {
    Series1 a = detail::inv_k_series(rmu, order + 1);
    Series1 b = detail::inv_k_series(rnu, order + 1);
    // Powers a^{j+1}, b^{k+1}.
    std::vector<Series1> apow, bpow;
    apow.push_back(a);
    bpow.push_back(b);
    for (int j = 1; j <= order; ++j) {
        apow.push_back(apow.back() * a);
        bpow.push_back(bpow.back() * b);
    }
    Series2 t(order);
    int cap = std::min(order, mt.order());
    for (int j = 0; j <= cap; ++j)
        for (int k = 0; k <= cap; ++k) {
            double mjk = mt.at(j, k);
            if (mjk == 0.0) continue;
            const Series1& ap = apow[static_cast<std::size_t>(j)];
            const Series1& bp = bpow[static_cast<std::size_t>(k)];
            for (int p = j + 1; p <= order + 1; ++p)
                for (int q = k + 1; q <= order + 1; ++q)
                    t.at(p - 1, q - 1) += mjk * ap[p] * bp[q];
        }
    return t;
}

/// Partial bi-free R-transform of a planar moment table:
/// R(z,w) = 1 + z R_mu(z) + w R_nu(w) - zw / G_eta(K_mu(z), K_nu(w)),
/// normalized so that R(0,0) = 0.
inline Series2 partial_bifree_r(const MomentTable2D& mt, int order) {
    std::vector<double> mmu(static_cast<std::size_t>(mt.order()) + 1),
        mnu(static_cast<std::size_t>(mt.order()) + 1);
    for (int j = 0; j <= mt.order(); ++j) {
        mmu[static_cast<std::size_t>(j)] = mt.at(j, 0);
        mnu[static_cast<std::size_t>(j)] = mt.at(0, j);
    }
    Series1 rmu = r_from_moments(mmu, order);
    Series1 rnu = r_from_moments(mnu, order);
    Series2 t = subordinated_cauchy2_over_zw(mt, rmu, rnu, order);
    Series2 r(order);
    r.at(0, 0) = 1.0;
    for (int k = 0; k + 1 <= order; ++k) {
        r.at(k + 1, 0) += rmu[k];
        r.at(0, k + 1) += rnu[k];
    }
    r -= t.reciprocal();
    return r;
}

/// Mixed moments of the planar measure whose partial R-transform is `r`
/// and whose marginal R-transforms are rmu, rnu (the inverse direction of
/// partial_bifree_r).  All input series must carry order >= order + 1.
inline MomentTable2D moments_from_partial_r(const Series2& r, const Series1& rmu,
                                            const Series1& rnu, int order) {
    const int s = order + 1;  // internal series truncation
    if (r.order() < s || rmu.order() < s || rnu.order() < s)
        throw NonInvertible("moments_from_partial_r: series order too small");

    // G_eta(K(z), K(w)) / (zw) = 1 / (1 + z R_mu + w R_nu - R).
    Series2 d(s);
    for (int i = 0; i <= s; ++i)
        for (int j = 0; j <= s; ++j) d.at(i, j) = -r.at(i, j);
    d.at(0, 0) += 1.0;
    for (int k = 0; k + 1 <= s; ++k) {
        d.at(k + 1, 0) += rmu[k];
        d.at(0, k + 1) += rnu[k];
    }
    Series2 t = d.reciprocal();

    // Solve sum m_jk A^{j+1} B^{k+1} = zw * t for the moment table; the
    // system is triangular since A, B have unit linear coefficient.
    Series1 a = detail::inv_k_series(rmu, s + 1);
    Series1 b = detail::inv_k_series(rnu, s + 1);
    std::vector<Series1> apow, bpow;
    apow.push_back(a);
    bpow.push_back(b);
    for (int j = 1; j <= order; ++j) {
        apow.push_back(apow.back() * a);
        bpow.push_back(bpow.back() * b);
    }
    MomentTable2D out;
    out.m.assign(static_cast<std::size_t>(order) + 1,
                 std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
    // residual tracks zw*t minus already-assigned terms.
    Series2 residual = t.shift_up_zw();
    for (int j = 0; j <= order; ++j)
        for (int k = 0; k <= order; ++k) {
            double mjk = residual.at(j + 1, k + 1).real();
            out.m[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = mjk;
            if (mjk == 0.0) continue;
            const Series1& ap = apow[static_cast<std::size_t>(j)];
            const Series1& bp = bpow[static_cast<std::size_t>(k)];
            for (int p = j + 1; p <= s; ++p)
                for (int q = k + 1; q <= s; ++q) residual.at(p, q) -= mjk * ap[p] * bp[q];
        }
    return out;
}

/// Moments of eta1 boxplus-boxplus eta2 by R-additivity: add the partial
/// R-transforms, then re-expand the two-variable Cauchy transform at
/// infinity through the convolved marginals.
inline MomentTable2D bifree_convolve_moments(const MomentTable2D& m1, const MomentTable2D& m2,
                                             int order) {
    const int s = order + 1;
    auto marginal_r = [s](const MomentTable2D& mt, bool second) {
        std::vector<double> m(static_cast<std::size_t>(mt.order()) + 1);
        for (int j = 0; j <= mt.order(); ++j)
            m[static_cast<std::size_t>(j)] = second ? mt.at(0, j) : mt.at(j, 0);
        return r_from_moments(m, s);
    };
    Series1 rmu = marginal_r(m1, false) + marginal_r(m2, false);
    Series1 rnu = marginal_r(m1, true) + marginal_r(m2, true);
    Series2 r = partial_bifree_r(m1, s) + partial_bifree_r(m2, s);
    return moments_from_partial_r(r, rmu, rnu, order);
}

/// Conditionally free R-transform: K_mu(z) - 1/G_sigma(K_mu(z)), holomorphic
/// at zero.
inline Series1 cfree_r(const std::vector<double>& sigma_moments,
                       const std::vector<double>& mu_moments, int order) {
    Series1 rmu = r_from_moments(mu_moments, order);
    Series1 a = detail::inv_k_series(rmu, order + 1);  // 1/K_mu
    // G_sigma(K_mu(z)) = sum s_k a(z)^{k+1} = z * (1 + ...).
    Series1 gs(order + 1);
    Series1 apow = a;
    for (std::size_t k = 0; k < sigma_moments.size() && static_cast<int>(k) <= order; ++k) {
        for (int p = 0; p <= order + 1; ++p) gs[p] += sigma_moments[k] * apow[p];
        apow = apow * a;
    }
    Series1 gs_over_z(order);
    for (int k = 0; k <= order; ++k) gs_over_z[k] = gs[k + 1];
    if (gs_over_z[0] == 0.0) throw NonInvertible("cfree_r: degenerate sigma moments");
    Series1 rec = gs_over_z.reciprocal();
    // R^c = R_mu + (1/z)(1 - 1/(G_sigma(K_mu)/z)); the parenthesis vanishes
    // at zero so the division is exact.
    Series1 rc(order);
    for (int k = 0; k <= order; ++k) {
        cplx v = (k == 0 ? cplx(1.0) : cplx(0.0)) - rec[k];
        if (k == 0 && std::abs(v) > 1e-9)
            throw NonInvertible("cfree_r: expansion not holomorphic at zero");
        if (k >= 1) rc[k - 1] = -rec[k];
    }
    return rmu + rc;
}

/// Partial conditionally bi-free R-transform of the pair of moment tables
/// (theta, eta): z R^c_{(sigma,mu)}(z) + w R^c_{(tau,nu)}(w) + Rtilde.
inline Series2 partial_cbifree_r(const MomentTable2D& theta, const MomentTable2D& eta, int order) {
    auto marginal = [](const MomentTable2D& mt, bool second) {
        std::vector<double> m(static_cast<std::size_t>(mt.order()) + 1);
        for (int j = 0; j <= mt.order(); ++j)
            m[static_cast<std::size_t>(j)] = second ? mt.at(0, j) : mt.at(j, 0);
        return m;
    };
    std::vector<double> smu = marginal(eta, false), snu = marginal(eta, true);
    std::vector<double> ssig = marginal(theta, false), stau = marginal(theta, true);
    Series1 rmu = r_from_moments(smu, order);
    Series1 rnu = r_from_moments(snu, order);
    Series1 rc1 = cfree_r(ssig, smu, order);
    Series1 rc2 = cfree_r(stau, snu, order);

    // Regular factors: G_theta(K,K)/(zw), G_eta(K,K)/(zw), G_sigma(K)/z,
    // G_tau(K)/w; all have constant term 1 except the sigma/tau factors
    // whose constant is sigma_0 = 1.
    Series2 theta_t = subordinated_cauchy2_over_zw(theta, rmu, rnu, order);
    Series2 eta_t = subordinated_cauchy2_over_zw(eta, rmu, rnu, order);
    Series1 a = detail::inv_k_series(rmu, order + 1);
    Series1 b = detail::inv_k_series(rnu, order + 1);
    auto g_over = [order](const std::vector<double>& mom, const Series1& inv_k) {
        Series1 g(order + 1);
        Series1 apow = inv_k;
        for (std::size_t k = 0; k < mom.size() && static_cast<int>(k) <= order; ++k) {
            for (int p = 0; p <= order + 1; ++p) g[p] += mom[k] * apow[p];
            apow = apow * inv_k;
        }
        Series1 out(order);
        for (int k = 0; k <= order; ++k) out[k] = g[k + 1];
        return out;
    };
    Series1 s_t = g_over(ssig, a);  // G_sigma(K_mu(z))/z
    Series1 t_t = g_over(stau, b);  // G_tau(K_nu(w))/w

    Series2 denom = Series2::from_series1(s_t, 0, order) * Series2::from_series1(t_t, 1, order) * eta_t;
    Series2 rtilde = theta_t * denom.reciprocal() - eta_t.reciprocal();

    Series2 out = rtilde;
    for (int k = 0; k + 1 <= order; ++k) {
        out.at(k + 1, 0) += rc1[k];
        out.at(0, k + 1) += rc2[k];
    }
    return out;
}

} // namespace bifree
