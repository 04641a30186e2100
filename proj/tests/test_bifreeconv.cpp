#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bifree/bifreeconv.hpp>
#include <bifree/freeconv.hpp>
#include <bifree/series.hpp>

#include "support.hpp"

using namespace bifree;
using testsupport::example_eta;

namespace {

cplx random_upper() {
    std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.2, 2.5);
    return {re(testsupport::rng()), im(testsupport::rng())};
}

} // namespace

TEST_CASE("point mass shifts both faces") {
    PlanarMeasure eta = testsupport::random_planar(3);
    BiFreeEvaluator ev(PlanarMeasure::dirac(0.8, -0.4), eta);
    cplx z = random_upper(), w = random_upper();
    CHECK(std::abs(ev.cauchy2(z, w) - eta.cauchy2(z - 0.8, w + 0.4)) < 1e-10);
}

TEST_CASE("product inputs factor through the marginal convolutions") {
    Measure1D a1({{0.0, 0.5}, {1.0, 0.5}});
    Measure1D a2({{-0.5, 0.25}, {0.5, 0.75}});
    Measure1D b1({{0.2, 0.6}, {-0.7, 0.4}});
    Measure1D b2({{1.0, 0.5}, {0.0, 0.5}});
    BiFreeEvaluator ev(PlanarMeasure::product(a1, b1), PlanarMeasure::product(a2, b2));
    FreeConvEvaluator fa(a1, a2), fb(b1, b2);
    for (int i = 0; i < 5; ++i) {
        cplx z = random_upper(), w = random_upper();
        CHECK(std::abs(ev.cauchy2(z, w) - fa.cauchy(z) * fb.cauchy(w)) < 1e-10);
    }
}

TEST_CASE("marginal consistency at infinity") {
    for (int rep = 0; rep < 10; ++rep) {
        PlanarMeasure e1 = testsupport::random_planar(3);
        PlanarMeasure e2 = testsupport::random_planar(2 + rep % 3);
        BiFreeEvaluator ev(e1, e2);
        FreeConvEvaluator fmu(ev.mu1(), ev.mu2());
        FreeConvEvaluator fnu(ev.nu1(), ev.nu2());
        cplx z = random_upper();
        cplx big(0.0, 1e8);
        CHECK(std::abs(big * ev.cauchy2(z, big) - fmu.cauchy(z)) < 1e-6);
        CHECK(std::abs(big * ev.cauchy2(big, z) - fnu.cauchy(z)) < 1e-6);
    }
}

TEST_CASE("two-variable subordination identity") {
    for (int rep = 0; rep < 8; ++rep) {
        PlanarMeasure e1 = testsupport::random_planar(3);
        PlanarMeasure e2 = testsupport::random_planar(3);
        BiFreeEvaluator ev(e1, e2);
        cplx z = random_upper(), w = random_upper();
        auto [g, d] = ev.eval(z, w);
        if (std::abs(d.g1) > 1e-6 && std::abs(d.g2) > 1e-6) {
            cplx resid = g * (1.0 / d.g1 + 1.0 / d.g2) - g / (d.gmu * d.gnu) - 1.0;
            CHECK(std::abs(resid) < 1e-9);
        }
        // Zero-set inclusion: a vanishing G_j forces a vanishing G.
        if (std::abs(d.g1) < 1e-12 || std::abs(d.g2) < 1e-12) CHECK(std::abs(g) < 1e-10);
    }
}

TEST_CASE("mixed-region evaluation agrees with direct transforms") {
    // For a single pair convolved with a point mass the subordinations are
    // identities, so the experimental region must reproduce cauchy2.
    PlanarMeasure eta = testsupport::random_planar(3);
    BiFreeEvaluator ev(eta, PlanarMeasure::dirac(0.0, 0.0));
    cplx z = random_upper(), w = random_upper();
    CHECK(std::abs(ev.cauchy2(z, std::conj(w)) - eta.cauchy2(z, std::conj(w))) < 1e-10);
    CHECK(std::abs(ev.cauchy2(std::conj(z), std::conj(w)) -
                   std::conj(ev.cauchy2(z, w))) < 1e-12);
}

TEST_CASE("pi1 scalar form") {
    PlanarMeasure e1 = testsupport::random_planar(3);
    PlanarMeasure e2 = testsupport::random_planar(3);
    BiFreeEvaluator ev(e1, e2);
    cplx z(0.0, 2.0), w(0.0, 2.0);
    CHECK(std::abs(ev.pi1(z, 0.0, w)) == 0.0);

    // Identity convolution: the map is multiplication by zeta.
    BiFreeEvaluator id(e1, PlanarMeasure::dirac(0.0, 0.0));
    CHECK(std::abs(id.pi1(z, cplx(0.7, 0.3), w) - cplx(0.7, 0.3)) < 1e-10);

    // Linearity and the defining ratio.
    auto [g, d] = ev.eval(z, w);
    cplx p1 = ev.pi1(z, 1.0, w);
    CHECK(std::abs(p1 - g / d.g1) < 1e-9);
    cplx za(0.3, -0.1), zb(-1.1, 0.6);
    CHECK(std::abs(ev.pi1(z, za + 2.0 * zb, w) - ev.pi1(z, za, w) - 2.0 * ev.pi1(z, zb, w)) <
          1e-12);
}

TEST_CASE("subordination bound") {
    BiFreeEvaluator trivial(PlanarMeasure::dirac(0.0, 0.0), PlanarMeasure::dirac(0.0, 0.0));
    CHECK(std::abs(trivial.bound_check(cplx(0.4, 1.0), cplx(-0.3, 0.8))) < 1e-12);

    std::vector<std::pair<PlanarMeasure, PlanarMeasure>> fixtures;
    fixtures.emplace_back(example_eta(), example_eta());
    for (int i = 0; i < 4; ++i)
        fixtures.emplace_back(testsupport::random_planar(3), testsupport::random_planar(2 + i));
    for (const auto& [e1, e2] : fixtures) {
        BiFreeEvaluator ev(e1, e2);
        for (int i = 0; i < 100; ++i)
            CHECK(ev.bound_check(random_upper(), random_upper()) >= -1e-10);
    }
}

TEST_CASE("bi-free atoms") {
    auto single = bifree_atoms(PlanarMeasure::dirac(1.0, 2.0), PlanarMeasure::dirac(-0.5, 0.5));
    REQUIRE(single.size() == 1);
    CHECK(single[0].atom.x == doctest::Approx(0.5));
    CHECK(single[0].atom.y == doctest::Approx(2.5));
    CHECK(single[0].atom.mass == doctest::Approx(1.0).epsilon(1e-8));

    auto eta = example_eta();
    auto atoms = bifree_atoms(eta, eta);
    REQUIRE(atoms.size() == 1);
    CHECK(atoms[0].atom.x == doctest::Approx(2.0));
    CHECK(atoms[0].atom.y == doctest::Approx(2.0));
    CHECK(atoms[0].atom.mass == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(atoms[0].limit_mass == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("smoothed planar density") {
    // Convolving with the origin point mass smooths the input measure.
    BiFreeEvaluator ev(PlanarMeasure::dirac(1.0, 1.0), PlanarMeasure::dirac(0.0, 0.0));
    Grid2Spec one{1.0, 1.0, 1, 1.0, 1.0, 1};
    double eps = 1e-2;
    auto d = density2d_smoothed(ev, one, eps, eps);
    CHECK(d.values[0][0] == doctest::Approx(1.0 / (M_PI * M_PI * eps * eps)).epsilon(1e-2));
    CHECK(d.experimental);

    // Product inputs: the smoothing separates into 1D Poisson factors.
    Measure1D a({{0.0, 0.5}, {1.0, 0.5}});
    Measure1D b({{0.5, 1.0}});
    BiFreeEvaluator pv(PlanarMeasure::product(a, b), PlanarMeasure::dirac(0.0, 0.0));
    Grid2Spec g{0.3, 0.3, 1, 0.2, 0.2, 1};
    auto dp = density2d_smoothed(pv, g, eps, eps);
    double px = -a.cauchy(cplx(0.3, eps)).imag() / M_PI;
    double py = -b.cauchy(cplx(0.2, eps)).imag() / M_PI;
    CHECK(dp.values[0][0] == doctest::Approx(px * py).epsilon(1e-9));
}

TEST_CASE("smoothed density mass on the worked example") {
    auto eta = example_eta();
    BiFreeEvaluator ev(eta, eta);
    double eps = 1e-2;
    Grid2Spec g{-0.6, 2.6, 321, -0.6, 2.6, 321};
    auto d = density2d_smoothed(ev, g, eps, eps);
    double dx = (g.x1 - g.x0) / (g.nx - 1), dy = (g.y1 - g.y0) / (g.ny - 1);
    double total = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            double w = ((i == 0 || i == g.nx - 1) ? 0.5 : 1.0) *
                       ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0);
            total += w * dx * dy * d.values[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    CHECK(total == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("matrix Cauchy transform") {
    UpperTriangular2 arg{cplx(0.7, 1.1), cplx(0.4, -0.2), cplx(-0.5, 0.9)};
    auto t = matrix_cauchy_2x2(PlanarMeasure::dirac(0.0, 0.0), arg);
    CHECK(std::abs(t.z - 1.0 / arg.z) < 1e-14);
    CHECK(std::abs(t.w - 1.0 / arg.w) < 1e-14);
    CHECK(std::abs(t.zeta + arg.zeta / (arg.z * arg.w)) < 1e-14);

    auto ex = matrix_cauchy_2x2(example_eta(), {2.0, 1.0, 2.0});
    CHECK(ex.z.real() == doctest::Approx(0.9375));
    CHECK(ex.zeta.real() == doctest::Approx(-0.84375));
    CHECK(ex.w.real() == doctest::Approx(0.875));

    PlanarMeasure p = testsupport::random_planar(3);
    auto up = matrix_cauchy_2x2(p, arg);
    auto down = matrix_cauchy_2x2(
        p, {std::conj(arg.z), std::conj(arg.zeta), std::conj(arg.w)});
    CHECK(std::abs(down.z - std::conj(up.z)) < 1e-14);
    CHECK(std::abs(down.zeta - std::conj(up.zeta)) < 1e-14);
    CHECK(std::abs(down.w - std::conj(up.w)) < 1e-14);
}

TEST_CASE("matrix transform maps into the negative-imaginary cone") {
    std::uniform_real_distribution<double> re(-2.5, 2.5), im(0.05, 2.0), zr(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        PlanarMeasure p = testsupport::random_planar(3);
        UpperTriangular2 arg{{re(testsupport::rng()), im(testsupport::rng())},
                             {zr(testsupport::rng()), zr(testsupport::rng())},
                             {re(testsupport::rng()), im(testsupport::rng())}};
        if (!arg.positive_imaginary()) {
            --i;
            continue;
        }
        auto t = matrix_cauchy_2x2(p, arg);
        // -Im of the 2x2 upper-triangular value, as a Hermitian form:
        // diag(-Im Gmu, -Im Gnu), off-diagonal -zeta G_eta / (2i) pattern.
        double a = -t.z.imag();
        double c = -t.w.imag();
        cplx boff = -t.zeta / cplx(0.0, 2.0);  // (T - T*)/(2i) upper entry
        CHECK(a >= -1e-12);
        CHECK(c >= -1e-12);
        CHECK(a * c - std::norm(boff) >= -1e-10);
    }
}

TEST_CASE("matrix R-transform series") {
    auto zero = matrix_r_2x2(PlanarMeasure::dirac(0.0, 0.0), 4);
    for (int k = 0; k <= 4; ++k) {
        CHECK(std::abs(zero.r_mu[k]) < 1e-12);
        CHECK(std::abs(zero.r_nu[k]) < 1e-12);
    }
    for (int i = 0; i <= zero.corner.order(); ++i)
        for (int j = 0; j <= zero.corner.order(); ++j) CHECK(std::abs(zero.corner.at(i, j)) < 1e-12);

    Measure1D a({{0.3, 0.5}, {1.2, 0.5}});
    Measure1D b({{-0.4, 0.25}, {0.8, 0.75}});
    auto prod = matrix_r_2x2(PlanarMeasure::product(a, b), 4);
    for (int i = 0; i <= prod.corner.order(); ++i)
        for (int j = 0; j <= prod.corner.order(); ++j) CHECK(std::abs(prod.corner.at(i, j)) < 1e-8);

    // Corner additivity under convolution.
    auto eta = example_eta();
    auto one = matrix_r_2x2(eta, 4);
    auto conv = matrix_r_2x2(bifree_convolve_moments(eta.mixed_moments(9), eta.mixed_moments(9), 7), 4);
    for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j)
            CHECK(std::abs(conv.corner.at(i, j) - 2.0 * one.corner.at(i, j)) < 1e-12);
}
