#include <gtest/gtest.h>

#include <numbers>

#include "parabifurc/parabolic.hpp"

using namespace parabifurc;

namespace {

constexpr double kPi = std::numbers::pi;

AnalyticFamily z_plus_z2() { return polynomial_family("z+z^2", {0.0, 1.0, 1.0}); }

double sine_a0() {
    double lo = 1.6, hi = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (lo + hi);
        (std::tan(m) + m > 0 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

/// Coefficient of z^{p+1} in g^p(z) - z by a trapezoid Cauchy integral on |z| = rho.
cplx cauchy_coefficient(const AnalyticFamily& f, int p, double rho = 0.05, int n = 256) {
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const cplx z = std::polar(rho, 2 * kPi * k / n);
        cplx x = z;
        for (int i = 0; i < p; ++i) x = f.value(0.0, x);
        sum += (x - z) / std::pow(z, p + 1);
    }
    return sum / static_cast<double>(n);
}

}  // namespace

TEST(PetalGeometry, ZPlusZSquared) {
    const auto f = z_plus_z2();
    const auto g = petal_geometry(f, make_cycle(f, 0.0, {0.0}));
    EXPECT_EQ(g.p, 1);
    EXPECT_NEAR(std::abs(g.A[0] - 1.0), 0.0, 1e-15);
    ASSERT_EQ(g.theta_att[0].size(), 1u);
    EXPECT_NEAR(g.theta_att[0][0], 0.5, 1e-15);
    EXPECT_NEAR(g.theta_rep[0][0], 0.0, 1e-15);
}

TEST(PetalGeometry, ZMinusZSquared) {
    const auto f = polynomial_family("z-z^2", {0.0, 1.0, -1.0});
    const auto g = petal_geometry(f, make_cycle(f, 0.0, {0.0}));
    EXPECT_NEAR(g.theta_att[0][0], 0.0, 1e-15);
    EXPECT_NEAR(g.theta_rep[0][0], 0.5, 1e-15);
}

TEST(PetalGeometry, QuadraticAtQuarter) {
    const auto f = make_family("quad");
    const auto g = petal_geometry(f, make_cycle(f, 0.25, {0.5}));
    EXPECT_NEAR(std::abs(g.A[0] - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(g.theta_att[0][0], 0.5, 1e-15);
}

TEST(PetalGeometry, SinePitchforkCycleIsDegenerate) {
    const double a0 = sine_a0();
    const double w0 = 1 / std::cos(a0);
    // Finite-difference oracle: the second derivative of g^2 vanishes at a0.
    auto g2 = [&](double x) { return w0 * std::sin(w0 * std::sin(x)); };
    const double h = 1e-4;
    EXPECT_NEAR((g2(a0 + h) - 2 * g2(a0) + g2(a0 - h)) / (h * h), 0.0, 1e-5);
    const auto f = make_family("sine-mult");
    EXPECT_THROW(petal_geometry(f, make_cycle(f, w0, {a0, -a0})), DegenerateParabolic);
}

TEST(PetalGeometry, RefusesNonParabolic) {
    const auto f = make_family("quad");
    EXPECT_THROW(petal_geometry(f, find_cycle(f, -0.5, 1, {-0.3})), NotParabolic);
    EXPECT_THROW(petal_geometry(make_family("quad"), make_cycle(f, 0.25, {0.5}), 1.5), DomainError);
}

TEST(PetalGeometry, RotatesUnderConjugation) {
    for (double beta : {0.3, 1.1, 2.5, -0.7}) {
        // e^{i beta} z conjugate of z + z^2 is z + e^{-i beta} z^2.
        const auto f = polynomial_family("rot", {0.0, 1.0, std::polar(1.0, -beta)});
        const auto g = petal_geometry(f, make_cycle(f, 0.0, {0.0}));
        const double shift = beta / (2 * kPi);
        EXPECT_NEAR(detail::turn_distance(g.theta_att[0][0], 0.5 + shift), 0.0, 1e-12) << beta;
        EXPECT_NEAR(detail::turn_distance(g.theta_rep[0][0], shift), 0.0, 1e-12) << beta;
    }
}

TEST(PetalGeometry, RationalRotationMaps) {
    for (int p : {1, 2, 3}) {
        const cplx lambda = std::polar(1.0, 2 * kPi / p);
        const auto f = polynomial_family("rot", {0.0, lambda, 1.0});
        const Cycle c = make_cycle(f, 0.0, {0.0});
        ASSERT_EQ(c.classification.kind, CycleKind::Parabolic);
        EXPECT_EQ(c.classification.p, p);
        const auto g = petal_geometry(f, c);
        ASSERT_EQ(static_cast<int>(g.theta_att[0].size()), p);
        ASSERT_EQ(static_cast<int>(g.theta_rep[0].size()), p);
        const cplx oracle = cauchy_coefficient(f, p);
        EXPECT_LE(std::abs(g.A[0] - oracle), 1e-10 * std::abs(oracle)) << p;
        for (int k = 0; k < p; ++k) {
            const double ta = g.theta_att[0][static_cast<std::size_t>(k)];
            const double tr = g.theta_rep[0][static_cast<std::size_t>(k)];
            const cplx va = g.A[0] * std::polar(1.0, 2 * kPi * p * ta);
            const cplx vr = g.A[0] * std::polar(1.0, 2 * kPi * p * tr);
            EXPECT_NEAR(std::arg(-va), 0.0, 1e-10);
            EXPECT_NEAR(std::arg(vr), 0.0, 1e-10);
            if (k + 1 < p)
                EXPECT_NEAR(g.theta_att[0][static_cast<std::size_t>(k) + 1] - ta, 1.0 / p, 1e-12);
        }
    }
}

TEST(Sector, Examples) {
    const auto f = z_plus_z2();
    const auto g = petal_geometry(f, make_cycle(f, 0.0, {0.0}));
    EXPECT_EQ(sector_membership(g, 0, -0.01), SectorKind::AttractingCusp);
    EXPECT_EQ(sector_membership(g, 0, 0.01), SectorKind::RepellingCusp);
    EXPECT_EQ(sector_membership(g, 0, cplx(0, 0.01)), SectorKind::Neither);
    EXPECT_EQ(sector_membership(g, 0, 0.0), SectorKind::Neither);
    EXPECT_EQ(sector_membership(g, 0, 0.2), SectorKind::Neither);
}

TEST(Sector, CuspsDisjointForSmallRadius) {
    const auto f = z_plus_z2();
    const auto g = petal_geometry(f, make_cycle(f, 0.0, {0.0}));
    // s^alpha < 1/4 keeps the two cusps apart.
    for (int k = 0; k < 400; ++k) {
        const double s = 0.04 * (k + 1) / 400.0;
        for (int m = 0; m < 64; ++m) {
            const cplx z = std::polar(s, 2 * kPi * m / 64.0);
            const double t = std::arg(z) / (2 * kPi);
            const bool rep = detail::turn_distance(t, 0.0) < std::sqrt(s);
            const bool att = detail::turn_distance(t, 0.5) < std::sqrt(s);
            EXPECT_FALSE(rep && att);
            const auto kind = sector_membership(g, 0, z);
            EXPECT_EQ(kind == SectorKind::RepellingCusp, rep);
            EXPECT_EQ(kind == SectorKind::AttractingCusp, att);
        }
    }
}

TEST(Omega, Examples) {
    const auto f = z_plus_z2();
    const Cycle c = make_cycle(f, 0.0, {0.0});
    EXPECT_EQ(omega_membership(f, c, 0.1, 0.05), OmegaStatus::Outside);
    EXPECT_EQ(omega_membership(f, c, 0.1, -0.05), OmegaStatus::Inside);

    const auto q = make_family("quad");
    const Cycle a = find_cycle(q, -0.5, 1, {-0.3});
    EXPECT_EQ(omega_membership(q, a, 0.1, a.points[0] + cplx(0.05, 0.05)), OmegaStatus::Inside);
    EXPECT_THROW(omega_membership(q, a, 0.0, 0.0), DomainError);
}

TEST(Omega, UndecidedWhenBudgetTooShort) {
    const auto f = z_plus_z2();
    const Cycle c = make_cycle(f, 0.0, {0.0});
    // Slow escape along the repelling axis from 1e-4 needs about 1e4 steps.
    EXPECT_EQ(omega_membership(f, c, 0.1, 1e-4, 100), OmegaStatus::Undecided);
}

TEST(Omega, MonotoneInRadius) {
    const auto f = z_plus_z2();
    const Cycle c = make_cycle(f, 0.0, {0.0});
    for (int k = 0; k < 40; ++k) {
        const cplx z = std::polar(0.04, 2 * kPi * k / 40.0);
        if (omega_membership(f, c, 0.05, z, 5000) == OmegaStatus::Inside) {
            EXPECT_EQ(omega_membership(f, c, 0.1, z, 5000), OmegaStatus::Inside) << z;
            EXPECT_EQ(omega_membership(f, c, 0.2, z, 5000), OmegaStatus::Inside) << z;
        }
    }
}

TEST(Flower, ZPlusZSquaredHasNoViolations) {
    const auto f = z_plus_z2();
    const Cycle c = make_cycle(f, 0.0, {0.0});
    const auto g = petal_geometry(f, c, 0.5, 0.05);
    const auto rep = flower_escape_check(f, c, g, 0.1, 101);
    EXPECT_TRUE(rep.violations.empty());
    EXPECT_GT(rep.inside, 0);
    EXPECT_GT(rep.outside, 0);
    EXPECT_EQ(rep.no_entry, 0);
    EXPECT_EQ(rep.rasters.size(), 1u);
}

TEST(Flower, AttractingCycleHasNoOutsidePoints) {
    const auto q = make_family("quad");
    const Cycle a = find_cycle(q, -0.5, 1, {-0.3});
    PetalGeometry g;
    g.cycle = a;
    g.theta_att = {{0.5}};
    g.theta_rep = {{0.0}};
    g.r = 0.05;
    const auto rep = flower_escape_check(q, a, g, 0.1, 21);
    EXPECT_EQ(rep.outside, 0);
    EXPECT_TRUE(rep.violations.empty());
}
