#include <gtest/gtest.h>

#include <random>

#include "parabifurc/family.hpp"

using namespace parabifurc;

TEST(Family, QuadraticJetAtOrigin) {
    const auto f = make_family("quad");
    const Jet2 j = eval_jet(f, 0.0, 0.0, 2, 1);
    EXPECT_EQ(j(0, 0), cplx(0.0));
    EXPECT_EQ(j(1, 0), cplx(0.0));
    EXPECT_EQ(j(2, 0), cplx(1.0));
    EXPECT_EQ(j(0, 1), cplx(1.0));
}

TEST(Family, SineJetAtOrigin) {
    const auto f = make_family("sine-mult");
    const Jet2 j = eval_jet(f, 1.0, 0.0, 1, 1);
    EXPECT_NEAR(std::abs(j(0, 0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(j(1, 0) - 1.0), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(j(0, 1)), 0.0, 1e-16);
}

TEST(Family, LogisticJetMatchesHandExpansionAndDifferences) {
    const auto f = make_family("logistic");
    const Jet2 j = eval_jet(f, 2.5, 0.6, 2, 0);
    EXPECT_NEAR(std::abs(j(0, 0) - 0.6), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j(1, 0) + 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j(2, 0) + 2.5), 0.0, 1e-15);
    // central differences as an independent check
    const double h = 1e-4;
    auto G = [&](double z) { return 2.5 * z * (1 - z); };
    EXPECT_NEAR((G(0.6 + h) - G(0.6 - h)) / (2 * h), j(1, 0).real(), 1e-8);
    EXPECT_NEAR((G(0.6 + h) - 2 * G(0.6) + G(0.6 - h)) / (h * h) / 2, j(2, 0).real(), 1e-6);
}

TEST(Family, OrderCapsAndDomains) {
    const auto f = make_family("quad");
    EXPECT_THROW(eval_jet(f, 0.0, 0.0, 9, 0), OrderError);
    EXPECT_THROW(eval_jet(f, 0.0, 0.0, 1, 3), OrderError);
    const auto flat = make_family("flat-add");
    EXPECT_THROW(eval_jet(flat, 0.0, cplx(0.1, 0.1), 1, 0), DomainError);
    AnalyticFamily disk = make_family("quad");
    disk.dyn_domain = Region::disk(0.0, 1.0);
    EXPECT_THROW(eval_jet(disk, 0.0, 1.0, 1, 0), DomainError);
    EXPECT_THROW(make_family("nope"), DomainError);
    EXPECT_THROW(make_family("logistic", {{"d", 3}}), DomainError);
}

TEST(Family, OrbitAndEscape) {
    const auto f = make_family("quad");
    const auto o = orbit(f, 0.0, 0.5, 3);
    ASSERT_EQ(o.size(), 3u);
    EXPECT_EQ(o[1], cplx(0.25));
    EXPECT_EQ(o[2], cplx(0.0625));
    try {
        orbit(f, 1.0, 1.0, 100);
        FAIL();
    } catch (const EscapeError& e) {
        EXPECT_GE(e.partial_orbit().size(), 4u);
        EXPECT_EQ(e.partial_orbit()[1], cplx(2.0));
    }
}

TEST(Family, ParabolicOrbitIncreasesToHalf) {
    const auto f = make_family("quad");
    const auto o = orbit(f, 0.25, 0.25, 5000);
    for (std::size_t k = 1; k < o.size(); ++k) {
        EXPECT_GT(o[k].real(), o[k - 1].real());
        EXPECT_LT(o[k].real(), 0.5);
    }
    EXPECT_LT(0.5 - o.back().real(), 1e-3);
}

TEST(Family, SineCriticalOrbitApproachesSymmetricCycle) {
    // a0 solves tan a = -a in (pi/2, 3pi/2); found here by bisection.
    double lo = 1.6, hi = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (lo + hi);
        (std::tan(m) + m > 0 ? hi : lo) = m;
    }
    const double a0 = 0.5 * (lo + hi);
    const double w0 = 1.0 / std::cos(a0);
    const auto f = make_family("sine-mult");
    const auto o = orbit(f, w0, f.marked_value(w0), 200000);
    const double last = o.back().real();
    const double dist = std::min(std::abs(std::abs(last) - a0), 1.0);
    EXPECT_LT(dist, 2e-2);
    EXPECT_NEAR(std::abs(o.back().real() + o[o.size() - 2].real()), 0.0, 5e-2);
}

TEST(Family, FirstDerivativesMatchCentralDifferences) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& id : family_ids()) {
        const auto f = make_family(id);
        for (int s = 0; s < 20; ++s) {
            const bool real = f.real_line_only;
            const cplx w(1.5 + u(rng), real ? 0.0 : 0.3 * u(rng));
            cplx z(0.2 + u(rng), real ? 0.0 : 0.3 * u(rng));
            if (real && std::abs(z.real()) < 0.05) z = 0.5;
            const Jet2 j = eval_jet(f, w, z, 1, 1);
            const double h = 1e-5;
            const cplx dz = (f.value(w, z + h) - f.value(w, z - h)) / (2 * h);
            const cplx dw = (f.value(w + h, z) - f.value(w - h, z)) / (2 * h);
            EXPECT_LE(std::abs(dz - j(1, 0)), 1e-6 * std::max(1.0, std::abs(j(1, 0)))) << id;
            EXPECT_LE(std::abs(dw - j(0, 1)), 1e-6 * std::max(1.0, std::abs(j(0, 1)))) << id;
        }
    }
}

TEST(Family, HigherJetsMatchDifferencesOfLowerJets) {
    // D^{k+1} from the order-(k+1) jet against a difference of D^k from order-k jets.
    for (const auto& id : family_ids()) {
        const auto f = make_family(id);
        const cplx w = 2.1;
        const cplx z = f.real_line_only ? cplx(0.7) : cplx(0.4, f.real_line_only ? 0.0 : 0.1);
        for (int k = 1; k <= 6; ++k) {
            const double h = 1e-5;
            const cplx d_plus = eval_jet(f, w, z + h, k, 0).derivative(k, 0);
            const cplx d_minus = eval_jet(f, w, z - h, k, 0).derivative(k, 0);
            const cplx fd = (d_plus - d_minus) / (2 * h);
            const cplx exact = eval_jet(f, w, z, k + 1, 0).derivative(k + 1, 0);
            EXPECT_LE(std::abs(fd - exact), 1e-5 * std::max(1.0, std::abs(exact))) << id << " order " << k;
        }
    }
}

TEST(Family, DwIdentityByForm) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& id : family_ids()) {
        const auto f = make_family(id);
        for (int s = 0; s < 10; ++s) {
            const cplx w(u(rng), f.real_line_only ? 0.0 : u(rng));
            const cplx z(u(rng) + 0.01, f.real_line_only ? 0.0 : u(rng));
            const Jet2 j = eval_jet(f, w, z, 0, 1);
            if (f.form == FamilyForm::Additive) {
                EXPECT_EQ(j(0, 1), cplx(1.0));
            } else {
                cplx base[1];
                f.base(z, base);
                EXPECT_LE(std::abs(j(0, 1) - base[0]), 1e-14 * std::max(1.0, std::abs(base[0])));
            }
        }
    }
}

TEST(Family, FlatFamilyHasZeroJetAtOrigin) {
    const auto f = make_family("flat-add", {{"b", 1.0}, {"l", 1.0}});
    const Jet2 j = eval_jet(f, 0.3, 0.0, 8, 0);
    EXPECT_EQ(j(0, 0), cplx(0.3));
    for (int i = 1; i <= 8; ++i) EXPECT_EQ(j(i, 0), cplx(0.0));
}

TEST(Family, ValidationReports) {
    const auto q = validate_family(make_family("quad"));
    EXPECT_TRUE(q.all_passed());
    ASSERT_NE(q.find("class_F_disk_containment"), nullptr);
    EXPECT_TRUE(q.find("class_F_disk_containment")->passed);

    const auto s = validate_family(make_family("sine-mult"));
    ASSERT_NE(s.find("oddness"), nullptr);
    EXPECT_TRUE(s.find("oddness")->passed);

    AnalyticFamily liar = make_family("logistic");
    liar.odd = true;
    const auto r = validate_family(liar);
    ASSERT_NE(r.find("oddness"), nullptr);
    EXPECT_FALSE(r.find("oddness")->passed);
    EXPECT_FALSE(r.all_passed());

    for (const auto& id : family_ids()) EXPECT_TRUE(validate_family(make_family(id)).all_passed()) << id;
}
