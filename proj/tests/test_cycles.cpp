#include <gtest/gtest.h>

#include <numbers>

#include "parabifurc/cycles.hpp"

using namespace parabifurc;

namespace {

/// Root of tan a = -a in (pi/2, pi) by bisection.
double sine_a0() {
    double lo = 1.6, hi = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (lo + hi);
        (std::tan(m) + m > 0 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(Classify, Examples) {
    EXPECT_EQ(classify(0.0).kind, CycleKind::Superattracting);
    EXPECT_EQ(classify(0.5).kind, CycleKind::AttractingHyperbolic);
    EXPECT_EQ(classify(1.5).kind, CycleKind::Repelling);
    const auto m1 = classify(-1.0);
    EXPECT_EQ(m1.kind, CycleKind::Parabolic);
    EXPECT_EQ(m1.l, 1);
    EXPECT_EQ(m1.p, 2);
    const auto r3 = classify(std::polar(1.0, 2 * std::numbers::pi / 3));
    EXPECT_EQ(r3.kind, CycleKind::Parabolic);
    EXPECT_EQ(r3.l, 1);
    EXPECT_EQ(r3.p, 3);
    const auto one = classify(1.0);
    EXPECT_EQ(one.l, 0);
    EXPECT_EQ(one.p, 1);
    const double golden = (std::sqrt(5.0) - 1) / 2;
    EXPECT_EQ(classify(std::polar(1.0, 2 * std::numbers::pi * golden)).kind, CycleKind::NeutralIrrational);
}

TEST(FindCycle, QuadraticFixedPoint) {
    const auto f = make_family("quad");
    const Cycle c = find_cycle(f, -0.5, 1, {-0.3});
    const double a = (1 - std::sqrt(3.0)) / 2;
    EXPECT_NEAR(c.points[0].real(), a, 1e-14);
    EXPECT_NEAR(c.kappa.real(), 2 * a, 1e-13);
    EXPECT_EQ(c.classification.kind, CycleKind::AttractingHyperbolic);
}

TEST(FindCycle, SuperattractingTwoCycle) {
    const auto f = make_family("quad");
    const Cycle c = find_cycle(f, -1.0, 2, {0.1, -0.9});
    EXPECT_NEAR(std::abs(c.points[0]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(c.points[1] + 1.0), 0.0, 1e-12);
    EXPECT_EQ(c.classification.kind, CycleKind::Superattracting);
}

TEST(FindCycle, SinePitchforkCycleIsParabolic) {
    const double a0 = sine_a0();
    const double w0 = 1 / std::cos(a0);
    const auto f = make_family("sine-mult");
    const Cycle c = find_cycle(f, w0, 2, {a0, -a0});
    EXPECT_NEAR(std::abs(c.kappa - 1.0), 0.0, 1e-9);
    EXPECT_EQ(c.classification.kind, CycleKind::Parabolic);
    EXPECT_EQ(c.classification.l, 0);
    EXPECT_EQ(c.classification.p, 1);
}

TEST(FindCycle, SingularAtParabolicWhenStepNeeded) {
    const auto f = make_family("quad");
    // G'(0.5) - 1 = 0 while the residual 0.05 is not small.
    EXPECT_THROW(find_cycle(f, 0.3, 1, {0.5}), SingularJacobian);
    // Newton still converges linearly onto the double root at the fold.
    EXPECT_NEAR(find_cycle(f, 0.25, 1, {0.5 + 1e-3}).points[0].real(), 0.5, 1e-5);
}

TEST(FindCycle, Idempotent) {
    const auto f = make_family("logistic");
    const Cycle a = find_cycle(f, 3.3, 2, {0.5, 0.8});
    const Cycle b = find_cycle(f, 3.3, 2, a.points);
    for (int j = 0; j < 2; ++j) EXPECT_LE(std::abs(a.points[j] - b.points[j]), 1e-13);
}

TEST(FindCycle, RealSeedsGiveRealPointsAndProductIdentity) {
    const auto f = make_family("sine-mult");
    const Cycle c = find_cycle(f, -2.2, 2, {2.0, -2.0});
    cplx prod = 1.0;
    for (std::size_t j = 0; j < c.points.size(); ++j) {
        const cplx z = c.points[j];
        EXPECT_LE(std::abs(z.imag()), 1e-12);
        prod *= f.value_dz(c.w, z).second;
        EXPECT_LE(std::abs(f.value(c.w, z) - c.points[(j + 1) % 2]), 1e-10 * c.scale());
    }
    EXPECT_LE(std::abs(prod - c.kappa), 1e-12 * std::abs(prod));
}

TEST(ParabolicPair, QuadraticFold) {
    const auto f = make_family("quad");
    const auto [w, c] = find_parabolic_pair(f, 1, 0.2, {0.45}, 1.0);
    EXPECT_NEAR(w.real(), 0.25, 1e-12);
    EXPECT_NEAR(c.points[0].real(), 0.5, 1e-7);
}

TEST(ParabolicPair, QuadraticAndLogisticFlip) {
    const auto q = make_family("quad");
    const auto [w1, c1] = find_parabolic_pair(q, 1, -0.7, {-0.45}, -1.0);
    EXPECT_NEAR(w1.real(), -0.75, 1e-12);
    EXPECT_NEAR(c1.points[0].real(), -0.5, 1e-12);
    const auto l = make_family("logistic");
    const auto [w2, c2] = find_parabolic_pair(l, 1, 2.9, {0.65}, -1.0);
    EXPECT_NEAR(w2.real(), 3.0, 1e-12);
    EXPECT_NEAR(c2.points[0].real(), 2.0 / 3.0, 1e-12);
}

TEST(ParabolicPair, DegenerateAtSinePitchfork) {
    const double a0 = sine_a0();
    const auto f = make_family("sine-mult");
    EXPECT_THROW(find_parabolic_pair(f, 2, 1 / std::cos(a0) + 0.01, {a0 + 0.01, -a0 + 0.005}, 1.0), Error);
    const auto [w, c] = find_symmetric_parabolic(f, -2.2, {2.0}, 1.0);
    EXPECT_NEAR(w.real(), 1 / std::cos(a0), 1e-12);
    EXPECT_NEAR(c.points[0].real(), a0, 1e-12);
}

TEST(ReturnMapJet, Examples) {
    const auto f = make_family("quad");
    const Cycle c = make_cycle(f, 0.25, {0.5});
    const Jet2 j = return_map_jet(f, c, 2);
    EXPECT_NEAR(std::abs(j(1, 0) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j.derivative(2, 0) - 2.0), 0.0, 1e-15);

    const Cycle c2 = make_cycle(f, -1.0, {0.0, -1.0});
    const Jet2 j2 = return_map_jet(f, c2, 4);
    // g^2(z) = z^4 - 2z^2 expanded by hand
    EXPECT_NEAR(std::abs(j2(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j2.derivative(2, 0) + 4.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j2(4, 0) - 1.0), 0.0, 1e-15);
    EXPECT_THROW(return_map_jet(f, c2, 9), OrderError);
}

TEST(ReturnMapJet, SinePitchforkAgainstFiniteDifferences) {
    const double a0 = sine_a0();
    const double w0 = 1 / std::cos(a0);
    const auto f = make_family("sine-mult");
    const Cycle c = make_cycle(f, w0, {a0, -a0});
    const Jet2 j = return_map_jet(f, c, 3);
    auto g2 = [&](double x) { return w0 * std::sin(w0 * std::sin(x)); };
    const double h = 1e-3;
    const double d2 = (g2(a0 + h) - 2 * g2(a0) + g2(a0 - h)) / (h * h);
    const double d3 = (g2(a0 + 2 * h) - 2 * g2(a0 + h) + 2 * g2(a0 - h) - g2(a0 - 2 * h)) / (2 * h * h * h);
    EXPECT_NEAR(j.derivative(2, 0).real(), d2, 1e-5);
    EXPECT_NEAR(j.derivative(3, 0).real(), d3, 1e-4 * std::max(1.0, std::abs(d3)));
}

TEST(BasinCheck, Examples) {
    const auto f = make_family("quad");
    const Cycle c = find_cycle(f, -0.5, 1, {-0.3});
    const auto r = basin_check(f, -0.5, c);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.ratio, std::sqrt(3.0) - 1, 1e-3);

    const Cycle p = make_cycle(f, 0.25, {0.5});
    const auto rp = basin_check(f, 0.25, p, 2000000);
    EXPECT_TRUE(rp.converged);
    EXPECT_NEAR(rp.decay_exponent, -1.0, 0.1);

    EXPECT_THROW(basin_check(f, 1.0, make_cycle(f, 1.0, {cplx(0.5, 0.866)})), NotAttracted);
}

TEST(ContinueBranch, LogisticFixedPoint) {
    const auto f = make_family("logistic");
    const Cycle s = find_cycle(f, 1.5, 1, {0.3});
    const auto br = continue_branch(f, s, 4.0);
    EXPECT_EQ(br.status, BranchStatus::ReachedEndpoint);
    EXPECT_NEAR(br.samples.back().t, 4.0, 1e-14);
    bool crossed = false;
    for (const auto& smp : br.samples) {
        EXPECT_NEAR(smp.cycle.points[0].real(), 1 - 1 / smp.t, 1e-9);
        EXPECT_NEAR(smp.cycle.kappa.real(), 2 - smp.t, 1e-9);
        crossed = crossed || smp.cycle.kappa.real() < -1;
    }
    EXPECT_TRUE(crossed);
}

TEST(ContinueBranch, LogisticTwoCyclePersists) {
    const auto f = make_family("logistic");
    const Cycle s = find_cycle(f, 3.2, 2, {0.5, 0.8});
    const auto br = continue_branch(f, s, 4.0);
    EXPECT_EQ(br.status, BranchStatus::ReachedEndpoint);
    EXPECT_EQ(br.samples.back().cycle.classification.kind, CycleKind::Repelling);
    for (const auto& smp : br.samples) {
        const double w = smp.t;
        EXPECT_NEAR(smp.cycle.kappa.real(), 4 + 2 * w - w * w, 1e-9);
    }
}

TEST(ContinueBranch, QuadraticFixedPointBothWays) {
    const auto f = make_family("quad");
    const Cycle s = find_cycle(f, 0.0, 1, {0.1});
    const auto left = continue_branch(f, s, -2.0);
    EXPECT_EQ(left.status, BranchStatus::ReachedEndpoint);
    for (const auto& smp : left.samples)
        EXPECT_NEAR(smp.cycle.points[0].real(), (1 - std::sqrt(1 - 4 * smp.t)) / 2, 1e-10);
    const auto right = continue_branch(f, s, 1.0);
    EXPECT_EQ(right.status, BranchStatus::TurningPoint);
    ASSERT_EQ(right.folds.size(), 1u);
    EXPECT_NEAR(right.folds[0].t, 0.25, 1e-3);
}
