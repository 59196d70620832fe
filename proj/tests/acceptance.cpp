// Acceptance suite: `acceptance --criterion N` prints one PASS/FAIL line per check
// and exits nonzero when any check of that criterion fails. Without arguments all
// criteria run in order.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "parabifurc/bifurcation.hpp"
#include "parabifurc/motions.hpp"
#include "parabifurc/parabolic.hpp"
#include "parabifurc/transversality.hpp"

using namespace parabifurc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

using Checks = std::vector<Check>;

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

void add(Checks& out, std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
}

/// Root of tan a = -a in (pi/2, pi) by bisection.
double sine_a0() {
    double lo = 1.6, hi = 3.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 0.5 * (lo + hi);
        (std::tan(m) + m > 0 ? hi : lo) = m;
    }
    return 0.5 * (lo + hi);
}

/// Smallest grid parameter at which the orbit of 1/2 settles on a period-3 attractor.
double brute_force_three_window(double lo, double hi, double step) {
    for (int k = 0; lo + k * step <= hi; ++k) {
        const double w = lo + k * step;
        double x = 0.5;
        for (int n = 0; n < 200000; ++n) x = w * x * (1 - x);
        double y = x;
        for (int n = 0; n < 3; ++n) y = w * y * (1 - y);
        const double z = w * x * (1 - x);
        if (std::abs(y - x) < 1e-8 && std::abs(z - x) > 1e-3) return w;
    }
    return std::nan("");
}

Checks criterion_1() {
    Checks out;
    const auto q = make_family("quad");
    const auto rq = transversality_report(q, find_cycle(q, -0.5, 1, {-0.3}));
    const double want_q = 2 / std::sqrt(1 - 4 * -0.5);
    const double got_q = rq.kappa_prime ? rq.kappa_prime->real() : std::nan("");
    add(out, "z^2+c at c=-0.5: kappa' = 2/sqrt(1-4c)", std::abs(got_q - want_q) <= 1e-9,
        fmt("kappa'=%.15g oracle=%.15g", got_q, want_q));

    const auto l = make_family("logistic");
    const auto rl = transversality_report(l, find_cycle(l, 2.5, 1, {0.5}));
    // Fixed point 1 - 1/w has multiplier 2 - w.
    const double got_l = rl.kappa_prime ? rl.kappa_prime->real() : std::nan("");
    add(out, "w z(1-z) at w=2.5: kappa' = -1", std::abs(got_l + 1) <= 1e-9, fmt("kappa'=%.15g", got_l));
    return out;
}

Checks criterion_2() {
    Checks out;
    const auto s = make_family("sine-mult");
    const auto [w, cyc] = find_symmetric_parabolic(s, -2.2, {2.0}, 1.0);
    const double a0 = std::abs(cyc.points[0].real());
    add(out, "a0 solves tan a = -a in (pi/2, 3pi/2)",
        a0 > kPi / 2 && a0 < 3 * kPi / 2 && std::abs(std::tan(a0) + a0) <= 1e-9 && std::abs(a0 - sine_a0()) <= 1e-9,
        fmt("a0=%.15g bisection=%.15g", a0, sine_a0()));
    const double w0 = w.real();
    add(out, "w0 = 1/cos a0 and rounds to -2.26",
        std::abs(w0 - 1 / std::cos(a0)) <= 1e-9 && std::round(w0 * 100) == -226, fmt("w0=%.15g", w0));
    const bool pair = cyc.q == 2 && std::abs(cyc.points[0] + cyc.points[1]) <= 1e-9;
    add(out, "period-2 cycle {a0, -a0} has kappa = 1", pair && std::abs(cyc.kappa - 1.0) <= 1e-9,
        fmt("kappa=%.3e%+.3ei", cyc.kappa.real(), cyc.kappa.imag()));
    const auto r = transversality_report(s, cyc);
    double qmax = 0;
    for (auto v : r.Q_at_points) qmax = std::max(qmax, std::abs(v));
    add(out, "|Q(a0)| <= 1e-9", !r.Q_at_points.empty() && qmax <= 1e-9, fmt("|Q|=%.3e", qmax));
    return out;
}

Checks criterion_3() {
    Checks out;
    const auto q = make_family("quad");
    const auto e = locate_saddle_node(q, 1, 0.26, {0.49});
    add(out, "quad fold at c=1/4: Q(a0)=1, D2g=2",
        e.kind == EventKind::SaddleNode && std::abs(e.t_star - 0.25) <= 1e-12 && std::abs(e.Q_a0 - 1) <= 1e-12 &&
            std::abs(e.D2 - 2) <= 1e-12,
        fmt("t*=%.15g Q=%.15g D2=%.15g", e.t_star, e.Q_a0, e.D2));
    const auto below = fixed_point_census(q, 0.25 - 1e-4, 1, 0.5, 0.1).size();
    const auto above = fixed_point_census(q, 0.25 + 1e-4, 1, 0.5, 0.1).size();
    add(out, "fold census 2/0 across c=1/4 +- 1e-4", below == 2 && above == 0,
        fmt("below=%g above=%g", static_cast<double>(below), static_cast<double>(above)));

    const auto l = make_family("logistic");
    const double oracle = brute_force_three_window(3.8270, 3.8300, 1e-5);
    const double exact = 1 + std::sqrt(8.0);
    add(out, "brute-force scan confirms 1+sqrt(8)", std::abs(oracle - exact) <= 2e-5,
        fmt("first period-3 grid point %.6f", oracle));
    const auto w = find_cycle(l, 3.83, 3, {0.156, 0.504, 0.957});
    const auto f3 = locate_saddle_node(l, 3, 3.83, w.points);
    add(out, "logistic period-3 tangency at 1+sqrt(8)",
        f3.kind == EventKind::SaddleNode && std::abs(f3.t_star - exact) <= 1e-6 && f3.certified,
        fmt("t*=%.15g error=%.2e", f3.t_star, std::abs(f3.t_star - exact)));
    return out;
}

Checks criterion_4() {
    Checks out;
    struct Case {
        const char* name;
        const char* family;
        double seed_t;
        cplx seed_x;
        double t_exact;
    };
    for (const Case& c : {Case{"logistic w=3", "logistic", 2.98, 0.66, 3.0}, Case{"quad c=-3/4", "quad", -0.74, -0.49, -0.75}}) {
        const auto f = make_family(c.family);
        const auto e = locate_period_doubling(f, 1, c.seed_t, {c.seed_x});
        // The pre side is where the fixed point is still attracting, i.e. the seed side.
        const bool pre_is_minus = c.seed_t < e.t_star;
        const int pre = pre_is_minus ? e.count_minus : e.count_plus;
        const int post = pre_is_minus ? e.count_plus : e.count_minus;
        const double kp = e.kappa_prime ? *e.kappa_prime : 0.0;
        add(out, std::string(c.name) + ": census of f^2 is 1 pre / 3 post",
            e.kind == EventKind::PeriodDoubling && std::abs(e.t_star - c.t_exact) <= 1e-10 && pre == 1 && post == 3,
            fmt("t*=%.15g pre=%g post=%g", e.t_star, pre, post));
        add(out, std::string(c.name) + ": |kappa'| > 0.1", std::abs(kp) > 0.1, fmt("kappa'=%.15g", kp));
    }
    return out;
}

Checks criterion_5() {
    Checks out;
    const auto f = make_family("logistic");
    WindowOptions opt;
    opt.samples = 100;
    const auto ws = detect_windows(f, scan(f, 2.5, 3.6, 111), opt);
    const AttractingWindow* w = nullptr;
    for (const auto& x : ws)
        if (x.q == 2 && x.t_lo < 3.2 && 3.2 < x.t_hi) w = &x;
    if (!w) {
        add(out, "period-2 window found", false, "no window contains w=3.2");
        return out;
    }
    const double hi = 1 + std::sqrt(6.0);
    add(out, "endpoints (3, 1+sqrt(6)) within 1e-6", std::abs(w->t_lo - 3) <= 1e-6 && std::abs(w->t_hi - hi) <= 1e-6,
        fmt("t_lo=%.15g t_hi=%.15g", w->t_lo, w->t_hi));
    bool decreasing = w->kappa_samples.size() == 100;
    double worst = 0;
    for (std::size_t k = 0; k < w->kappa_samples.size(); ++k) {
        const auto [t, kap] = w->kappa_samples[k];
        if (k > 0 && !(kap < w->kappa_samples[k - 1].second)) decreasing = false;
        worst = std::max(worst, std::abs(kap - (4 + 2 * t - t * t)));
    }
    add(out, "kappa strictly decreasing at 100 samples", decreasing && w->monotone_violations == 0,
        fmt("samples=%g violations=%g", static_cast<double>(w->kappa_samples.size()), w->monotone_violations));
    add(out, "kappa = 4+2w-w^2 within 1e-8", worst <= 1e-8, fmt("max error %.3e", worst));
    return out;
}

/// Cluster centres of one diagram column, split at gaps larger than `gap`.
std::vector<double> clusters(std::vector<double> xs, double gap = 1e-3) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= xs.size(); ++k)
        if (k == xs.size() || xs[k] - xs[k - 1] > gap) {
            double s = 0;
            for (std::size_t j = start; j < k; ++j) s += xs[j];
            out.push_back(s / static_cast<double>(k - start));
            start = k;
        }
    return out;
}

bool same_set(const Cycle& a, const Cycle& b, double tol) {
    if (a.q != b.q) return false;
    for (auto x : a.points) {
        double d = std::numeric_limits<double>::infinity();
        for (auto y : b.points) d = std::min(d, std::abs(x - y));
        if (d > tol) return false;
    }
    return true;
}

Cycle negated(const Cycle& c) {
    Cycle n = c;
    for (auto& x : n.points) x = -x;
    return n;
}

Checks criterion_6() {
    Checks out;
    const auto f = make_family("sine-mult");
    DiagramOptions opt;
    opt.seed = kPi / 2;
    opt.burn = 900;
    opt.keep = 100;
    const auto d = diagram(f, -10, 10, 2000, opt);
    add(out, "diagram has 2000 columns of 100 kept iterates",
        d.t.size() == 2000 && std::all_of(d.x.begin(), d.x.end(), [](const auto& c) { return c.size() == 100; }),
        fmt("columns=%g", static_cast<double>(d.t.size())));

    const double w0 = 1 / std::cos(sine_a0());
    int symmetric_sides = 0, exchanged_sides = 0;
    for (double side : {-1.0, 1.0}) {
        const double target = w0 + 0.05 * side;
        std::size_t col = 0;
        for (std::size_t k = 1; k < d.t.size(); ++k)
            if (std::abs(d.t[k] - target) < std::abs(d.t[col] - target)) col = k;
        const double t = d.t[col];
        const auto cs = clusters(d.x[col]);
        const std::string where = fmt("w=%.4f", t);
        if (cs.size() != 2) {
            add(out, where + ": cloud has two clusters", false, fmt("clusters=%g", static_cast<double>(cs.size())));
            continue;
        }
        const Cycle o = find_cycle(f, t, 2, {cs[0], cs[1]});
        const bool attracting = std::abs(o.kappa) < 1;
        if (same_set(o, negated(o), 1e-6)) {
            ++symmetric_sides;
            add(out, where + ": single attracting symmetric 2-cycle (O = -O)", attracting,
                fmt("points %.9f %.9f kappa=%.6f", o.points[0].real(), o.points[1].real(), o.kappa.real()));
        } else {
            const Cycle partner = find_cycle(f, t, 2, negated(o).points);
            const bool ok = attracting && std::abs(partner.kappa) < 1 && same_set(partner, negated(o), 1e-6) &&
                            !same_set(partner, o, 1e-6);
            if (ok) ++exchanged_sides;
            add(out, where + ": two attracting 2-cycles exchanged by negation", ok,
                fmt("points %.9f %.9f kappa=%.6f", o.points[0].real(), o.points[1].real(), o.kappa.real()));
        }
    }
    add(out, "one symmetric side and one exchanged side", symmetric_sides == 1 && exchanged_sides == 1,
        fmt("symmetric=%g exchanged=%g", symmetric_sides, exchanged_sides));
    return out;
}

Checks criterion_7() {
    Checks out;
    const auto f = make_family("quad");
    const auto h = speed_motion(f, -0.5, 60);
    const auto r0 = invariance_order(f, h);
    add(out, "speed-field motion order 1.0 +- 0.25", !r0.underflow && std::abs(r0.order - 1) <= 0.25,
        fmt("order=%.4f", r0.order));
    const auto avg = average_of_lifts(f, h, 8);
    const auto r8 = invariance_order(f, avg);
    add(out, "average of 8 lifts has order >= 1.75", r8.order >= 1.75, fmt("order=%.4f", r8.order));
    const Cycle c = find_cycle(f, -0.5, 1, {-0.3});
    const auto hc = cycle_motion(f, c);
    const auto lc = lift(f, hc);
    double d = 0;
    for (std::size_t i = 0; i < hc.size(); ++i)
        for (std::size_t k = 0; k < hc.lambdas.size(); ++k) d = std::max(d, std::abs(lc.values[i][k] - hc.values[i][k]));
    add(out, "cycle-branch motion is fixed by lift within 1e-12", d <= 1e-12, fmt("max change %.3e", d));
    return out;
}

Checks criterion_8() {
    Checks out;
    const auto f = make_family("quad");
    double worst = std::numeric_limits<double>::infinity();
    bool all = true;
    for (int k = 1; k <= 9; ++k) {
        const auto r = d_rho(f, 0.25, 0.1 * k, 2000);
        const double margin = r.partial.real() - r.tail_bound;
        all = all && !r.non_positive && margin > 0;
        worst = std::min(worst, margin);
    }
    add(out, "D(rho) - tail bound > 0 for rho = 0.1..0.9 at N=2000", all, fmt("smallest margin %.6g", worst));
    const auto v = v_rho_field(f, -0.5, 0.5, 50);
    add(out, "v_rho eigen-relation residual <= 1e-9 (rho=0.5, N=50)", v.eigen_residual <= 1e-9,
        fmt("residual %.3e", v.eigen_residual));
    return out;
}

Checks criterion_9() {
    Checks out;
    const auto g = polynomial_family("z+z^2", {0.0, 1.0, 1.0});
    const Cycle c = make_cycle(g, 0.0, {0.0});
    const auto geom = petal_geometry(g, c, 0.5, 0.05);
    const auto rep = flower_escape_check(g, c, geom, 0.1, 101);
    add(out, "flower check on z+z^2: zero violations", rep.violations.empty() && rep.outside > 0 && rep.inside > 0,
        fmt("violations=%g inside=%g outside=%g", static_cast<double>(rep.violations.size()), rep.inside, rep.outside));

    const auto q = make_family("quad");
    const auto conv = basin_check(q, 0.25, make_cycle(q, 0.25, {0.5}), 2000000, 1e-5);
    add(out, "|c_n - 1/2| ~ C/n for z^2+1/4: exponent -1 +- 0.1", std::abs(conv.decay_exponent + 1) <= 0.1,
        fmt("exponent=%.4f steps=%g", conv.decay_exponent, static_cast<double>(conv.steps)));
    return out;
}

/// Largest |w(f(z)) - Gamma(z) - f'(z) w(z)| over a polar grid of the disk.
double cohomology_defect(const CohomologySolution& s, const MapJetFn& f, const MapJetFn& gamma, double radius) {
    double d = 0;
    for (double fr : {0.0, 0.3, 0.6, 0.9})
        for (int k = 0; k < 16; ++k) {
            const cplx z = std::polar(fr * radius, 2 * kPi * k / 16);
            const auto [fz, dfz] = map_value_dz(f, z);
            d = std::max(d, std::abs(s(fz) - map_value(gamma, z) - dfz * s(z)));
        }
    return d;
}

Checks criterion_10() {
    Checks out;
    for (cplx k : {cplx(0.3), cplx(0.5), cplx(0.0, 0.8)}) {
        const auto lin = koenigs(polynomial_map({0.0, k, 1.0}), 0.0, 0.1);
        const double err = std::abs(lin.second_derivative() - 2.0 / (k - k * k));
        add(out, fmt("Koenigs phi''(0) = f''(0)/(k-k^2) at k=%g%+gi", k.real(), k.imag()), err <= 1e-8,
            fmt("error %.3e", err));
    }
    {
        const cplx k = 0.4, g = 2.0;
        const auto f = polynomial_map({0.0, k});
        const auto gamma = polynomial_map({g});
        const auto s = solve_cohomology(f, gamma, 0.0, 0.3, g / (1.0 - k), 0.5);
        double dev = 0;
        for (cplx z : {cplx(0.0), cplx(0.2, 0.1), cplx(-0.4)}) dev = std::max(dev, std::abs(s(z) - g / (1.0 - k)));
        const double res = std::max(s.residual, cohomology_defect(s, f, gamma, 0.5));
        add(out, "constant Gamma on kz: w = gamma/(1-k)", res <= 1e-8 && dev <= 1e-12,
            fmt("residual %.3e deviation %.3e", res, dev));
    }
    {
        const cplx k(0.3, 0.4);
        const auto f = polynomial_map({0.0, k});
        const auto gamma = polynomial_map({0.0, 0.0, 1.0});
        const cplx beta = 1.0 / (k * k - k);
        const auto s = solve_cohomology(f, gamma, 0.0, 0.25, beta * 0.0625, 0.5);
        const double res = std::max(s.residual, cohomology_defect(s, f, gamma, 0.5));
        add(out, "Gamma = z^2 on kz", res <= 1e-8, fmt("residual %.3e", res));
    }
    {
        const cplx k = 0.5;
        const auto f = polynomial_map({0.0, k, 1.0});
        const cplx g0 = 1.0, g1 = g0 * 2.0 / (k - 1.0);
        const auto gamma = polynomial_map({g0, g1, 0.3});
        const auto s = solve_cohomology(f, gamma, 0.0, 0.1, 1.7, 0.15);
        const double res = std::max(s.residual, cohomology_defect(s, f, gamma, 0.15));
        add(out, "quadratic Gamma on kz+z^2", res <= 1e-8, fmt("residual %.3e", res));
    }
    return out;
}

struct Criterion {
    const char* title;
    double budget_s;
    std::function<Checks()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> c = {
        {"multiplier derivative", 1, criterion_1},
        {"degenerate pitchfork of w sin x", 1, criterion_2},
        {"saddle-node certificate", 5, criterion_3},
        {"period-doubling certificate", 5, criterion_4},
        {"window monotonicity", 5, criterion_5},
        {"bifurcation diagram of w sin x", 60, criterion_6},
        {"motion machinery", 10, criterion_7},
        {"series D(rho) and v_rho", 5, criterion_8},
        {"parabolic flower", 30, criterion_9},
        {"linearization and cohomology", 5, criterion_10},
    };
    return c;
}

bool run_criterion(int n) {
    const Criterion& c = criteria()[static_cast<std::size_t>(n - 1)];
    std::printf("criterion %d: %s\n", n, c.title);
    const auto t0 = std::chrono::steady_clock::now();
    Checks checks;
    try {
        checks = c.run();
    } catch (const std::exception& e) {
        add(checks, "completed without error", false, e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    add(checks, fmt("runtime < %g s", c.budget_s), secs < c.budget_s, fmt("%.3f s", secs));
    bool ok = true;
    for (const auto& k : checks) {
        std::printf("  %s  %s  [%s]\n", k.pass ? "PASS" : "FAIL", k.name.c_str(), k.detail.c_str());
        ok = ok && k.pass;
    }
    std::fflush(stdout);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            which.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
            return 64;
        }
    }
    if (which.empty())
        for (int n = 1; n <= static_cast<int>(criteria().size()); ++n) which.push_back(n);
    bool ok = true;
    for (int n : which) {
        if (n < 1 || n > static_cast<int>(criteria().size())) {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 64;
        }
        ok = run_criterion(n) && ok;
    }
    return ok ? 0 : 1;
}
