#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "parabifurc/cycles.hpp"
#include "parabifurc/errors.hpp"
#include "parabifurc/family.hpp"
#include "parabifurc/io.hpp"
#include "parabifurc/parallel.hpp"
#include "parabifurc/transversality.hpp"

namespace parabifurc {

enum class ScanStatus { Periodic, Unresolved, Escaped };

inline const char* to_string(ScanStatus s) {
    switch (s) {
        case ScanStatus::Periodic: return "Periodic";
        case ScanStatus::Unresolved: return "Unresolved";
        case ScanStatus::Escaped: return "Escaped";
    }
    return "?";
}

struct ScanPoint {
    double t = 0.0;
    ScanStatus status = ScanStatus::Unresolved;
    int q = 0;
    double kappa = 0.0;
    std::vector<double> points;
    /// 1 for a cycle symmetric under negation (odd families only).
    int symmetry = 0;
    std::string note;

    json to_json() const {
        json j;
        j["t"] = t;
        j["status"] = to_string(status);
        j["q"] = q;
        j["kappa"] = kappa;
        j["symmetry"] = symmetry;
        j["points"] = points;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

struct ScanOptions {
    int burn = 900;
    /// Iterations including the transient; at least 2 q_max + 2 points are kept after it.
    int total = 1000;
    int q_max = 256;
    double return_tol = 1e-6;
    /// Starting point of the orbit; defaults to the critical point.
    std::optional<double> seed;
    int threads = 0;
};

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw DomainError("grid_n must be at least 2");
    std::vector<double> t(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = a + (b - a) * k / (n - 1);
    return t;
}

namespace detail {

inline void require_real(const AnalyticFamily& fam) {
    if (!fam.real_symmetric) throw DomainError(fam.id + " is not real-symmetric");
}

/// Smallest q with max_i |x_{i+q} - x_i| < tol over the last 2q recorded points.
inline int closest_return(const std::vector<double>& x, int q_max, double tol) {
    const int L = static_cast<int>(x.size());
    for (int q = 1; q <= q_max && 2 * q < L; ++q) {
        double worst = 0.0;
        for (int i = L - 1; i >= std::max(q, L - 2 * q); --i)
            worst = std::max(worst, std::abs(x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i - q)]));
        if (worst < tol) return q;
    }
    return 0;
}

/// Cycle of period q near the given points whose minimal period is q.
inline std::optional<Cycle> polish(const AnalyticFamily& fam, double t, int q, const std::vector<cplx>& seed) {
    try {
        Cycle c = find_cycle(fam, t, q, seed);
        if (c.minimal_period != q) return std::nullopt;
        for (auto z : c.points)
            if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z))) return std::nullopt;
        for (auto& z : c.points) z = z.real();
        return c;
    } catch (const Error&) {
        return std::nullopt;
    }
}

inline std::vector<double> real_parts(const std::vector<cplx>& z) {
    std::vector<double> r;
    for (auto v : z) r.push_back(v.real());
    return r;
}

inline std::vector<cplx> as_complex(const std::vector<double>& x) { return {x.begin(), x.end()}; }

/// Symmetry class of a real cycle of an odd family: 1 when O = -O, else 0; always 0
/// for other families.
inline int symmetry_class(const AnalyticFamily& fam, const std::vector<cplx>& pts) {
    if (!fam.odd || pts.size() % 2 != 0) return 0;
    Cycle c;
    c.q = static_cast<int>(pts.size());
    c.points = pts;
    return is_symmetric(c, 1e-7) ? 1 : 0;
}

}  // namespace detail

/// Orientation of the family at parameter t: multiplicative families t f reverse it for t < 0.
inline int orientation_at(const AnalyticFamily& fam, double t) {
    return fam.form == FamilyForm::Multiplicative && t < 0 ? -fam.orientation : fam.orientation;
}

inline ScanPoint scan_point(const AnalyticFamily& fam, double t, const ScanOptions& opt) {
    ScanPoint sp;
    sp.t = t;
    double x = opt.seed.value_or(fam.critical_point.real());
    const int keep = std::max(opt.total - opt.burn, 2 * opt.q_max + 2);
    std::vector<double> tail;
    tail.reserve(static_cast<std::size_t>(keep));
    try {
        for (int n = 0; n < opt.burn + keep; ++n) {
            const cplx y = fam.value(t, x);
            if (fam.escaped(y) || std::abs(y.imag()) > 0) {
                sp.status = ScanStatus::Escaped;
                return sp;
            }
            x = y.real();
            if (n >= opt.burn) tail.push_back(x);
        }
    } catch (const DomainError&) {
        sp.status = ScanStatus::Escaped;
        return sp;
    }
    const int q = detail::closest_return(tail, opt.q_max, opt.return_tol);
    if (q == 0) {
        sp.note = "no closest return";
        return sp;
    }
    std::vector<cplx> seed(tail.end() - q, tail.end());
    const auto c = detail::polish(fam, t, q, seed);
    if (!c) {
        sp.note = "Newton polish failed";
        return sp;
    }
    sp.status = ScanStatus::Periodic;
    sp.q = q;
    sp.kappa = c->kappa.real();
    sp.points = detail::real_parts(c->points);
    sp.symmetry = detail::symmetry_class(fam, c->points);
    return sp;
}

/// Attractor summary per grid parameter, ordered by grid index.
inline std::vector<ScanPoint> scan(const AnalyticFamily& fam, double t_lo, double t_hi, int grid_n,
                                   const ScanOptions& opt = {}) {
    detail::require_real(fam);
    const auto ts = linspace(t_lo, t_hi, grid_n);
    std::vector<ScanPoint> out(ts.size());
    parallel_for(ts.size(), resolve_threads(opt.threads), [&](std::size_t k) { out[k] = scan_point(fam, ts[k], opt); });
    return out;
}

inline std::string scan_to_csv(const std::vector<ScanPoint>& s) {
    CsvWriter csv({"t", "status", "q", "kappa"});
    for (const auto& p : s)
        csv.row_strings({format_double(p.t), to_string(p.status), std::to_string(p.q), format_double(p.kappa)});
    return csv.str();
}

enum class EdgeKind { KappaPlusOne, KappaMinusOne, RangeEnd };

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::KappaPlusOne: return "KappaPlusOne";
        case EdgeKind::KappaMinusOne: return "KappaMinusOne";
        case EdgeKind::RangeEnd: return "RangeEnd";
    }
    return "?";
}

struct WindowEdge {
    double t = 0.0;
    EdgeKind kind = EdgeKind::RangeEnd;
    /// Cycle just inside the edge.
    std::vector<double> points;
};

struct AttractingWindow {
    double t_lo = 0.0, t_hi = 0.0;
    int q = 0;
    WindowEdge lo, hi;
    std::vector<std::pair<double, double>> kappa_samples;
    std::optional<double> superattracting_t;
    int orientation = 1;
    /// Adjacent samples that fail to decrease in the family orientation.
    int monotone_violations = 0;
    /// Monotonicity is asserted for q >= 2 except on symmetric cycles of odd
    /// families, whose multiplier is a square and returns to +1 at both ends.
    bool monotone_asserted = false;
    bool symmetric = false;

    json to_json() const {
        json j;
        j["t_lo"] = t_lo;
        j["t_hi"] = t_hi;
        j["q"] = q;
        j["lo_kind"] = to_string(lo.kind);
        j["hi_kind"] = to_string(hi.kind);
        j["orientation"] = orientation;
        j["contains_superattracting"] = superattracting_t.has_value();
        j["superattracting_t"] = superattracting_t ? json(*superattracting_t) : json(nullptr);
        j["monotone_violations"] = monotone_violations;
        j["monotone_asserted"] = monotone_asserted;
        j["symmetric"] = symmetric;
        json ks = json::array();
        for (auto [t, k] : kappa_samples) ks.push_back(json::array({t, k}));
        j["kappa_samples"] = ks;
        return j;
    }
};

struct WindowOptions {
    double t_tol = 1e-9;
    int samples = 100;
};

namespace detail {

/// Walks from an inside parameter toward `outside` over the grid, then bisects.
inline WindowEdge locate_edge(const AnalyticFamily& fam, int q, double t_in, std::vector<cplx> pts, double t_out,
                              const WindowOptions& opt) {
    const int sym = symmetry_class(fam, pts);
    const auto c0 = polish(fam, t_in, q, pts);
    double kappa = c0 ? c0->kappa.real() : 0.0;
    auto inside = [&](double t, std::vector<cplx>& seed, double& k) {
        const auto c = polish(fam, t, q, seed);
        if (!c || !(std::abs(c->kappa) < 1) || symmetry_class(fam, c->points) != sym) return false;
        seed = c->points;
        k = c->kappa.real();
        return true;
    };
    double a = t_in, b = t_out;
    for (int it = 0; it < 200 && std::abs(b - a) > opt.t_tol; ++it) {
        const double m = 0.5 * (a + b);
        std::vector<cplx> trial = pts;
        double k = kappa;
        if (inside(m, trial, k)) {
            a = m;
            pts = trial;
            kappa = k;
        } else {
            b = m;
        }
    }
    WindowEdge e;
    e.kind = kappa > 0 ? EdgeKind::KappaPlusOne : EdgeKind::KappaMinusOne;
    e.t = 0.5 * (a + b);
    e.points = real_parts(pts);
    // Sharpen with the augmented solve when it agrees with the bracket.
    try {
        const double target = e.kind == EdgeKind::KappaPlusOne ? 1.0 : -1.0;
        const auto [w, cyc] = find_parabolic_pair(fam, q, e.t, pts, target);
        if (std::abs(w.imag()) < 1e-12 && std::abs(w.real() - e.t) < 1e-6 && cyc.minimal_period == q) e.t = w.real();
    } catch (const Error&) {
    }
    return e;
}

inline std::optional<Cycle> follow(const AnalyticFamily& fam, double t, int q, const std::vector<cplx>& seed) {
    return polish(fam, t, q, seed);
}

/// kappa, or for a symmetric cycle the multiplier of x -> -g^{q/2}(x), whose square is kappa.
inline double signed_multiplier(const AnalyticFamily& fam, const Cycle& c, bool symmetric) {
    if (!symmetric) return c.kappa.real();
    double mu = -1.0;
    for (int j = 0; j < c.q / 2; ++j) mu *= fam.value_dz(c.w, c.points[static_cast<std::size_t>(j)]).second.real();
    return mu;
}

}  // namespace detail

/// kappa at n interior parameters of the window, following the cycle by Newton.
inline std::vector<std::pair<double, double>> window_kappa(const AnalyticFamily& fam, const AttractingWindow& w, int n,
                                                           std::vector<cplx> seed, double seed_t,
                                                           std::vector<std::pair<double, double>>* signed_out = nullptr) {
    std::vector<std::pair<double, double>> out;
    std::vector<double> ts;
    for (int k = 0; k < n; ++k) ts.push_back(w.t_lo + (w.t_hi - w.t_lo) * (k + 0.5) / n);
    // Start from the sample closest to the seed and walk both ways.
    std::size_t start = 0;
    for (std::size_t k = 0; k < ts.size(); ++k)
        if (std::abs(ts[k] - seed_t) < std::abs(ts[start] - seed_t)) start = k;
    std::vector<double> kap(ts.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> mu(ts.size(), std::numeric_limits<double>::quiet_NaN());
    auto walk = [&](long from, long to, long step, std::vector<cplx> s, double s_t) {
        for (long k = from; k != to; k += step) {
            const double t = ts[static_cast<std::size_t>(k)];
            // Sub-steps keep Newton on the branch when the samples are far apart.
            const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(t - s_t) / 1e-3)));
            bool ok = true;
            for (int j = 1; j <= sub && ok; ++j) {
                const auto c = detail::follow(fam, s_t + (t - s_t) * j / sub, w.q, s);
                if (!c) ok = false;
                else s = c->points;
                if (ok && j == sub) {
                    kap[static_cast<std::size_t>(k)] = c->kappa.real();
                    mu[static_cast<std::size_t>(k)] = detail::signed_multiplier(fam, *c, w.symmetric);
                }
            }
            if (!ok) break;
            s_t = t;
        }
    };
    walk(static_cast<long>(start), static_cast<long>(ts.size()), 1, seed, seed_t);
    walk(static_cast<long>(start), -1, -1, seed, seed_t);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (!std::isfinite(kap[k])) continue;
        out.emplace_back(ts[k], kap[k]);
        if (signed_out) signed_out->emplace_back(ts[k], mu[k]);
    }
    return out;
}

/// Maximal runs of a fixed period with kappa in (-1,1), with bisected edges.
inline std::vector<AttractingWindow> detect_windows(const AnalyticFamily& fam, const std::vector<ScanPoint>& s,
                                                    const WindowOptions& opt = {}) {
    std::vector<AttractingWindow> out;
    const std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        if (s[i].status != ScanStatus::Periodic || !(std::abs(s[i].kappa) < 1)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && s[j + 1].status == ScanStatus::Periodic && s[j + 1].q == s[i].q &&
               std::abs(s[j + 1].kappa) < 1 && s[j + 1].symmetry == s[i].symmetry)
            ++j;
        AttractingWindow w;
        w.q = s[i].q;
        w.orientation = orientation_at(fam, 0.5 * (s[i].t + s[j].t));
        // Walk outward across unresolved grid points while the cycle stays attracting.
        auto extend = [&](std::size_t from, long dir) -> WindowEdge {
            std::vector<cplx> pts = detail::as_complex(s[from].points);
            double t_in = s[from].t;
            long k = static_cast<long>(from) + dir;
            while (k >= 0 && k < static_cast<long>(n)) {
                const auto c = detail::follow(fam, s[static_cast<std::size_t>(k)].t, w.q, pts);
                if (!c || !(std::abs(c->kappa) < 1) || detail::symmetry_class(fam, c->points) != s[from].symmetry) break;
                pts = c->points;
                t_in = s[static_cast<std::size_t>(k)].t;
                k += dir;
            }
            if (k < 0 || k >= static_cast<long>(n)) {
                WindowEdge e;
                e.t = t_in;
                e.kind = EdgeKind::RangeEnd;
                e.points = detail::real_parts(pts);
                return e;
            }
            return detail::locate_edge(fam, w.q, t_in, pts, s[static_cast<std::size_t>(k)].t, opt);
        };
        w.lo = extend(i, -1);
        w.hi = extend(j, +1);
        w.t_lo = w.lo.t;
        w.t_hi = w.hi.t;
        const std::size_t mid = (i + j) / 2;
        w.symmetric = s[i].symmetry == 1;
        std::vector<std::pair<double, double>> sig;
        w.kappa_samples = window_kappa(fam, w, opt.samples, detail::as_complex(s[mid].points), s[mid].t, &sig);
        for (std::size_t k = 0; k + 1 < w.kappa_samples.size(); ++k) {
            const double d = w.kappa_samples[k + 1].second - w.kappa_samples[k].second;
            if (!(w.orientation * d < 0)) ++w.monotone_violations;
            const double a = sig[k].second, b = sig[k + 1].second;
            if (!w.superattracting_t && ((a > 0 && b <= 0) || (a < 0 && b >= 0))) {
                // kappa = 0 by bisection along the followed cycle.
                double lo = sig[k].first, hi = sig[k + 1].first;
                auto c = detail::follow(fam, lo, w.q, detail::as_complex(s[mid].points));
                std::vector<cplx> pts = c ? c->points : detail::as_complex(s[mid].points);
                const double sa = a;
                for (int it = 0; it < 100 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
                    const double m = 0.5 * (lo + hi);
                    const auto cm = detail::follow(fam, m, w.q, pts);
                    if (!cm) break;
                    pts = cm->points;
                    ((detail::signed_multiplier(fam, *cm, w.symmetric) > 0) == (sa > 0) ? lo : hi) = m;
                }
                w.superattracting_t = 0.5 * (lo + hi);
            }
        }
        w.monotone_asserted = w.q >= 2 && !w.symmetric;
        out.push_back(std::move(w));
        i = j + 1;
    }
    return out;
}

enum class EventKind { SaddleNode, PeriodDoubling, Pitchfork, DegenerateOther };

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::SaddleNode: return "SaddleNode";
        case EventKind::PeriodDoubling: return "PeriodDoubling";
        case EventKind::Pitchfork: return "Pitchfork";
        case EventKind::DegenerateOther: return "DegenerateOther";
    }
    return "?";
}

/// A fixed point of f^n found by the census, with its multiplier.
struct CensusPoint {
    double x = 0.0;
    double multiplier = 0.0;
};

namespace detail {

/// f^n(x) - x and its derivative; nullopt when the orbit escapes.
inline std::optional<std::pair<double, double>> return_residual(const AnalyticFamily& fam, double t, int n, double x) {
    double y = x, d = 1.0;
    for (int k = 0; k < n; ++k) {
        const auto [g, dg] = fam.value_dz(t, y);
        if (fam.escaped(g)) return std::nullopt;
        d *= dg.real();
        y = g.real();
    }
    return std::make_pair(y - x, d);
}

}  // namespace detail

/// Real fixed points of f_t^n in [center - delta, center + delta]: Newton from a
/// uniform seed grid, plus bisection on sign changes over a 16x finer grid so that
/// closely spaced roots are not shadowed; merged at 1e-9.
inline std::vector<CensusPoint> fixed_point_census(const AnalyticFamily& fam, double t, int n, double center, double delta,
                                                   int seeds = 64) {
    std::vector<double> roots;
    for (int s = 0; s < seeds; ++s) {
        double x = center - delta + 2 * delta * (s + 0.5) / seeds;
        for (int it = 0; it < 100; ++it) {
            const auto r = detail::return_residual(fam, t, n, x);
            if (!r || r->second == 1.0) break;
            const double step = r->first / (r->second - 1.0);
            x -= step;
            if (!std::isfinite(x)) break;
            // A small residual alone is not enough: f^n - x is very flat near a degenerate root.
            if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) {
                roots.push_back(x);
                break;
            }
        }
    }
    const int fine = 16 * seeds;
    double xa = center - delta;
    auto ra = detail::return_residual(fam, t, n, xa);
    for (int k = 1; k <= fine; ++k) {
        const double xb = center - delta + 2 * delta * k / fine;
        const auto rb = detail::return_residual(fam, t, n, xb);
        if (ra && rb && ((ra->first < 0) != (rb->first < 0))) {
            double lo = xa, hi = xb, flo = ra->first;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double m = 0.5 * (lo + hi);
                const auto rm = detail::return_residual(fam, t, n, m);
                if (!rm) break;
                if ((rm->first < 0) == (flo < 0)) lo = m, flo = rm->first;
                else hi = m;
            }
            roots.push_back(0.5 * (lo + hi));
        }
        xa = xb;
        ra = rb;
    }
    std::sort(roots.begin(), roots.end());
    std::vector<CensusPoint> out;
    for (double x : roots) {
        if (std::abs(x - center) > delta) continue;
        if (!out.empty() && std::abs(out.back().x - x) < 1e-9) continue;
        const auto r = detail::return_residual(fam, t, n, x);
        out.push_back({x, r ? r->second : std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

struct BifurcationEvent {
    double t_star = 0.0;
    EventKind kind = EventKind::DegenerateOther;
    int q = 0;
    double a0 = 0.0;
    Cycle cycle;
    double Q_a0 = 0.0;
    double D2 = 0.0;
    std::optional<double> kappa_prime;
    /// Census offset |t - t*| and neighborhood radius.
    double eps = 0.0;
    double delta = 0.0;
    int count_minus = 0;
    int count_plus = 0;
    bool symmetric = false;
    /// Certificate passed: census structure and orientation checks.
    bool certified = false;
    std::string note;
    json certificate = json::object();

    json to_json() const {
        json j;
        j["t_star"] = t_star;
        j["kind"] = to_string(kind);
        j["q"] = q;
        j["a0"] = a0;
        j["cycle"] = cycle.to_json();
        j["Q_a0"] = Q_a0;
        j["D2"] = D2;
        j["kappa_prime"] = kappa_prime ? json(*kappa_prime) : json(nullptr);
        j["eps"] = eps;
        j["delta"] = delta;
        j["count_minus"] = count_minus;
        j["count_plus"] = count_plus;
        j["symmetric"] = symmetric;
        j["certified"] = certified;
        j["certificate"] = certificate;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

struct EventOptions {
    double eps = 1e-4;
    int seeds = 64;
    double degeneracy_tol = 1e-8;
};

namespace detail {

inline double census_delta(double eps, const Cycle& c) { return 10.0 * std::sqrt(eps) * c.scale(); }

/// Shrinks delta to half the distance from a0 to the nearest other fixed point of
/// f_t^n, so that a neighbouring cycle does not enter the census.
inline double isolated_delta(const AnalyticFamily& fam, double t, int n, double a0, double delta, int seeds) {
    double d = delta;
    for (const auto& p : fixed_point_census(fam, t, n, a0, delta, seeds))
        if (std::abs(p.x - a0) > 1e-3 * delta) d = std::min(d, 0.5 * std::abs(p.x - a0));
    return d;
}

inline void fill_derivatives(const AnalyticFamily& fam, BifurcationEvent& e) {
    e.Q_a0 = Q_of(fam, e.cycle, e.cycle.points[0]).real();
    e.D2 = return_map_jet(fam, e.cycle, 2).derivative(2, 0).real();
}

/// Census offsets tried in turn: opt.eps, then three further decades of 100.
inline std::vector<double> eps_ladder(double eps) { return {eps, eps * 1e-2, eps * 1e-4, eps * 1e-6}; }

inline json census_json(const std::vector<CensusPoint>& c) {
    json a = json::array();
    for (const auto& p : c) a.push_back(json::array({p.x, p.multiplier}));
    return a;
}

}  // namespace detail

/// Fold with kappa = 1: both census sides are computed and the pair must appear on
/// the side -sign(Q D2), where f^q(x) - x = Q dt + D2 dx^2 / 2 has real roots.
inline BifurcationEvent locate_saddle_node(const AnalyticFamily& fam, int q, double t_seed, std::vector<cplx> seed,
                                           const EventOptions& opt = {}) {
    detail::require_real(fam);
    const auto [w, cyc] = find_parabolic_pair(fam, q, t_seed, std::move(seed), 1.0);
    BifurcationEvent e;
    e.kind = EventKind::SaddleNode;
    e.t_star = w.real();
    e.q = q;
    e.cycle = cyc;
    e.a0 = cyc.points[0].real();
    detail::fill_derivatives(fam, e);
    const double scale = cyc.scale();
    if (std::abs(e.Q_a0) < opt.degeneracy_tol * scale || std::abs(e.D2) < opt.degeneracy_tol * scale)
        throw DegenerateFold("Q(a0) = " + format_double(e.Q_a0) + ", D2 g^q(a0) = " + format_double(e.D2));
    const int pair_side = e.Q_a0 * e.D2 < 0 ? 1 : -1;
    std::vector<CensusPoint> minus, plus;
    for (double eps : detail::eps_ladder(opt.eps)) {
        e.eps = eps;
        e.delta = detail::census_delta(eps, cyc);
        minus = fixed_point_census(fam, e.t_star - eps, q, e.a0, e.delta, opt.seeds);
        plus = fixed_point_census(fam, e.t_star + eps, q, e.a0, e.delta, opt.seeds);
        const auto& pair = pair_side > 0 ? plus : minus;
        const auto& empty = pair_side > 0 ? minus : plus;
        const bool mixed =
            pair.size() == 2 && ((std::abs(pair[0].multiplier) < 1) != (std::abs(pair[1].multiplier) < 1));
        e.certified = pair.size() == 2 && empty.empty() && mixed;
        if (e.certified) break;
    }
    e.count_minus = static_cast<int>(minus.size());
    e.count_plus = static_cast<int>(plus.size());
    const int orient = orientation_at(fam, e.t_star);
    e.certificate["pair_side"] = pair_side;
    e.certificate["Q_positive"] = e.Q_a0 > 0;
    e.certificate["orientation"] = orient;
    e.certificate["orientation_consistent"] = pair_side == orient;
    e.certificate["census_minus"] = detail::census_json(minus);
    e.certificate["census_plus"] = detail::census_json(plus);
    return e;
}

/// Flip with kappa = -1: one fixed point of f^{2q} near a0 before, three after, in
/// the direction of decreasing kappa.
inline BifurcationEvent locate_period_doubling(const AnalyticFamily& fam, int q, double t_seed, std::vector<cplx> seed,
                                               const EventOptions& opt = {}) {
    detail::require_real(fam);
    const auto [w, cyc] = find_parabolic_pair(fam, q, t_seed, std::move(seed), -1.0);
    BifurcationEvent e;
    e.kind = EventKind::PeriodDoubling;
    e.t_star = w.real();
    e.q = q;
    e.cycle = cyc;
    e.a0 = cyc.points[0].real();
    detail::fill_derivatives(fam, e);
    const auto rep = transversality_report(fam, cyc);
    if (!rep.kappa_prime) throw DegenerateFold("kappa' undefined at the flip");
    e.kappa_prime = rep.kappa_prime->real();
    const int after = *e.kappa_prime < 0 ? 1 : -1;
    std::vector<CensusPoint> minus, plus;
    int n_before = 0, n_after = 0;
    for (double eps : detail::eps_ladder(opt.eps)) {
        e.eps = eps;
        e.delta = detail::isolated_delta(fam, e.t_star, q, e.a0, detail::census_delta(eps, cyc), opt.seeds);
        minus = fixed_point_census(fam, e.t_star - eps, 2 * q, e.a0, e.delta, opt.seeds);
        plus = fixed_point_census(fam, e.t_star + eps, 2 * q, e.a0, e.delta, opt.seeds);
        n_after = static_cast<int>((after > 0 ? plus : minus).size());
        n_before = static_cast<int>((after > 0 ? minus : plus).size());
        if (n_before == 1 && n_after == 3) break;
    }
    e.count_minus = static_cast<int>(minus.size());
    e.count_plus = static_cast<int>(plus.size());
    e.certificate["after_side"] = after;
    e.certificate["census_minus"] = detail::census_json(minus);
    e.certificate["census_plus"] = detail::census_json(plus);
    if (n_before != 1 || n_after != 3)
        throw CountMismatch("fixed points of f^" + std::to_string(2 * q) + " near a0: " + std::to_string(n_before) +
                            " before, " + std::to_string(n_after) + " after");
    e.certified = std::abs(*e.kappa_prime) > 0;
    return e;
}

/// Pitchfork of a symmetric cycle of an odd family; `half` holds the first q/2 points.
inline BifurcationEvent locate_pitchfork(const AnalyticFamily& fam, double t_seed, std::vector<cplx> half,
                                         const EventOptions& opt = {}) {
    if (!fam.odd) throw NotOdd(fam.id + " is not odd");
    detail::require_real(fam);
    const auto [w, cyc] = find_symmetric_parabolic(fam, t_seed, std::move(half), 1.0);
    BifurcationEvent e;
    e.kind = EventKind::Pitchfork;
    e.t_star = w.real();
    e.q = cyc.q;
    e.cycle = cyc;
    e.a0 = cyc.points[0].real();
    detail::fill_derivatives(fam, e);
    const int m = cyc.q / 2;
    double asym = 0.0;
    for (int j = 0; j < m; ++j)
        asym = std::max(asym, std::abs(cyc.points[static_cast<std::size_t>(j + m)] + cyc.points[static_cast<std::size_t>(j)]));
    e.symmetric = asym <= 1e-10 * cyc.scale();
    std::vector<CensusPoint> minus, plus;
    for (double eps : detail::eps_ladder(opt.eps)) {
        e.eps = eps;
        e.delta = detail::census_delta(eps, cyc);
        minus = fixed_point_census(fam, e.t_star - eps, e.q, e.a0, e.delta, opt.seeds);
        plus = fixed_point_census(fam, e.t_star + eps, e.q, e.a0, e.delta, opt.seeds);
        const auto lo = std::min(minus.size(), plus.size()), hi = std::max(minus.size(), plus.size());
        if (lo == 1 && hi == 3) break;
    }
    e.count_minus = static_cast<int>(minus.size());
    e.count_plus = static_cast<int>(plus.size());
    e.certificate["census_minus"] = detail::census_json(minus);
    e.certificate["census_plus"] = detail::census_json(plus);
    e.certificate["Q_abs"] = std::abs(e.Q_a0);
    const bool one_minus = minus.size() == 1, one_plus = plus.size() == 1;
    if (one_minus == one_plus) throw CensusMismatch("expected one and three fixed points of f^q across the pitchfork");
    const auto& single = one_minus ? minus : plus;
    const auto& triple = one_minus ? plus : minus;
    const double t_triple = e.t_star + (one_minus ? e.eps : -e.eps);
    if (triple.size() != 3) throw CensusMismatch("expected three fixed points of f^q on the split side");
    const bool single_ok = std::abs(single[0].multiplier) < 1;
    const bool middle_repels = std::abs(triple[1].multiplier) > 1;
    const bool outer_attract = std::abs(triple[0].multiplier) < 1 && std::abs(triple[2].multiplier) < 1;
    // The two outer points lie on cycles exchanged by negation.
    const auto orbit0 = orbit(fam, t_triple, triple[0].x, e.q);
    bool exchanged = false;
    for (auto z : orbit0) exchanged = exchanged || std::abs(z.real() + triple[2].x) < 1e-8 * cyc.scale();
    e.certificate["single_side"] = one_minus ? -1 : 1;
    e.certificate["exchanged_by_negation"] = exchanged;
    if (!(single_ok && middle_repels && outer_attract && exchanged))
        throw CensusMismatch("pitchfork census does not show one attracting symmetric cycle against a repelling one "
                             "flanked by an exchanged attracting pair");
    e.certified = e.symmetric && std::abs(e.Q_a0) <= opt.degeneracy_tol * cyc.scale();
    return e;
}

/// Recomputes the certificate quantities at t_star; returns the largest discrepancy.
inline double recheck(const AnalyticFamily& fam, const BifurcationEvent& e) {
    const Cycle c = make_cycle(fam, e.t_star, e.cycle.points);
    double d = std::abs(Q_of(fam, c, c.points[0]).real() - e.Q_a0);
    d = std::max(d, std::abs(return_map_jet(fam, c, 2).derivative(2, 0).real() - e.D2));
    if (e.kappa_prime) {
        const auto rep = transversality_report(fam, c);
        if (rep.kappa_prime) d = std::max(d, std::abs(rep.kappa_prime->real() - *e.kappa_prime));
    }
    return d;
}

/// Classifies the event at a window edge and locates it.
inline BifurcationEvent dispatch_event(const AnalyticFamily& fam, int q, const WindowEdge& edge,
                                       const EventOptions& opt = {}) {
    const std::vector<cplx> pts = detail::as_complex(edge.points);
    double scale = 1.0;
    for (auto x : edge.points) scale = std::max(scale, std::abs(x));
    auto degenerate = [&](const std::string& why) {
        BifurcationEvent e;
        e.kind = EventKind::DegenerateOther;
        e.t_star = edge.t;
        e.q = q;
        e.a0 = edge.points.empty() ? 0.0 : edge.points[0];
        e.note = why;
        return e;
    };
    try {
        if (edge.kind == EdgeKind::KappaMinusOne) {
            try {
                return locate_period_doubling(fam, q, edge.t, pts, opt);
            } catch (const CountMismatch&) {
                if (!fam.odd) throw;
            }
        }
        if (q % 2 == 0) {
            const int m = q / 2;
            double collapse = 0.0, asym = 0.0;
            for (int j = 0; j < m; ++j) {
                collapse = std::max(collapse, std::abs(edge.points[static_cast<std::size_t>(j + m)] - edge.points[static_cast<std::size_t>(j)]));
                asym = std::max(asym, std::abs(edge.points[static_cast<std::size_t>(j + m)] + edge.points[static_cast<std::size_t>(j)]));
            }
            if (collapse < 1e-2 * scale)
                return locate_period_doubling(fam, m, edge.t, std::vector<cplx>(pts.begin(), pts.begin() + m), opt);
            if (fam.odd && asym < 1e-2 * scale) {
                std::vector<cplx> half;
                for (int j = 0; j < m; ++j)
                    half.push_back(0.5 * (pts[static_cast<std::size_t>(j)] - pts[static_cast<std::size_t>(j + m)]));
                // A symmetric cycle can also fold; that case fails the pitchfork census.
                try {
                    auto e = locate_pitchfork(fam, edge.t, half, opt);
                    if (std::abs(e.t_star - edge.t) < 1e-6 * std::max(1.0, std::abs(edge.t))) return e;
                } catch (const CensusMismatch&) {
                }
            }
        }
        return locate_saddle_node(fam, q, edge.t, pts, opt);
    } catch (const Error& err) {
        return degenerate(err.what());
    }
}

/// Events at every non-boundary window edge, merged when they coincide.
inline std::vector<BifurcationEvent> events_from_windows(const AnalyticFamily& fam, const std::vector<AttractingWindow>& ws,
                                                         const EventOptions& opt = {}) {
    std::vector<BifurcationEvent> out;
    for (const auto& w : ws) {
        for (const WindowEdge* edge : {&w.lo, &w.hi}) {
            if (edge->kind == EdgeKind::RangeEnd) continue;
            BifurcationEvent e = dispatch_event(fam, w.q, *edge, opt);
            bool dup = false;
            for (const auto& o : out)
                dup = dup || (o.kind == e.kind && o.q == e.q && std::abs(o.t_star - e.t_star) < 1e-8);
            if (!dup) out.push_back(std::move(e));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.t_star < b.t_star; });
    return out;
}

struct ContinuationResult {
    CycleBranch branch;
    bool survived = false;

    json to_json() const {
        json j = branch.to_json();
        j["survived"] = survived;
        return j;
    }
};

/// Follows a cycle from its parameter to t_end; survival means the endpoint was reached.
inline ContinuationResult continue_right(const AnalyticFamily& fam, const Cycle& start, double t_end,
                                         const BranchOptions& opt = {}) {
    detail::require_real(fam);
    ContinuationResult r;
    r.branch = continue_branch(fam, start, t_end, opt);
    r.survived = r.branch.status == BranchStatus::ReachedEndpoint;
    return r;
}

struct DiagramOptions {
    std::optional<double> seed;
    int burn = 900;
    int keep = 100;
    int threads = 0;
};

struct Diagram {
    std::vector<double> t;
    /// Kept iterates per grid parameter; empty when the orbit escaped.
    std::vector<std::vector<double>> x;

    std::string to_csv() const {
        CsvWriter csv({"t", "x"});
        for (std::size_t k = 0; k < t.size(); ++k)
            for (double v : x[k]) csv.row({t[k], v});
        return csv.str();
    }

    /// Linear binning onto a width x height raster; darker pixels hold more points.
    std::string to_pgm(int width, int height, std::optional<std::pair<double, double>> x_range = std::nullopt) const {
        if (width < 1 || height < 1) throw DomainError("raster size must be positive");
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        if (x_range) {
            lo = x_range->first;
            hi = x_range->second;
        } else {
            for (const auto& col : x)
                for (double v : col) lo = std::min(lo, v), hi = std::max(hi, v);
        }
        if (!(hi > lo)) {
            lo -= 1;
            hi += 1;
        }
        std::vector<long> counts(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
        const double t0 = t.front(), t1 = t.back() > t.front() ? t.back() : t.front() + 1;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const int px = std::min(width - 1, static_cast<int>((t[k] - t0) / (t1 - t0) * width));
            for (double v : x[k]) {
                if (v < lo || v > hi) continue;
                const int py = std::min(height - 1, static_cast<int>((hi - v) / (hi - lo) * height));
                ++counts[static_cast<std::size_t>(py) * static_cast<std::size_t>(width) + static_cast<std::size_t>(px)];
            }
        }
        const long peak = std::max<long>(1, *std::max_element(counts.begin(), counts.end()));
        std::vector<std::uint8_t> px(counts.size());
        for (std::size_t k = 0; k < counts.size(); ++k)
            px[k] = static_cast<std::uint8_t>(255 - std::lround(255.0 * std::log1p(static_cast<double>(counts[k])) /
                                                                 std::log1p(static_cast<double>(peak))));
        return pgm_bytes(width, height, px);
    }
};

/// Last `keep` of burn + keep iterates of the seed for each grid parameter.
inline Diagram diagram(const AnalyticFamily& fam, double t_lo, double t_hi, int grid_n, const DiagramOptions& opt = {}) {
    detail::require_real(fam);
    if (opt.keep < 1 || opt.burn < 0) throw DomainError("keep must be positive and burn non-negative");
    Diagram d;
    d.t = linspace(t_lo, t_hi, grid_n);
    d.x.assign(d.t.size(), {});
    const double seed = opt.seed.value_or(fam.critical_point.real());
    parallel_for(d.t.size(), resolve_threads(opt.threads), [&](std::size_t k) {
        double x = seed;
        std::vector<double> col;
        try {
            for (int n = 1; n <= opt.burn + opt.keep; ++n) {
                const cplx y = fam.value(d.t[k], x);
                if (fam.escaped(y)) return;
                x = y.real();
                if (n > opt.burn) col.push_back(x);
            }
        } catch (const DomainError&) {
            return;
        }
        d.x[k] = std::move(col);
    });
    return d;
}

}  // namespace parabifurc
