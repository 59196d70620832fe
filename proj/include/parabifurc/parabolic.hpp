#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "parabifurc/cycles.hpp"
#include "parabifurc/errors.hpp"
#include "parabifurc/family.hpp"
#include "parabifurc/io.hpp"
#include "parabifurc/parallel.hpp"

namespace parabifurc {

/// Leau-Fatou data at a parabolic cycle. Directions are fractions of a turn in [0, 1).
struct PetalGeometry {
    Cycle cycle;
    int p = 1;
    int l = 0;
    /// A_j = D^{p+1} g^{pq}(a_j) / (p+1)!.
    std::vector<cplx> A;
    double alpha = 0.5;
    std::vector<std::vector<double>> theta_att;
    std::vector<std::vector<double>> theta_rep;
    double r = 0.05;

    json to_json() const {
        json j;
        j["cycle"] = cycle.to_json();
        j["p"] = p;
        j["l"] = l;
        j["A"] = cjson(A);
        j["alpha"] = alpha;
        j["theta_att"] = theta_att;
        j["theta_rep"] = theta_rep;
        j["r"] = r;
        return j;
    }
};

namespace detail {

inline double wrap_turn(double t) {
    t = std::fmod(t, 1.0);
    if (t < 0) t += 1.0;
    if (t >= 1.0) t -= 1.0;
    return t;
}

/// Distance between two turn fractions on the circle.
inline double turn_distance(double a, double b) {
    const double d = wrap_turn(a - b);
    return std::min(d, 1.0 - d);
}

inline std::vector<double> directions(cplx A, int p, double offset) {
    const double argA = std::arg(A) / (2 * std::numbers::pi);
    std::vector<double> th;
    for (int k = 0; k < p; ++k) th.push_back(wrap_turn((offset - argA + k) / p));
    std::sort(th.begin(), th.end());
    return th;
}

}  // namespace detail

/// Leading coefficients and attracting/repelling directions at each cycle point.
/// Attracting directions solve A e^{2 pi i p theta} < 0, repelling ones > 0.
inline PetalGeometry petal_geometry(const AnalyticFamily& fam, const Cycle& cyc, double alpha = 0.5, double r = 0.05) {
    if (cyc.classification.kind != CycleKind::Parabolic) throw NotParabolic("cycle is not parabolic");
    if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must lie in (0,1)");
    PetalGeometry g;
    g.cycle = cyc;
    g.p = cyc.classification.p;
    g.l = cyc.classification.l;
    g.alpha = alpha;
    g.r = r;
    if (g.p + 1 > kMaxJetZ) throw OrderError("rotation number denominator too large for the jet cap");
    for (int j = 0; j < cyc.q; ++j) {
        const Jet2 J = propagate(fam, cyc.w, Jet2::identity_z(cyc.points[static_cast<std::size_t>(j)], g.p + 1, 0),
                                 g.p * cyc.q);
        const cplx A = J(g.p + 1, 0);
        double scale = 1.0;
        for (int k = 1; k <= g.p + 1; ++k) scale = std::max(scale, std::abs(J(k, 0)));
        if (std::abs(A) < 1e-10 * scale)
            throw DegenerateParabolic("D^{p+1} g^{pq} vanishes at cycle point " + std::to_string(j) +
                                      " (|A| = " + format_double(std::abs(A)) + ")");
        g.A.push_back(A);
        g.theta_att.push_back(detail::directions(A, g.p, 0.5));
        g.theta_rep.push_back(detail::directions(A, g.p, 0.0));
    }
    return g;
}

enum class SectorKind { RepellingCusp, AttractingCusp, Neither };

inline const char* to_string(SectorKind k) {
    switch (k) {
        case SectorKind::RepellingCusp: return "RepellingCusp";
        case SectorKind::AttractingCusp: return "AttractingCusp";
        case SectorKind::Neither: return "Neither";
    }
    return "?";
}

/// Cusp test z - a_j = s e^{2 pi i t}, 0 < s < radius, |t - theta| < s^alpha.
inline SectorKind sector_membership(const PetalGeometry& g, int j, cplx z, double radius) {
    const cplx d = z - g.cycle.points.at(static_cast<std::size_t>(j));
    const double s = std::abs(d);
    if (!(s > 0 && s < radius)) return SectorKind::Neither;
    const double t = detail::wrap_turn(std::arg(d) / (2 * std::numbers::pi));
    const double width = std::pow(s, g.alpha);
    for (double th : g.theta_rep[static_cast<std::size_t>(j)])
        if (detail::turn_distance(t, th) < width) return SectorKind::RepellingCusp;
    for (double th : g.theta_att[static_cast<std::size_t>(j)])
        if (detail::turn_distance(t, th) < width) return SectorKind::AttractingCusp;
    return SectorKind::Neither;
}

inline SectorKind sector_membership(const PetalGeometry& g, int j, cplx z) {
    return sector_membership(g, j, z, g.r);
}

enum class OmegaStatus { Inside, Outside, Undecided };

inline const char* to_string(OmegaStatus s) {
    switch (s) {
        case OmegaStatus::Inside: return "Inside";
        case OmegaStatus::Outside: return "Outside";
        case OmegaStatus::Undecided: return "Undecided";
    }
    return "?";
}

/// Three-valued test of z in Omega_r: the forward orbit stays within r of the
/// cycle and converges to it.
inline OmegaStatus omega_membership(const AnalyticFamily& fam, const Cycle& cyc, double r, cplx z, long budget = 10000,
                                    double conv_eps = 1e-9) {
    if (!(r > 0)) throw DomainError("r must be positive");
    const long tail_start = budget - budget / 10;
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (long n = 0; n <= budget; ++n) {
        d = detail::nearest(cyc.points, z).first;
        if (!(d <= r)) return OmegaStatus::Outside;
        if (d < conv_eps) return OmegaStatus::Inside;
        if (n >= tail_start && n % cyc.q == 0) {
            if (d >= prev) monotone = false;
            prev = d;
        }
        if (n < budget) {
            z = fam.value(cyc.w, z);
            if (fam.escaped(z)) return OmegaStatus::Outside;
        }
    }
    if (monotone && d < r / 10) return OmegaStatus::Inside;
    return OmegaStatus::Undecided;
}

struct FlowerViolation {
    int j = 0;
    cplx z{};
    std::string kind;
};

struct FlowerReport {
    double r = 0.0;
    double tau = 0.0;
    int grid_n = 0;
    long inside = 0, outside = 0, undecided = 0;
    std::vector<FlowerViolation> violations;
    long max_entry_time = 0;
    /// Inside points whose orbit never entered an attracting cusp within the budget.
    long no_entry = 0;
    /// Row-major classification raster per cycle point: 0 Outside, 128 Undecided, 255 Inside;
    /// points outside the disk are left at 64.
    std::vector<std::vector<std::uint8_t>> rasters;

    json to_json() const {
        json j;
        j["r"] = r;
        j["tau"] = tau;
        j["grid_n"] = grid_n;
        j["inside"] = inside;
        j["outside"] = outside;
        j["undecided"] = undecided;
        j["max_entry_time"] = max_entry_time;
        j["no_entry"] = no_entry;
        json v = json::array();
        for (const auto& e : violations) {
            json x;
            x["j"] = e.j;
            x["z"] = cjson(e.z);
            x["kind"] = e.kind;
            v.push_back(x);
        }
        j["violations"] = v;
        return j;
    }
};

/// Samples B(a_j, tau) on a grid: every Outside point must lie in the repelling
/// cusp C_j(tau), and every Inside point must eventually enter an attracting cusp
/// (within entry_budget steps; orbits starting close to a_j need many).
inline FlowerReport flower_escape_check(const AnalyticFamily& fam, const Cycle& cyc, const PetalGeometry& geom,
                                        double r, int grid_n, long budget = 10000, int threads = 0,
                                        long entry_budget = 1000000) {
    if (grid_n < 2) throw DomainError("grid_n must be at least 2");
    FlowerReport rep;
    rep.r = r;
    rep.tau = geom.r;
    rep.grid_n = grid_n;
    const double tau = geom.r;
    const std::size_t cells = static_cast<std::size_t>(grid_n) * static_cast<std::size_t>(grid_n);
    for (int j = 0; j < cyc.q; ++j) {
        const cplx a = cyc.points[static_cast<std::size_t>(j)];
        std::vector<std::uint8_t> raster(cells, 64);
        std::vector<int> status(cells, -1);  // -1 not sampled, else OmegaStatus
        std::vector<long> entry(cells, -1);
        std::vector<char> bad(cells, 0);
        parallel_for(static_cast<std::size_t>(grid_n), resolve_threads(threads), [&](std::size_t row) {
            for (int col = 0; col < grid_n; ++col) {
                const std::size_t idx = row * static_cast<std::size_t>(grid_n) + static_cast<std::size_t>(col);
                const double x = -tau + 2 * tau * col / (grid_n - 1);
                const double y = tau - 2 * tau * static_cast<double>(row) / (grid_n - 1);
                const cplx z = a + cplx(x, y);
                if (!(std::abs(z - a) < tau)) continue;
                const OmegaStatus st = omega_membership(fam, cyc, r, z, budget);
                status[idx] = static_cast<int>(st);
                if (st == OmegaStatus::Outside) {
                    raster[idx] = 0;
                    if (z != a && sector_membership(geom, j, z, tau) != SectorKind::RepellingCusp) bad[idx] = 1;
                } else if (st == OmegaStatus::Inside) {
                    raster[idx] = 255;
                    cplx x_n = z;
                    for (long n = 0; n <= entry_budget; ++n) {
                        bool in = false;
                        for (int i = 0; i < cyc.q && !in; ++i)
                            in = sector_membership(geom, i, x_n, tau) == SectorKind::AttractingCusp ||
                                 x_n == cyc.points[static_cast<std::size_t>(i)];
                        if (in) {
                            entry[idx] = n;
                            break;
                        }
                        x_n = fam.value(cyc.w, x_n);
                    }
                } else {
                    raster[idx] = 128;
                }
            }
        });
        for (std::size_t idx = 0; idx < cells; ++idx) {
            if (status[idx] < 0) continue;
            const auto st = static_cast<OmegaStatus>(status[idx]);
            if (st == OmegaStatus::Inside) {
                ++rep.inside;
                if (entry[idx] < 0)
                    ++rep.no_entry;
                else
                    rep.max_entry_time = std::max(rep.max_entry_time, entry[idx]);
            } else if (st == OmegaStatus::Outside) {
                ++rep.outside;
            } else {
                ++rep.undecided;
            }
            if (bad[idx]) {
                const int row = static_cast<int>(idx / static_cast<std::size_t>(grid_n));
                const int col = static_cast<int>(idx % static_cast<std::size_t>(grid_n));
                const cplx z = a + cplx(-tau + 2 * tau * col / (grid_n - 1), tau - 2 * tau * row / (grid_n - 1));
                rep.violations.push_back({j, z, "outside point not in repelling cusp"});
            }
        }
        rep.rasters.push_back(std::move(raster));
    }
    return rep;
}

}  // namespace parabifurc
