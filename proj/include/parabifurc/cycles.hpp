#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parabifurc/errors.hpp"
#include "parabifurc/family.hpp"
#include "parabifurc/io.hpp"
#include "parabifurc/jet.hpp"

namespace parabifurc {

enum class CycleKind { AttractingHyperbolic, Superattracting, Parabolic, Repelling, NeutralIrrational };

inline const char* to_string(CycleKind k) {
    switch (k) {
        case CycleKind::AttractingHyperbolic: return "AttractingHyperbolic";
        case CycleKind::Superattracting: return "Superattracting";
        case CycleKind::Parabolic: return "Parabolic";
        case CycleKind::Repelling: return "Repelling";
        case CycleKind::NeutralIrrational: return "NeutralIrrational";
    }
    return "?";
}

struct Classification {
    CycleKind kind = CycleKind::Repelling;
    /// Rotation data kappa = exp(2 pi i l / p); meaningful for Parabolic only.
    int l = 0;
    int p = 0;

    json to_json() const {
        json j;
        j["kind"] = to_string(kind);
        if (kind == CycleKind::Parabolic) {
            j["l"] = l;
            j["p"] = p;
        }
        return j;
    }
};

inline constexpr double kClassTol = 1e-8;
inline constexpr int kMaxRotation = 64;

inline Classification classify(cplx kappa, double tol = kClassTol, int p_max = kMaxRotation) {
    const double m = std::abs(kappa);
    if (m < tol) return {CycleKind::Superattracting};
    if (m < 1.0 - tol) return {CycleKind::AttractingHyperbolic};
    if (m > 1.0 + tol) return {CycleKind::Repelling};
    cplx power = 1.0;
    for (int p = 1; p <= p_max; ++p) {
        power *= kappa;
        if (std::abs(power - 1.0) <= p * tol) {
            const double turns = std::arg(kappa) / (2.0 * std::numbers::pi);
            int l = static_cast<int>(std::lround(p * turns)) % p;
            if (l < 0) l += p;
            const int g = std::gcd(l, p);
            return {CycleKind::Parabolic, l / g, p / g};
        }
    }
    return {CycleKind::NeutralIrrational};
}

/// Periodic orbit a_0, ..., a_{q-1} of G_w.
struct Cycle {
    cplx w{};
    int q = 0;
    std::vector<cplx> points;
    cplx kappa{};
    Classification classification;
    double residual = 0.0;
    /// Smallest d dividing q with a_{j+d} = a_j for all j (to 1e-8).
    int minimal_period = 0;

    double scale() const {
        double s = 1.0;
        for (auto z : points) s = std::max(s, std::abs(z));
        return s;
    }

    json to_json() const {
        json j;
        j["w"] = cjson(w);
        j["q"] = q;
        j["points"] = cjson(points);
        j["kappa"] = cjson(kappa);
        j["classification"] = classification.to_json();
        j["residual"] = residual;
        j["minimal_period"] = minimal_period;
        return j;
    }
};

/// Applies G_w n times to a jet X in (u, v); parameter offsets enter through v.
inline Jet2 propagate(const AnalyticFamily& fam, cplx w, Jet2 X, int n) {
    for (int k = 0; k < n; ++k) {
        if (fam.escaped(X.value())) throw EscapeError(fam.id + ": jet iterate left U", {});
        X = compose(fam.jet(w, X.value(), X.kz() + X.kw(), X.kw()), X);
    }
    return X;
}

namespace detail {

inline int minimal_period(const std::vector<cplx>& pts) {
    const int q = static_cast<int>(pts.size());
    for (int d = 1; d < q; ++d) {
        if (q % d != 0) continue;
        bool rep = true;
        for (int j = 0; j < q && rep; ++j)
            rep = std::abs(pts[static_cast<std::size_t>((j + d) % q)] - pts[static_cast<std::size_t>(j)]) < 1e-8;
        if (rep) return d;
    }
    return q;
}

inline double residual_tol(const std::vector<cplx>& pts, double rel = 1e-12) {
    double s = 1.0;
    for (auto z : pts) s = std::max(s, std::abs(z));
    return rel * s;
}

}  // namespace detail

/// Builds the Cycle record for given points without refinement.
inline Cycle make_cycle(const AnalyticFamily& fam, cplx w, std::vector<cplx> points, double class_tol = kClassTol) {
    Cycle c;
    c.w = w;
    c.q = static_cast<int>(points.size());
    if (c.q < 1) throw DomainError("cycle needs at least one point");
    c.kappa = 1.0;
    for (int j = 0; j < c.q; ++j) {
        auto [g, dg] = fam.value_dz(w, points[static_cast<std::size_t>(j)]);
        c.residual = std::max(c.residual, std::abs(g - points[static_cast<std::size_t>((j + 1) % c.q)]));
        c.kappa *= dg;
    }
    c.points = std::move(points);
    c.classification = classify(c.kappa, class_tol);
    c.minimal_period = detail::minimal_period(c.points);
    return c;
}

struct NewtonOptions {
    int max_iter = 50;
    /// Steps are refused when the Jacobian's reciprocal condition number is below this.
    double rcond_min = 1e-14;
    double class_tol = kClassTol;
    /// Residual stop, relative to max(1, |x_j|).
    double tol = 1e-12;
};

/// Newton on the full-cycle system G_w(x_j) = x_{j+1 mod q}.
inline Cycle find_cycle(const AnalyticFamily& fam, cplx w, int q, std::vector<cplx> x,
                        const NewtonOptions& opt = {}) {
    if (q < 1 || static_cast<int>(x.size()) != q) throw DomainError("seed length must equal the period");
    for (auto z : x) fam.check_domain(w, z);
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(q, q);
    Eigen::VectorXcd F(q);
    for (int it = 0; it <= opt.max_iter; ++it) {
        double res = 0.0;
        for (int j = 0; j < q; ++j) {
            auto [g, dg] = fam.value_dz(w, x[static_cast<std::size_t>(j)]);
            const int jn = (j + 1) % q;
            F(j) = g - x[static_cast<std::size_t>(jn)];
            res = std::max(res, std::abs(F(j)));
            J(j, j) = dg;
            if (jn != j) J(j, jn) = -1.0;
            else J(j, j) -= 1.0;
        }
        if (!std::isfinite(res)) throw NoConvergence("cycle Newton diverged");
        if (res < detail::residual_tol(x, opt.tol)) {
            // One more step to machine precision when the Jacobian allows it.
            Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
            if (res > 0 && lu.rcond() >= opt.rcond_min) {
                const Eigen::VectorXcd dx = lu.solve(F);
                std::vector<cplx> y = x;
                for (int j = 0; j < q; ++j) y[static_cast<std::size_t>(j)] -= dx(j);
                double res2 = 0.0;
                for (int j = 0; j < q; ++j)
                    res2 = std::max(res2, std::abs(fam.value(w, y[static_cast<std::size_t>(j)]) -
                                                   y[static_cast<std::size_t>((j + 1) % q)]));
                if (res2 <= res) x = std::move(y);
            }
            return make_cycle(fam, w, std::move(x), opt.class_tol);
        }
        if (it == opt.max_iter) break;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
        if (!(lu.rcond() >= opt.rcond_min))
            throw SingularJacobian("cycle Jacobian singular (rcond " + format_double(lu.rcond()) + ")");
        const Eigen::VectorXcd dx = lu.solve(F);
        for (int j = 0; j < q; ++j) {
            x[static_cast<std::size_t>(j)] -= dx(j);
            if (fam.escaped(x[static_cast<std::size_t>(j)])) throw NoConvergence("cycle Newton left U");
        }
    }
    throw NoConvergence("cycle Newton did not converge in " + std::to_string(opt.max_iter) + " iterations");
}

namespace detail {

/// Newton on {cycle equations, multiplier = target} in (x, w). When `half` is set,
/// the last equation closes with a sign flip, G(x_{m-1}) = -x_0, and the multiplier
/// is the product over the m points only (odd families).
inline std::pair<cplx, std::vector<cplx>> augmented_newton(const AnalyticFamily& fam, cplx w, std::vector<cplx> x,
                                                           cplx target, bool half, const NewtonOptions& opt) {
    const int m = static_cast<int>(x.size());
    const int n = m + 1;
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXcd F(n);
    std::vector<Jet2> jets(static_cast<std::size_t>(m));
    for (int it = 0; it <= opt.max_iter; ++it) {
        J.setZero();
        double res = 0.0;
        for (int j = 0; j < m; ++j) jets[static_cast<std::size_t>(j)] = fam.jet(w, x[static_cast<std::size_t>(j)], 2, 1);
        cplx prod = 1.0;
        for (int j = 0; j < m; ++j) {
            const Jet2& jt = jets[static_cast<std::size_t>(j)];
            const int jn = (j + 1) % m;
            const double sign = (half && j == m - 1) ? -1.0 : 1.0;
            F(j) = jt(0, 0) - sign * x[static_cast<std::size_t>(jn)];
            J(j, j) += jt(1, 0);
            J(j, jn) -= sign;
            J(j, m) = jt(0, 1);
            prod *= jt(1, 0);
            res = std::max(res, std::abs(F(j)));
        }
        F(m) = prod - target;
        const double kres = std::abs(F(m));
        for (int j = 0; j < m; ++j) {
            cplx others = 1.0, others_w = 0.0;
            for (int i = 0; i < m; ++i)
                if (i != j) others *= jets[static_cast<std::size_t>(i)](1, 0);
            J(m, j) = 2.0 * jets[static_cast<std::size_t>(j)](2, 0) * others;
            others_w = jets[static_cast<std::size_t>(j)](1, 1) * others;
            J(m, m) += others_w;
        }
        if (!std::isfinite(res) || !std::isfinite(kres)) throw NoConvergence("augmented Newton diverged");
        if (res < residual_tol(x, opt.tol) && kres < 1e-13) return {w, x};
        if (it == opt.max_iter) break;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
        if (!(lu.rcond() >= 1e-12))
            throw DegenerateJacobian("augmented parabolic system singular (rcond " + format_double(lu.rcond()) +
                                     "); transversality may fail here");
        const Eigen::VectorXcd d = lu.solve(F);
        for (int j = 0; j < m; ++j) x[static_cast<std::size_t>(j)] -= d(j);
        w -= d(m);
        if (!std::isfinite(std::abs(w))) throw NoConvergence("augmented Newton diverged");
    }
    throw NoConvergence("augmented parabolic Newton did not converge");
}

}  // namespace detail

/// Solves for a parameter w* at which a q-cycle has multiplier target_kappa.
inline std::pair<cplx, Cycle> find_parabolic_pair(const AnalyticFamily& fam, int q, cplx seed_w,
                                                  std::vector<cplx> seed_pts, cplx target_kappa,
                                                  const NewtonOptions& opt = {}) {
    if (static_cast<int>(seed_pts.size()) != q) throw DomainError("seed length must equal the period");
    if (std::abs(std::abs(target_kappa) - 1.0) > 1e-12) throw DomainError("target multiplier must lie on the unit circle");
    auto [w, x] = detail::augmented_newton(fam, seed_w, std::move(seed_pts), target_kappa, false, opt);
    return {w, make_cycle(fam, w, std::move(x), opt.class_tol)};
}

/// Expands a half orbit x_0..x_{m-1} of an odd family into x, -x.
inline std::vector<cplx> symmetric_points(const std::vector<cplx>& half) {
    std::vector<cplx> pts = half;
    for (auto z : half) pts.push_back(-z);
    return pts;
}

/// Symmetric 2m-cycle of an odd family through the half system
/// G(x_j) = x_{j+1}, G(x_{m-1}) = -x_0; nonsingular at symmetric pitchforks.
inline Cycle find_symmetric_cycle(const AnalyticFamily& fam, cplx w, std::vector<cplx> half,
                                  const NewtonOptions& opt = {}) {
    if (!fam.odd) throw NotOdd(fam.id + " is not declared odd");
    const int m = static_cast<int>(half.size());
    if (m < 1) throw DomainError("empty half orbit");
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(m, m);
    Eigen::VectorXcd F(m);
    for (int it = 0; it <= opt.max_iter; ++it) {
        J.setZero();
        double res = 0.0;
        for (int j = 0; j < m; ++j) {
            auto [g, dg] = fam.value_dz(w, half[static_cast<std::size_t>(j)]);
            const int jn = (j + 1) % m;
            const double sign = j == m - 1 ? -1.0 : 1.0;
            F(j) = g - sign * half[static_cast<std::size_t>(jn)];
            J(j, j) += dg;
            J(j, jn) -= sign;
            res = std::max(res, std::abs(F(j)));
        }
        if (!std::isfinite(res)) throw NoConvergence("symmetric cycle Newton diverged");
        if (res < detail::residual_tol(half, opt.tol)) return make_cycle(fam, w, symmetric_points(half), opt.class_tol);
        if (it == opt.max_iter) break;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(J);
        if (!(lu.rcond() >= opt.rcond_min)) throw SingularJacobian("symmetric cycle Jacobian singular");
        const Eigen::VectorXcd d = lu.solve(F);
        for (int j = 0; j < m; ++j) half[static_cast<std::size_t>(j)] -= d(j);
    }
    throw NoConvergence("symmetric cycle Newton did not converge");
}

/// Parameter where the symmetric 2m-cycle of an odd family has half-product
/// prod_{j<m} G'(x_j) = half_target (+1 at a pitchfork, where the full multiplier is 1).
inline std::pair<cplx, Cycle> find_symmetric_parabolic(const AnalyticFamily& fam, cplx seed_w, std::vector<cplx> half,
                                                       cplx half_target = 1.0, const NewtonOptions& opt = {}) {
    if (!fam.odd) throw NotOdd(fam.id + " is not declared odd");
    auto [w, x] = detail::augmented_newton(fam, seed_w, std::move(half), half_target, true, opt);
    return {w, make_cycle(fam, w, symmetric_points(x), opt.class_tol)};
}

/// Taylor expansion of z -> G_w^q(z) at a_0 to order k_z (at most 8).
inline Jet2 return_map_jet(const AnalyticFamily& fam, const Cycle& cyc, int kz) {
    if (kz < 0 || kz > kMaxJetZ) throw OrderError("return map jet order exceeds 8");
    return propagate(fam, cyc.w, Jet2::identity_z(cyc.points.at(0), kz, 0), cyc.q);
}

struct ConvergenceReport {
    bool converged = false;
    long steps = 0;
    /// Index j of the cycle point approached by c_{n} at the stopping time.
    int attracted_index = -1;
    double final_distance = 0.0;
    /// Geometric ratio of successive q-step distances over the tail.
    double ratio = 0.0;
    /// Least-squares slope of log distance against log n over the tail.
    double decay_exponent = 0.0;

    json to_json() const {
        json j;
        j["converged"] = converged;
        j["steps"] = steps;
        j["attracted_index"] = attracted_index;
        j["final_distance"] = final_distance;
        j["ratio"] = ratio;
        j["decay_exponent"] = decay_exponent;
        return j;
    }
};

namespace detail {

inline double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    if (xs.size() < 2) return 0.0;
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

inline std::pair<double, int> nearest(const std::vector<cplx>& pts, cplx z) {
    double best = std::numeric_limits<double>::infinity();
    int idx = -1;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double d = std::abs(z - pts[k]);
        if (d < best) {
            best = d;
            idx = static_cast<int>(k);
        }
    }
    return {best, idx};
}

}  // namespace detail

/// Follows the marked orbit c_1, c_2, ... of G_w until it comes within 1e-6 of the cycle.
inline ConvergenceReport basin_check(const AnalyticFamily& fam, cplx w, const Cycle& cyc, long n_max = 1000000,
                                     double eps = 1e-6) {
    ConvergenceReport rep;
    cplx z = fam.marked_value(w);
    std::vector<double> dist_q;  // distance sampled every q steps
    std::vector<double> logn, logd;
    long next_sample = 1;
    for (long n = 1; n <= n_max; ++n) {
        if (fam.escaped(z)) throw NotAttracted(fam.id + ": marked orbit escaped after " + std::to_string(n) + " steps");
        auto [d, idx] = detail::nearest(cyc.points, z);
        if (n % cyc.q == 1 % cyc.q) dist_q.push_back(d);
        if (n >= next_sample && d > 0) {
            logn.push_back(std::log(static_cast<double>(n)));
            logd.push_back(std::log(d));
            next_sample = std::max(n + 1, static_cast<long>(static_cast<double>(n) * 1.05));
        }
        if (d < eps) {
            rep.converged = true;
            rep.steps = n;
            rep.attracted_index = idx;
            rep.final_distance = d;
            break;
        }
        z = fam.value(w, z);
    }
    if (!rep.converged) throw NotAttracted(fam.id + ": marked orbit not attracted within budget");
    const std::size_t m = dist_q.size();
    if (m >= 3) {
        const std::size_t k0 = m > 12 ? m - 11 : 1;
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t k = k0; k < m; ++k)
            if (dist_q[k - 1] > 0 && dist_q[k] > 0) {
                acc += std::log(dist_q[k] / dist_q[k - 1]);
                ++cnt;
            }
        rep.ratio = cnt ? std::exp(acc / cnt) : 0.0;
    }
    if (logn.size() >= 4) {
        // Tail: the last decade of sampled n.
        const double cut = logn.back() - std::log(10.0);
        std::vector<double> xs, ys;
        for (std::size_t k = 0; k < logn.size(); ++k)
            if (logn[k] >= cut) {
                xs.push_back(logn[k]);
                ys.push_back(logd[k]);
            }
        rep.decay_exponent = detail::fit_slope(xs, ys);
    }
    return rep;
}

enum class BranchStatus { ReachedEndpoint, NewtonFailure, LeftDomain, TurningPoint };

inline const char* to_string(BranchStatus s) {
    switch (s) {
        case BranchStatus::ReachedEndpoint: return "ReachedEndpoint";
        case BranchStatus::NewtonFailure: return "NewtonFailure";
        case BranchStatus::LeftDomain: return "LeftDomain";
        case BranchStatus::TurningPoint: return "TurningPoint";
    }
    return "?";
}

struct BranchSample {
    double t = 0.0;
    Cycle cycle;
};

/// Local fold of the real solution curve, where t stops increasing along arclength.
struct Fold {
    double t = 0.0;
    std::vector<cplx> points;
    cplx kappa{};
};

struct CycleBranch {
    int q = 0;
    std::vector<BranchSample> samples;
    BranchStatus status = BranchStatus::NewtonFailure;
    std::vector<Fold> folds;
    std::string message;

    json to_json() const {
        json j;
        j["q"] = q;
        j["status"] = to_string(status);
        if (!message.empty()) j["message"] = message;
        json f = json::array();
        for (const auto& fo : folds) {
            json e;
            e["t"] = fo.t;
            e["points"] = cjson(fo.points);
            e["kappa"] = cjson(fo.kappa);
            f.push_back(e);
        }
        j["folds"] = f;
        json s = json::array();
        for (const auto& smp : samples) {
            json e;
            e["t"] = smp.t;
            e["points"] = cjson(smp.cycle.points);
            e["kappa"] = cjson(smp.cycle.kappa);
            s.push_back(e);
        }
        j["samples"] = s;
        return j;
    }

    std::string to_csv() const {
        std::vector<std::string> header{"t"};
        for (int j = 0; j < q; ++j) {
            header.push_back("a" + std::to_string(j) + "_re");
            header.push_back("a" + std::to_string(j) + "_im");
        }
        header.push_back("kappa_re");
        header.push_back("kappa_im");
        CsvWriter csv(header);
        for (const auto& smp : samples) {
            std::vector<double> row{smp.t};
            for (auto z : smp.cycle.points) {
                row.push_back(z.real());
                row.push_back(z.imag());
            }
            row.push_back(smp.cycle.kappa.real());
            row.push_back(smp.cycle.kappa.imag());
            csv.row(row);
        }
        return csv.str();
    }
};

struct BranchOptions {
    double h_init = 1e-2;
    double h_max = 0.05;
    double h_min = 1e-10;
    /// Arclength parametrization is used while |1 - kappa| is below this.
    double arclength_switch = 0.05;
    int max_steps = 200000;
    /// Corrector steps may move the points by at most this many step lengths.
    double jump_factor = 10.0;
};

namespace detail {

/// Real formulation of the cycle system in y = (Re x_0, Im x_0, ..., t).
struct RealCycleSystem {
    const AnalyticFamily& fam;
    int q;

    std::vector<cplx> points(const Eigen::VectorXd& y) const {
        std::vector<cplx> x(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j) x[static_cast<std::size_t>(j)] = {y(2 * j), y(2 * j + 1)};
        return x;
    }

    /// Residual F (2q) and Jacobian (2q x (2q+1)).
    void eval(const Eigen::VectorXd& y, Eigen::VectorXd& F, Eigen::MatrixXd& J) const {
        const cplx w = y(2 * q);
        F.setZero(2 * q);
        J.setZero(2 * q, 2 * q + 1);
        for (int j = 0; j < q; ++j) {
            const cplx xj{y(2 * j), y(2 * j + 1)};
            const Jet2 jt = fam.jet(w, xj, 1, 1);
            const int jn = (j + 1) % q;
            const cplx r = jt(0, 0) - cplx{y(2 * jn), y(2 * jn + 1)};
            F(2 * j) = r.real();
            F(2 * j + 1) = r.imag();
            const cplx d = jt(1, 0);
            J(2 * j, 2 * j) += d.real();
            J(2 * j, 2 * j + 1) += -d.imag();
            J(2 * j + 1, 2 * j) += d.imag();
            J(2 * j + 1, 2 * j + 1) += d.real();
            J(2 * j, 2 * jn) -= 1.0;
            J(2 * j + 1, 2 * jn + 1) -= 1.0;
            J(2 * j, 2 * q) = jt(0, 1).real();
            J(2 * j + 1, 2 * q) = jt(0, 1).imag();
        }
    }

    /// Unit tangent of the solution curve, oriented by `prev`.
    Eigen::VectorXd tangent(const Eigen::MatrixXd& J, const Eigen::VectorXd& prev) const {
        Eigen::MatrixXd A(2 * q + 1, 2 * q + 1);
        A.topRows(2 * q) = J;
        A.row(2 * q) = prev.transpose();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(2 * q + 1);
        rhs(2 * q) = 1.0;
        Eigen::VectorXd t = A.fullPivLu().solve(rhs);
        t.normalize();
        if (t.dot(prev) < 0) t = -t;
        return t;
    }
};

}  // namespace detail

/// Predictor-corrector continuation of a q-cycle in the real parameter t = Re w,
/// from start.w toward t_target. Natural-parameter steps are used away from
/// kappa = 1 and pseudo-arclength in (Re x, Im x, t) near it; a fold of the
/// real curve stops the branch with status TurningPoint.
inline CycleBranch continue_branch(const AnalyticFamily& fam, const Cycle& start, double t_target,
                                   const BranchOptions& opt = {}) {
    CycleBranch br;
    br.q = start.q;
    const int q = start.q;
    const int n = 2 * q + 1;
    detail::RealCycleSystem sys{fam, q};
    const double dir = t_target >= start.w.real() ? 1.0 : -1.0;

    Eigen::VectorXd y(n);
    for (int j = 0; j < q; ++j) {
        y(2 * j) = start.points[static_cast<std::size_t>(j)].real();
        y(2 * j + 1) = start.points[static_cast<std::size_t>(j)].imag();
    }
    y(2 * q) = start.w.real();
    br.samples.push_back({y(2 * q), make_cycle(fam, y(2 * q), sys.points(y))});

    Eigen::VectorXd F;
    Eigen::MatrixXd J;
    Eigen::VectorXd tan_prev = Eigen::VectorXd::Zero(n);
    tan_prev(2 * q) = dir;
    double h = opt.h_init;

    auto corrector = [&](Eigen::VectorXd& z, const Eigen::VectorXd* plane_normal, const Eigen::VectorXd& anchor) {
        for (int it = 0; it < 30; ++it) {
            sys.eval(z, F, J);
            const double scale = 1e-12 * std::max(1.0, z.head(2 * q).cwiseAbs().maxCoeff());
            if (!F.allFinite()) return false;
            if (F.cwiseAbs().maxCoeff() < scale && it > 0) return true;
            Eigen::VectorXd step;
            if (plane_normal) {
                Eigen::MatrixXd A(n, n);
                A.topRows(2 * q) = J;
                A.row(2 * q) = plane_normal->transpose();
                Eigen::VectorXd rhs(n);
                rhs.head(2 * q) = F;
                rhs(2 * q) = plane_normal->dot(z - anchor);
                Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
                if (!lu.isInvertible()) return false;
                step = lu.solve(rhs);
            } else {
                Eigen::MatrixXd Jx = J.leftCols(2 * q);
                Eigen::PartialPivLU<Eigen::MatrixXd> lu(Jx);
                if (!(lu.rcond() >= 1e-14)) return false;
                step = Eigen::VectorXd::Zero(n);
                step.head(2 * q) = lu.solve(F);
            }
            z -= step;
            if (!z.allFinite()) return false;
            if (F.cwiseAbs().maxCoeff() < scale) return true;
        }
        return false;
    };

    for (int stepno = 0; stepno < opt.max_steps; ++stepno) {
        const double t = y(2 * q);
        if ((t_target - t) * dir <= 0) {
            br.status = BranchStatus::ReachedEndpoint;
            return br;
        }
        try {
            sys.eval(y, F, J);
        } catch (const Error& e) {
            br.status = BranchStatus::LeftDomain;
            br.message = e.what();
            return br;
        }
        const Eigen::VectorXd tan = sys.tangent(J, tan_prev);
        const cplx kappa = br.samples.back().cycle.kappa;
        const bool arclength = std::abs(1.0 - kappa) < opt.arclength_switch;

        if (arclength && tan(2 * q) * dir <= 0 && stepno > 0) {
            Fold f{t, sys.points(y), kappa};
            br.folds.push_back(f);
            br.status = BranchStatus::TurningPoint;
            br.message = "real solution curve folds back at t = " + format_double(t);
            return br;
        }

        bool accepted = false;
        Eigen::VectorXd ynew;
        while (!accepted) {
            if (h < opt.h_min) {
                br.status = BranchStatus::NewtonFailure;
                br.message = "step size fell below the floor at t = " + format_double(t);
                return br;
            }
            try {
                if (arclength) {
                    ynew = y + h * tan;
                    const Eigen::VectorXd anchor = ynew;
                    accepted = corrector(ynew, &tan, anchor);
                    if (accepted && (ynew(2 * q) - t_target) * dir > 0) {
                        // Land exactly on the endpoint.
                        ynew = y + tan * ((t_target - t) / tan(2 * q));
                        ynew(2 * q) = t_target;
                        accepted = corrector(ynew, nullptr, ynew);
                    }
                } else {
                    double dt = dir * h;
                    if ((t + dt - t_target) * dir > 0) dt = t_target - t;
                    const double tz = std::abs(tan(2 * q)) > 1e-14 ? tan(2 * q) : dir;
                    ynew = y + tan * (dt / tz);
                    ynew(2 * q) = t + dt;
                    accepted = corrector(ynew, nullptr, ynew);
                }
                if (accepted) {
                    const double move = (ynew - y).head(2 * q).cwiseAbs().maxCoeff();
                    const double allowed = opt.jump_factor * std::max(h, std::abs(ynew(2 * q) - t)) *
                                           std::max(1.0, tan.head(2 * q).cwiseAbs().maxCoeff() /
                                                             std::max(std::abs(tan(2 * q)), 1e-3));
                    if (move > allowed) accepted = false;
                }
            } catch (const EscapeError& e) {
                br.status = BranchStatus::LeftDomain;
                br.message = e.what();
                return br;
            } catch (const DomainError& e) {
                br.status = BranchStatus::LeftDomain;
                br.message = e.what();
                return br;
            }
            if (!accepted) h *= 0.5;
        }
        y = ynew;
        tan_prev = tan;
        br.samples.push_back({y(2 * q), make_cycle(fam, y(2 * q), sys.points(y))});
        h = std::min(opt.h_max, h * 1.5);
    }
    br.status = BranchStatus::NewtonFailure;
    br.message = "step budget exhausted";
    return br;
}

}  // namespace parabifurc
