#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parabifurc/cycles.hpp"
#include "parabifurc/errors.hpp"
#include "parabifurc/family.hpp"
#include "parabifurc/io.hpp"
#include "parabifurc/jet.hpp"

namespace parabifurc {

/// L(z) = d_w G_w(z) at the cycle's parameter.
inline cplx L_field(const AnalyticFamily& fam, cplx w, cplx z) { return fam.dw(w, z); }

namespace detail {

/// Terms of Q(z) = sum_i Dg^i(g^{q-i} z) L(g^{q-i-1} z), in the order i = 0..q-1.
inline std::vector<cplx> q_terms(const AnalyticFamily& fam, cplx w, int q, cplx z) {
    std::vector<cplx> orb(static_cast<std::size_t>(q)), dg(static_cast<std::size_t>(q));
    cplx x = z;
    for (int k = 0; k < q; ++k) {
        orb[static_cast<std::size_t>(k)] = x;
        auto [g, d] = fam.value_dz(w, x);
        dg[static_cast<std::size_t>(k)] = d;
        x = g;
    }
    std::vector<cplx> terms;
    cplx chain = 1.0;  // Dg^i at g^{q-i}(z)
    for (int i = 0; i < q; ++i) {
        if (i > 0) chain *= dg[static_cast<std::size_t>(q - i)];
        terms.push_back(chain * fam.dw(w, orb[static_cast<std::size_t>(q - i - 1)]));
    }
    return terms;
}

}  // namespace detail

/// Transversality functional Q(z) for the period of `cyc`, by the chain sum.
inline cplx Q_of(const AnalyticFamily& fam, const Cycle& cyc, cplx z) {
    cplx s = 0.0;
    for (auto t : detail::q_terms(fam, cyc.w, cyc.q, z)) s += t;
    return s;
}

/// d_w G_w^q(z) read off a (0,1) jet of the q-fold composition.
inline cplx Q_by_jet(const AnalyticFamily& fam, const Cycle& cyc, cplx z) {
    return propagate(fam, cyc.w, Jet2::identity_z(z, 0, 1), cyc.q)(0, 1);
}

/// Mixed (2,1) jet of G_w^q at a_0.
inline Jet2 mixed_return_jet(const AnalyticFamily& fam, const Cycle& cyc) {
    return propagate(fam, cyc.w, Jet2::identity_z(cyc.points.at(0), 2, 1), cyc.q);
}

/// Q'(a_0), the d_z d_w coefficient of the mixed return-map jet.
inline cplx Qprime(const AnalyticFamily& fam, const Cycle& cyc) { return mixed_return_jet(fam, cyc)(1, 1); }

enum class Verdict { Transversal, DegenerateWithinTol, Indeterminate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Transversal: return "Transversal";
        case Verdict::DegenerateWithinTol: return "DegenerateWithinTol";
        case Verdict::Indeterminate: return "Indeterminate";
    }
    return "?";
}

/// Multiplier behaviour of the cycle continued around a small parameter circle.
struct PersistenceProbe {
    double radius = 0.0;
    int samples = 0;
    int solved = 0;
    bool symmetric_branch = false;
    double max_multiplier_variation = 0.0;
    std::string note;

    json to_json() const {
        json j;
        j["radius"] = radius;
        j["samples"] = samples;
        j["solved"] = solved;
        j["symmetric_branch"] = symmetric_branch;
        j["max_multiplier_variation"] = max_multiplier_variation;
        j["variation_over_radius"] = radius > 0 ? max_multiplier_variation / radius : 0.0;
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

struct TransversalityReport {
    Cycle cycle;
    std::vector<cplx> Q_at_points;
    cplx Qprime_a0{};
    cplx D2gq_a0{};
    cplx T{};
    std::optional<cplx> kappa_prime;
    Verdict verdict = Verdict::Indeterminate;
    double tol_used = 0.0;
    /// Scale against which |T| is compared.
    double scale = 0.0;
    std::optional<PersistenceProbe> probe;

    json to_json() const {
        json j;
        j["cycle"] = cycle.to_json();
        j["Q_at_points"] = cjson(Q_at_points);
        j["Qprime_a0"] = cjson(Qprime_a0);
        j["D2gq_a0"] = cjson(D2gq_a0);
        j["T"] = cjson(T);
        j["kappa_prime"] = kappa_prime ? cjson(*kappa_prime) : json(nullptr);
        j["verdict"] = to_string(verdict);
        j["tol_used"] = tol_used;
        j["scale"] = scale;
        j["probe"] = probe ? probe->to_json() : json(nullptr);
        return j;
    }
};

struct TransversalityOptions {
    double tol = 1e-8;
    /// Probe circle radius; 0 selects 1e-3 |c_1| + 1e-6.
    double probe_radius = 0.0;
    int probe_samples = 32;
    bool run_probe = true;
};

namespace detail {

inline bool is_symmetric(const Cycle& c, double tol = 1e-10) {
    if (c.q % 2 != 0) return false;
    const int m = c.q / 2;
    for (int j = 0; j < m; ++j)
        if (std::abs(c.points[static_cast<std::size_t>(j + m)] + c.points[static_cast<std::size_t>(j)]) >
            tol * c.scale())
            return false;
    return true;
}

inline PersistenceProbe persistence_probe(const AnalyticFamily& fam, const Cycle& cyc,
                                          const TransversalityOptions& opt) {
    PersistenceProbe pr;
    const cplx c1 = fam.marked_value(cyc.w);
    pr.radius = opt.probe_radius > 0 ? opt.probe_radius : 1e-3 * std::abs(c1) + 1e-6;
    pr.samples = opt.probe_samples;
    pr.symmetric_branch = fam.odd && is_symmetric(cyc);
    std::vector<cplx> seed = cyc.points;
    if (pr.symmetric_branch) seed.resize(static_cast<std::size_t>(cyc.q / 2));
    for (int s = 0; s < pr.samples; ++s) {
        const cplx w = cyc.w + pr.radius * std::polar(1.0, 2 * std::numbers::pi * s / pr.samples);
        try {
            Cycle c = pr.symmetric_branch ? find_symmetric_cycle(fam, w, seed) : find_cycle(fam, w, cyc.q, seed);
            pr.max_multiplier_variation = std::max(pr.max_multiplier_variation, std::abs(c.kappa - cyc.kappa));
            seed = c.points;
            if (pr.symmetric_branch) seed.resize(static_cast<std::size_t>(cyc.q / 2));
            ++pr.solved;
        } catch (const Error& e) {
            pr.note = std::string("continuation failed at some samples: ") + e.what();
        }
    }
    return pr;
}

}  // namespace detail

/// Q, Q', D^2 g^q, T and the multiplier derivative at a cycle, with the
/// transversality verdict. |T| is compared with tol times
/// max(|D^2 g^q|_abs |Q|_abs, |Q'| |kappa - 1|), where the _abs quantities
/// are sums of absolute values of the chain-rule and Q-sum terms.
inline TransversalityReport transversality_report(const AnalyticFamily& fam, const Cycle& cyc,
                                                  const TransversalityOptions& opt = {}) {
    if (std::abs(cyc.kappa) < kClassTol)
        throw SuperattractingUnsupported("multiplier vanishes; the multiplier derivative is not defined");
    TransversalityReport r;
    r.cycle = cyc;
    r.tol_used = opt.tol;
    const Jet2 mj = mixed_return_jet(fam, cyc);
    const cplx kappa = cyc.kappa;
    r.D2gq_a0 = mj.derivative(2, 0);
    r.Qprime_a0 = mj(1, 1);
    for (const auto& a : cyc.points) r.Q_at_points.push_back(Q_of(fam, cyc, a));
    const cplx Q0 = r.Q_at_points.front();
    r.T = r.D2gq_a0 * Q0 - r.Qprime_a0 * (kappa - 1.0);

    // Absolute chain-rule sum for D^2 g^q(a_0) and absolute Q sum.
    double q_abs = 0.0;
    for (auto t : detail::q_terms(fam, cyc.w, cyc.q, cyc.points.front())) q_abs += std::abs(t);
    double d2_abs = 0.0;
    {
        std::vector<cplx> d1, d2;
        for (auto a : cyc.points) {
            const Jet2 j = fam.jet(cyc.w, a, 2, 0);
            d1.push_back(j(1, 0));
            d2.push_back(j.derivative(2, 0));
        }
        for (int j = 0; j < cyc.q; ++j) {
            double before = 1.0, after = 1.0;
            for (int i = 0; i < j; ++i) before *= std::abs(d1[static_cast<std::size_t>(i)]);
            for (int i = j + 1; i < cyc.q; ++i) after *= std::abs(d1[static_cast<std::size_t>(i)]);
            d2_abs += std::abs(d2[static_cast<std::size_t>(j)]) * before * before * after;
        }
    }
    r.scale = std::max({d2_abs * q_abs, std::abs(r.Qprime_a0) * std::abs(kappa - 1.0), 1e-300});
    if (!std::isfinite(std::abs(r.T)) || !std::isfinite(r.scale) || r.scale <= 1e-300)
        r.verdict = Verdict::Indeterminate;
    else
        r.verdict = std::abs(r.T) > opt.tol * r.scale ? Verdict::Transversal : Verdict::DegenerateWithinTol;

    if (std::abs(kappa - 1.0) > kClassTol) r.kappa_prime = r.T / (1.0 - kappa);
    if (r.verdict == Verdict::DegenerateWithinTol && opt.run_probe) r.probe = detail::persistence_probe(fam, cyc, opt);
    return r;
}

/// Taylor coefficients of a one-variable map at a point; the convention of BaseJetFn.
using MapJetFn = std::function<void(cplx z, std::span<cplx> out)>;

inline Jet2 map_jet(const MapJetFn& f, cplx z, int order) {
    std::vector<cplx> c(static_cast<std::size_t>(order + 1));
    f(z, c);
    return Jet2::from_coefficients(c);
}

inline cplx map_value(const MapJetFn& f, cplx z) {
    cplx c[1];
    f(z, c);
    return c[0];
}

inline std::pair<cplx, cplx> map_value_dz(const MapJetFn& f, cplx z) {
    cplx c[2];
    f(z, c);
    return {c[0], c[1]};
}

/// Polynomial map sum_k coeffs[k] z^k as a MapJetFn.
inline MapJetFn polynomial_map(std::vector<cplx> coeffs) {
    return [coeffs](cplx z0, std::span<cplx> out) {
        std::vector<cplx> b = coeffs;
        const std::size_t n = b.size();
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = n - 1; i > k; --i) b[i - 1] += z0 * b[i];
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < n ? b[k] : cplx{};
    };
}

/// z -> G_w^q(z) for the cycle's period and parameter.
inline MapJetFn return_map_fn(const AnalyticFamily& fam, cplx w, int q) {
    return [&fam, w, q](cplx z, std::span<cplx> out) {
        const int n = static_cast<int>(out.size()) - 1;
        const Jet2 j = propagate(fam, w, Jet2::identity_z(z, n, 0), q);
        for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = j(k, 0);
    };
}

/// z -> Q(z) = d_w G_w^q(z), with jets from a (n, 1) propagation.
inline MapJetFn Q_fn(const AnalyticFamily& fam, cplx w, int q) {
    return [&fam, w, q](cplx z, std::span<cplx> out) {
        const int n = static_cast<int>(out.size()) - 1;
        const Jet2 j = propagate(fam, w, Jet2::identity_z(z, n, 1), q);
        for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = j(k, 1);
    };
}

/// Koenigs linearizer phi with phi(p) = 0, phi'(p) = 1, phi(f(z)) = kappa phi(z).
struct Linearizer {
    MapJetFn f;
    cplx fixed{};
    cplx kappa{};
    /// Taylor series of phi at p in powers of (z - p).
    Jet2 series;
    /// Radius around p on which the series is used directly.
    double trust_radius = 0.0;
    int iterations = 0;
    double conjugacy_residual = 0.0;

    /// phi(z) and phi'(z): iterate into the trust disk, then scale back.
    std::pair<cplx, cplx> eval_with_derivative(cplx z, int max_steps = 100000) const {
        cplx deriv = 1.0;
        cplx kpow = 1.0;
        for (int n = 0; n <= max_steps; ++n) {
            if (std::abs(z - fixed) <= trust_radius) {
                const Jet2 d = derivative_z(series);
                return {series.evaluate(z - fixed) / kpow, d.evaluate(z - fixed) * deriv / kpow};
            }
            auto [fz, dfz] = map_value_dz(f, z);
            deriv *= dfz;
            kpow *= kappa;
            z = fz;
            if (!std::isfinite(std::abs(z))) break;
        }
        throw NoConvergence("orbit did not enter the linearization disk");
    }

    cplx operator()(cplx z) const { return eval_with_derivative(z).first; }
    cplx derivative(cplx z) const { return eval_with_derivative(z).second; }
    /// phi''(p).
    cplx second_derivative() const { return series.derivative(2, 0); }
};

namespace detail {

inline double series_radius(const Jet2& s) {
    const int n = s.kz();
    double r = std::numeric_limits<double>::infinity();
    for (int k = std::max(2, n / 2); k <= n; ++k) {
        const double a = std::abs(s(k, 0));
        if (a > 0) r = std::min(r, std::pow(a, -1.0 / k));
    }
    return r;
}

inline std::vector<cplx> disk_samples(cplx center, double radius) {
    std::vector<cplx> pts{center};
    for (double frac : {0.25, 0.5, 0.75, 1.0})
        for (int k = 0; k < 24; ++k)
            pts.push_back(center + frac * radius * std::polar(1.0, 2 * std::numbers::pi * (k + 0.5 * frac) / 24));
    return pts;
}

}  // namespace detail

/// Koenigs linearization at an attracting fixed point p of f, computed as the
/// limit kappa^{-n} (f^n - p) on Taylor jets of the given order.
inline Linearizer koenigs(const MapJetFn& f, cplx fixed, double radius, int order = 40) {
    const Jet2 F = map_jet(f, fixed, order);
    const cplx kappa = F(1, 0);
    if (!(std::abs(kappa) > 0.0 && std::abs(kappa) < 1.0))
        throw NotHyperbolic("Koenigs linearization needs 0 < |kappa| < 1");
    if (std::abs(F.value() - fixed) > 1e-10 * std::max(1.0, std::abs(fixed)))
        throw DomainError("the given point is not fixed by f");
    Jet2 F0 = F;
    F0(0, 0) = fixed;

    Linearizer lin;
    lin.f = f;
    lin.fixed = fixed;
    lin.kappa = kappa;
    // Coefficients of kappa^{-n} (f^n - p) converge like |kappa|^n.
    const int n_iter = static_cast<int>(std::ceil(std::log(1e-17) / std::log(std::abs(kappa)))) + 1;
    Jet2 X = Jet2::identity_z(fixed, order, 0);
    cplx kpow = 1.0;
    for (int n = 0; n < n_iter; ++n) {
        X = compose(F0, X);
        kpow *= kappa;
    }
    Jet2 phi = X;
    phi(0, 0) = 0.0;
    phi *= 1.0 / kpow;
    phi(1, 0) = 1.0;
    lin.series = phi;
    lin.iterations = n_iter;
    lin.trust_radius = std::min(radius, 0.3 * detail::series_radius(phi));

    for (auto z : detail::disk_samples(fixed, radius)) {
        const cplx fz = map_value(f, z);
        lin.conjugacy_residual = std::max(lin.conjugacy_residual, std::abs(lin(fz) - kappa * lin(z)));
    }
    // Direct check of the truncated series against the functional equation on the trust disk.
    for (auto z : detail::disk_samples(fixed, lin.trust_radius)) {
        const cplx fz = map_value(f, z);
        if (std::abs(fz - fixed) <= lin.trust_radius)
            lin.conjugacy_residual = std::max(
                lin.conjugacy_residual, std::abs(phi.evaluate(fz - fixed) - kappa * phi.evaluate(z - fixed)));
    }
    return lin;
}

/// Solution w of w(f(z)) = Gamma(z) + f'(z) w(z) near an attracting fixed point.
struct CohomologySolution {
    MapJetFn f;
    MapJetFn gamma;
    Linearizer phi;
    /// Taylor series of w at the fixed point.
    Jet2 series;
    /// Coefficient k of the homogeneous term k*zeta fixed by the anchor.
    cplx k_homogeneous{};
    double residual = 0.0;
    int series_terms_summed = 0;

    /// Evaluates w by iterating into the trust disk and unwinding
    /// w(z) = (w(f(z)) - Gamma(z)) / f'(z).
    cplx operator()(cplx z) const {
        std::vector<cplx> orbit_pts;
        for (int n = 0; n < 100000; ++n) {
            if (std::abs(z - phi.fixed) <= phi.trust_radius) break;
            orbit_pts.push_back(z);
            z = map_value(f, z);
            if (!std::isfinite(std::abs(z))) throw NoConvergence("orbit left the basin");
        }
        if (std::abs(z - phi.fixed) > phi.trust_radius) throw NoConvergence("orbit did not enter the series disk");
        cplx val = series.evaluate(z - phi.fixed);
        for (auto it = orbit_pts.rbegin(); it != orbit_pts.rend(); ++it) {
            const cplx dfz = map_value_dz(f, *it).second;
            if (std::abs(dfz) == 0.0) throw DerivativeVanished("f' vanishes along the orbit");
            val = (val - map_value(gamma, *it)) / dfz;
        }
        return val;
    }
};

/// Solves the cohomological equation by the Koenigs-coordinate recipe:
/// u = -kappa^{-1} sum_n Gamma~'(kappa^n zeta), w~ = Gamma~(0)/(1-kappa) + int u + k zeta,
/// w = (w~ o phi) / phi', with k chosen so that w(anchor) = value.
inline CohomologySolution solve_cohomology(const MapJetFn& f, const MapJetFn& gamma, cplx fixed, cplx anchor,
                                           cplx value, double radius, int order = 40) {
    CohomologySolution sol;
    sol.f = f;
    sol.gamma = gamma;
    const Jet2 F = map_jet(f, fixed, order);
    const cplx kappa = F(1, 0);
    if (!(std::abs(kappa) > 0.0 && std::abs(kappa) < 1.0))
        throw NotHyperbolic("cohomology solver needs 0 < |kappa| < 1");
    const Jet2 Gm = map_jet(gamma, fixed, order);
    const cplx f2 = F.derivative(2, 0);
    const cplx hyp = Gm(0, 0) * f2 - Gm(1, 0) * (kappa - 1.0);
    const double hyp_scale = std::max({std::abs(Gm(0, 0) * f2), std::abs(Gm(1, 0) * (kappa - 1.0)),
                                       (std::abs(Gm(0, 0)) + std::abs(Gm(1, 0))) * 1e-3, 1e-300});
    if (std::abs(hyp) > 1e-10 * std::max(1.0, hyp_scale))
        throw HypcohViolated("Gamma(0) f''(0) - Gamma'(0)(f'(0) - 1) = " + format_double(std::abs(hyp)));

    sol.phi = koenigs(f, fixed, radius, order);
    const Jet2& phi = sol.phi.series;
    // psi = phi^{-1} as a series in zeta, expanded at zeta = 0.
    const Jet2 psi = revert(phi, fixed);
    // Gamma~(zeta) = Gamma(psi(zeta)) * phi'(f(psi(zeta))).
    const Jet2 gamma_psi = compose(Gm, psi);
    Jet2 F0 = F;
    F0(0, 0) = fixed;
    const Jet2 f_psi = compose(F0, psi);  // value p
    const Jet2 dphi = derivative_z(phi).truncated(order, 0);
    const Jet2 dphi_f = compose(dphi, f_psi);
    const Jet2 gt = gamma_psi * dphi_f;

    // u_k = -kappa^{-1} (k+1) g~_{k+1} sum_n kappa^{nk}; u_0 = 0 by the hypothesis.
    Jet2 u(order - 1, 0);
    for (int k = 1; k <= order - 1; ++k) {
        cplx s = 0.0, term = 1.0, kk = std::pow(kappa, k);
        int n = 0;
        while (std::abs(term) >= 1e-15 && n < 100000) {
            s += term;
            term *= kk;
            ++n;
        }
        sol.series_terms_summed = std::max(sol.series_terms_summed, n);
        u(k, 0) = -(static_cast<double>(k + 1) * gt(k + 1, 0) * s) / kappa;
    }
    Jet2 wt = integral_z(u);  // order `order`
    wt(0, 0) = gt(0, 0) / (1.0 - kappa);

    // Homogeneous freedom k*zeta fixed by the anchor: w~(phi(a)) = phi'(a) b.
    auto [za, dza] = sol.phi.eval_with_derivative(anchor);
    if (std::abs(za) > 1e-14 * std::max(1.0, std::abs(anchor))) {
        // Particular solution first, evaluated at the anchor through the unwinding evaluator.
        const Jet2 w_part = compose(wt, phi);
        sol.series = w_part * reciprocal(dphi);
        const cplx wa = sol(anchor);
        // The homogeneous solution k*phi(z)/phi'(z) evaluated at the anchor.
        const cplx hom = za / dza;
        sol.k_homogeneous = (value - wa) / hom;
        wt(1, 0) += sol.k_homogeneous;
    } else if (std::abs(value - wt(0, 0)) > 1e-10 * std::max(1.0, std::abs(value))) {
        throw DomainError("anchor at the fixed point forces w(p) = Gamma~(0)/(1 - kappa)");
    }
    sol.series = compose(wt, phi) * reciprocal(dphi);

    for (auto z : detail::disk_samples(fixed, radius)) {
        const cplx lhs = sol(map_value(f, z));
        const auto [fz, dfz] = map_value_dz(f, z);
        (void)fz;
        const cplx rhs = map_value(gamma, z) + dfz * sol(z);
        sol.residual = std::max(sol.residual, std::abs(lhs - rhs));
    }
    // Series-level residual on the trust disk, independent of the unwinding evaluator.
    for (auto z : detail::disk_samples(fixed, sol.phi.trust_radius)) {
        const auto [fz, dfz] = map_value_dz(f, z);
        if (std::abs(fz - fixed) > sol.phi.trust_radius) continue;
        const cplx lhs = sol.series.evaluate(fz - fixed);
        const cplx rhs = map_value(gamma, z) + dfz * sol.series.evaluate(z - fixed);
        sol.residual = std::max(sol.residual, std::abs(lhs - rhs));
    }
    return sol;
}

}  // namespace parabifurc
