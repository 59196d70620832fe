#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
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

/// v on the marked orbit c_1..c_N, with v(c_1) = 1 and v(c_{n+1}) = L(c_n) + Dg(c_n) v(c_n).
struct SpeedField {
    cplx w{};
    std::vector<cplx> points;
    std::vector<cplx> values;
    /// Largest |v(c_{n+1}) - L(c_n) - Dg(c_n) v(c_n)| / scale.
    double recursion_residual = 0.0;
    /// Largest relative gap to the w-jet of the composed map, over n <= 20.
    double jet_crosscheck = 0.0;

    json to_json() const {
        json j;
        j["w"] = cjson(w);
        j["points"] = cjson(points);
        j["values"] = cjson(values);
        j["recursion_residual"] = recursion_residual;
        j["jet_crosscheck"] = jet_crosscheck;
        return j;
    }

    std::string to_csv() const {
        CsvWriter csv({"n", "c_re", "c_im", "v_re", "v_im"});
        for (std::size_t k = 0; k < points.size(); ++k)
            csv.row({static_cast<double>(k + 1), points[k].real(), points[k].imag(), values[k].real(), values[k].imag()});
        return csv.str();
    }
};

inline SpeedField speed_field(const AnalyticFamily& fam, cplx w, int N) {
    if (N < 1) throw DomainError("N must be positive");
    SpeedField s;
    s.w = w;
    s.points = orbit(fam, w, fam.marked_value(w), N);
    s.values.resize(static_cast<std::size_t>(N));
    s.values[0] = 1.0;
    for (int n = 0; n + 1 < N; ++n) {
        const cplx c = s.points[static_cast<std::size_t>(n)];
        const cplx L = fam.dw(w, c);
        const cplx D = fam.value_dz(w, c).second;
        const cplx next = L + D * s.values[static_cast<std::size_t>(n)];
        s.values[static_cast<std::size_t>(n) + 1] = next;
        const double scale = std::max({1.0, std::abs(L), std::abs(D * s.values[static_cast<std::size_t>(n)])});
        s.recursion_residual = std::max(s.recursion_residual, std::abs(next - L - D * s.values[static_cast<std::size_t>(n)]) / scale);
    }
    // v(c_n) = d/dw G_w^{n-1}(c_1 + (w - w_0)) at w_0.
    Jet2 X(0, 1);
    X(0, 0) = s.points[0];
    X(0, 1) = 1.0;
    for (int n = 1; n <= std::min(N, 20); ++n) {
        if (n > 1) X = propagate(fam, w, X, 1);
        const cplx v = s.values[static_cast<std::size_t>(n - 1)];
        s.jet_crosscheck = std::max(s.jet_crosscheck, std::abs(X(0, 1) - v) / std::max(1.0, std::abs(v)));
    }
    return s;
}

/// Parameter w whose marked value equals m, by Newton from w0 (exact in one step
/// for additive and multiplicative families).
inline cplx parameter_for_marked(const AnalyticFamily& fam, cplx w0, cplx m) {
    cplx w = w0;
    for (int it = 0; it < 50; ++it) {
        const cplx d = fam.dw(w, fam.critical_point);
        if (d == cplx{}) throw DerivativeVanished("marked value does not depend on the parameter");
        const cplx step = (fam.marked_value(w) - m) / d;
        w -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    if (!fam.param_domain.contains(w)) throw ParameterOutsideW(fam.id + ": moved parameter leaves W");
    return w;
}

/// Log-spaced radial lambda samples from hi down to lo along a unit direction.
inline std::vector<cplx> radial_lambdas(double hi = 1e-2, double lo = 1e-5, int n = 10, cplx direction = 1.0) {
    if (n < 2 || !(hi > lo && lo > 0)) throw DomainError("radial lambda grid needs n >= 2 and hi > lo > 0");
    std::vector<cplx> out;
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        out.push_back(direction / std::abs(direction) * std::exp(std::log(hi) + t * (std::log(lo) - std::log(hi))));
    }
    return out;
}

/// A motion sampled on a finite support and a finite lambda set.
struct MotionTruncation {
    std::vector<cplx> support;
    /// Index of g(support[i]) in the support; -1 marks the orbit tail, whose image
    /// value is the push-forward G_{w(lambda)}(h(support[i], lambda)).
    std::vector<int> image;
    std::vector<cplx> lambdas;
    /// values[i][k] = h(support[i], lambdas[k]).
    std::vector<std::vector<cplx>> values;
    cplx base_w{};
    /// When >= 0, the moved marked value is values[parameter_point]; otherwise the
    /// parameter path is given explicitly in `parameter`.
    int parameter_point = -1;
    std::vector<cplx> parameter;
    /// Declared direction s of w(lambda) = c_1 + lambda s + O(lambda^2).
    cplx direction = 1.0;
    double epsilon = 1e-2;
    std::optional<double> order_m;

    std::size_t size() const { return support.size(); }

    cplx moved_parameter(const AnalyticFamily& fam, std::size_t k) const {
        if (parameter_point >= 0)
            return parameter_for_marked(fam, base_w, values[static_cast<std::size_t>(parameter_point)][k]);
        if (!fam.param_domain.contains(parameter[k])) throw ParameterOutsideW(fam.id + ": parameter path leaves W");
        return parameter[k];
    }

    /// Smallest pairwise distance of the moved support over all lambdas.
    double injectivity_margin() const {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            for (std::size_t i = 0; i < support.size(); ++i)
                for (std::size_t j = i + 1; j < support.size(); ++j) m = std::min(m, std::abs(values[i][k] - values[j][k]));
        return m;
    }

    /// Largest |h(z, 0) - z| over lambda samples equal to 0 (zero when none are present).
    double basepoint_defect() const {
        double d = 0.0;
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            if (lambdas[k] == cplx{})
                for (std::size_t i = 0; i < support.size(); ++i) d = std::max(d, std::abs(values[i][k] - support[i]));
        return d;
    }

    std::string to_csv() const {
        CsvWriter csv({"point", "lambda_re", "lambda_im", "value_re", "value_im"});
        for (std::size_t i = 0; i < support.size(); ++i)
            for (std::size_t k = 0; k < lambdas.size(); ++k)
                csv.row({static_cast<double>(i), lambdas[k].real(), lambdas[k].imag(), values[i][k].real(),
                         values[i][k].imag()});
        return csv.str();
    }

    json to_json() const {
        json j;
        j["support"] = cjson(support);
        j["image"] = image;
        j["lambdas"] = cjson(lambdas);
        j["base_w"] = cjson(base_w);
        j["parameter_point"] = parameter_point;
        j["direction"] = cjson(direction);
        j["epsilon"] = epsilon;
        j["order_m"] = order_m ? json(*order_m) : json(nullptr);
        j["injectivity_margin"] = injectivity_margin();
        return j;
    }
};

/// h(c_n, lambda) = c_n + lambda v(c_n) on the first N points of the marked orbit.
inline MotionTruncation speed_motion(const AnalyticFamily& fam, cplx w, int N, std::vector<cplx> lambdas = radial_lambdas()) {
    const SpeedField s = speed_field(fam, w, N);
    MotionTruncation h;
    h.support = s.points;
    h.lambdas = std::move(lambdas);
    h.base_w = w;
    h.parameter_point = 0;
    for (int i = 0; i < N; ++i) {
        h.image.push_back(i + 1 < N ? i + 1 : -1);
        std::vector<cplx> row;
        for (auto lam : h.lambdas) row.push_back(s.points[static_cast<std::size_t>(i)] + lam * s.values[static_cast<std::size_t>(i)]);
        h.values.push_back(std::move(row));
    }
    for (auto lam : h.lambdas) h.epsilon = std::max(h.epsilon, std::abs(lam));
    return h;
}

/// The cycle followed along the parameter path marked value c_1 + lambda s.
inline MotionTruncation cycle_motion(const AnalyticFamily& fam, const Cycle& cyc, std::vector<cplx> lambdas = radial_lambdas(),
                                     cplx s = 1.0) {
    MotionTruncation h;
    h.support = cyc.points;
    h.lambdas = std::move(lambdas);
    h.base_w = cyc.w;
    h.direction = s;
    const int q = cyc.q;
    for (int j = 0; j < q; ++j) h.image.push_back((j + 1) % q);
    h.values.assign(static_cast<std::size_t>(q), std::vector<cplx>(h.lambdas.size()));
    const cplx c1 = fam.marked_value(cyc.w);
    for (std::size_t k = 0; k < h.lambdas.size(); ++k) {
        const cplx wl = parameter_for_marked(fam, cyc.w, c1 + h.lambdas[k] * s);
        h.parameter.push_back(wl);
        const Cycle moved = find_cycle(fam, wl, q, cyc.points);
        for (int j = 0; j < q; ++j) h.values[static_cast<std::size_t>(j)][k] = moved.points[static_cast<std::size_t>(j)];
    }
    for (auto lam : h.lambdas) h.epsilon = std::max(h.epsilon, std::abs(lam));
    return h;
}

namespace detail {

inline double min_spacing(const std::vector<cplx>& pts) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) m = std::max(0.0, std::min(m, std::abs(pts[i] - pts[j])));
    return m;
}

inline cplx image_value(const AnalyticFamily& fam, const MotionTruncation& h, std::size_t i, std::size_t k, cplx w) {
    const int t = h.image[i];
    if (t >= 0) return h.values[static_cast<std::size_t>(t)][k];
    return fam.value(w, h.values[i][k]);
}

}  // namespace detail

struct LiftOptions {
    /// Multiple of the first Newton step allowed in the branch radius.
    double step_factor = 3.0;
    int threads = 1;
};

/// One lifting step: G_{w(lambda)}(y) = h(g(x), lambda), Newton seeded at x.
/// A solution farther from x than the branch radius, max(half the support spacing,
/// step_factor |first Newton step|), means the covering branch was lost.
inline MotionTruncation lift(const AnalyticFamily& fam, const MotionTruncation& h, const LiftOptions& opt = {}) {
    MotionTruncation out = h;
    out.order_m.reset();
    const double half_spacing = 0.5 * detail::min_spacing(h.support);
    parallel_for(h.lambdas.size(), resolve_threads(opt.threads), [&](std::size_t k) {
        const cplx w = h.moved_parameter(fam, k);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h.image[i] < 0) {
                out.values[i][k] = h.values[i][k];
                continue;
            }
            const cplx target = h.values[static_cast<std::size_t>(h.image[i])][k];
            const cplx x = h.support[i];
            cplx y = x;
            double first = -1.0;
            bool done = false;
            for (int it = 0; it < 60; ++it) {
                const auto [g, dg] = fam.value_dz(w, y);
                if (dg == cplx{}) throw BranchJump("critical point met while lifting support point " + std::to_string(i));
                const cplx step = (g - target) / dg;
                if (first < 0) first = std::abs(step);
                y -= step;
                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(y))) {
                    done = true;
                    break;
                }
            }
            if (!done) {
                const auto [g, dg] = fam.value_dz(w, y);
                if (std::abs(g - target) > 1e-12 * std::max(1.0, std::abs(target)))
                    throw NoConvergence("lift Newton stalled at support point " + std::to_string(i));
            }
            const double radius = std::max(half_spacing, opt.step_factor * first);
            if (std::abs(y - x) > radius)
                throw BranchJump("lift of support point " + std::to_string(i) + " moved " + format_double(std::abs(y - x)) +
                                 " beyond branch radius " + format_double(radius));
            out.values[i][k] = y;
        }
    });
    return out;
}

/// Pointwise mean of motions sharing support and lambda grid.
inline MotionTruncation average(const std::vector<MotionTruncation>& hs) {
    if (hs.empty()) throw ShapeMismatch("nothing to average");
    const MotionTruncation& h0 = hs.front();
    MotionTruncation out = h0;
    out.order_m.reset();
    for (const auto& h : hs) {
        if (h.support != h0.support || h.lambdas != h0.lambdas || h.image != h0.image ||
            h.parameter_point != h0.parameter_point || h.parameter.size() != h0.parameter.size())
            throw ShapeMismatch("motions differ in support, lambda grid or parameter layout");
    }
    const double k = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < h0.size(); ++i)
        for (std::size_t m = 0; m < h0.lambdas.size(); ++m) {
            cplx s = 0.0;
            for (const auto& h : hs) s += h.values[i][m];
            out.values[i][m] = s / k;
        }
    for (std::size_t m = 0; m < h0.parameter.size(); ++m) {
        cplx s = 0.0;
        for (const auto& h : hs) s += h.parameter[m];
        out.parameter[m] = s / k;
    }
    return out;
}

/// R(lambda) = max over the support of |G_{w(lambda)}(h(z, lambda)) - h(g(z), lambda)|.
inline std::vector<double> invariance_residuals(const AnalyticFamily& fam, const MotionTruncation& h) {
    std::vector<double> R(h.lambdas.size(), 0.0);
    for (std::size_t k = 0; k < h.lambdas.size(); ++k) {
        const cplx w = h.moved_parameter(fam, k);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h.image[i] < 0) continue;
            R[k] = std::max(R[k], std::abs(fam.value(w, h.values[i][k]) - detail::image_value(fam, h, i, k, w)));
        }
    }
    return R;
}

struct OrderReport {
    double order = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    /// Residuals are at the noise floor; order is +infinity.
    bool underflow = false;
    std::vector<cplx> lambdas;
    std::vector<double> residuals;
    std::vector<bool> used;

    json to_json() const {
        json j;
        j["order"] = std::isfinite(order) ? json(order) : json("inf");
        j["slope"] = slope;
        j["intercept"] = intercept;
        j["rms"] = rms;
        j["underflow"] = underflow;
        j["lambdas"] = cjson(lambdas);
        j["residuals"] = residuals;
        j["used"] = used;
        return j;
    }
};

/// Least-squares slope of log R against log |lambda|, minus one.
inline OrderReport invariance_order(const AnalyticFamily& fam, const MotionTruncation& h, double noise_floor = 1e-13) {
    OrderReport rep;
    rep.lambdas = h.lambdas;
    rep.residuals = invariance_residuals(fam, h);
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < h.lambdas.size(); ++k) {
        const bool ok = h.lambdas[k] != cplx{} && rep.residuals[k] >= noise_floor;
        rep.used.push_back(ok);
        if (ok) {
            xs.push_back(std::log(std::abs(h.lambdas[k])));
            ys.push_back(std::log(rep.residuals[k]));
        }
    }
    if (xs.size() < 3) {
        rep.underflow = true;
        rep.order = std::numeric_limits<double>::infinity();
        rep.slope = std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.slope = detail::fit_slope(xs, ys);
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    rep.intercept = my - rep.slope * mx;
    double ss = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double e = ys[k] - rep.intercept - rep.slope * xs[k];
        ss += e * e;
    }
    rep.rms = std::sqrt(ss / static_cast<double>(xs.size()));
    rep.order = rep.slope - 1.0;
    return rep;
}

/// h^(0) = h and h^(i+1) = lift(h^(i)); returns the mean of the first k.
inline MotionTruncation average_of_lifts(const AnalyticFamily& fam, const MotionTruncation& h, int k, int threads = 1) {
    if (k < 1) throw DomainError("k must be positive");
    std::vector<MotionTruncation> hs{h};
    for (int i = 1; i < k; ++i) hs.push_back(lift(fam, hs.back(), {3.0, threads}));
    return average(hs);
}

struct DRhoReport {
    double rho = 0.0;
    int N = 0;
    cplx partial{};
    double last_term = 0.0;
    /// Geometric mean of |t_{n+1}/t_n| over the final ten terms.
    double ratio = 0.0;
    double tail_bound = 0.0;
    bool non_positive = false;

    json to_json() const {
        json j;
        j["rho"] = rho;
        j["N"] = N;
        j["partial"] = cjson(partial);
        j["last_term"] = last_term;
        j["ratio"] = ratio;
        j["tail_bound"] = std::isfinite(tail_bound) ? json(tail_bound) : json("inf");
        j["non_positive"] = non_positive;
        return j;
    }
};

/// D(rho) = 1 + sum_{n=1}^N rho^n L(c_n) / Dg^n(c_1).
inline DRhoReport d_rho(const AnalyticFamily& fam, cplx w, double rho, int N) {
    if (!(rho > 0 && rho < 1)) throw DomainError("rho must lie in (0,1)");
    if (N < 1) throw DomainError("N must be positive");
    const std::vector<cplx> c = orbit(fam, w, fam.marked_value(w), N);
    DRhoReport r;
    r.rho = rho;
    r.N = N;
    cplx sum = 1.0;
    cplx prod = 1.0;
    double log_prod = 0.0;
    std::vector<double> log_mags;
    for (int n = 1; n <= N; ++n) {
        const cplx z = c[static_cast<std::size_t>(n - 1)];
        const cplx d = fam.value_dz(w, z).second;
        if (d == cplx{}) throw DerivativeVanished("Dg(c_" + std::to_string(n) + ") = 0");
        prod *= d;
        log_prod += std::log(std::abs(d));
        const cplx L = fam.dw(w, z);
        sum += std::pow(rho, n) * L / prod;
        log_mags.push_back(n * std::log(rho) + std::log(std::abs(L)) - log_prod);
    }
    // Magnitudes are tracked in logs because rho^n underflows long before N = 2000.
    r.partial = sum;
    r.last_term = std::exp(log_mags.back());
    const std::size_t m = std::min<std::size_t>(10, log_mags.size());
    r.ratio = m > 1 ? std::exp((log_mags.back() - log_mags[log_mags.size() - m]) / static_cast<double>(m - 1)) : 0.0;
    r.tail_bound = r.ratio < 1 ? r.last_term * r.ratio / (1 - r.ratio) : std::numeric_limits<double>::infinity();
    r.non_positive = !(sum.real() - r.tail_bound > 0);
    return r;
}

struct VRhoField {
    double rho = 0.0;
    SpeedField field;
    /// Largest relative defect of rho (v(c_{n+1}) - L(c_n) v(c_1)) / Dg(c_n) = v(c_n).
    double eigen_residual = 0.0;

    json to_json() const {
        json j = field.to_json();
        j["rho"] = rho;
        j["eigen_residual"] = eigen_residual;
        return j;
    }
};

/// v_rho(c_1) = 1 and v_rho(c_{n+1}) = L(c_n) + Dg(c_n) v_rho(c_n) / rho.
inline VRhoField v_rho_field(const AnalyticFamily& fam, cplx w, double rho, int N) {
    if (!(rho > 0 && rho < 1)) throw DomainError("rho must lie in (0,1)");
    if (N < 1) throw DomainError("N must be positive");
    VRhoField out;
    out.rho = rho;
    SpeedField& s = out.field;
    s.w = w;
    s.points = orbit(fam, w, fam.marked_value(w), N);
    s.values.assign(static_cast<std::size_t>(N), 0.0);
    s.values[0] = 1.0;
    std::vector<cplx> L(static_cast<std::size_t>(N)), D(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        L[static_cast<std::size_t>(n)] = fam.dw(w, s.points[static_cast<std::size_t>(n)]);
        D[static_cast<std::size_t>(n)] = fam.value_dz(w, s.points[static_cast<std::size_t>(n)]).second;
        if (n + 1 < N && D[static_cast<std::size_t>(n)] == cplx{})
            throw DerivativeVanished("Dg(c_" + std::to_string(n + 1) + ") = 0");
        if (n + 1 < N)
            s.values[static_cast<std::size_t>(n) + 1] =
                L[static_cast<std::size_t>(n)] + D[static_cast<std::size_t>(n)] * s.values[static_cast<std::size_t>(n)] / rho;
    }
    for (int n = 0; n + 1 < N; ++n) {
        const auto u = static_cast<std::size_t>(n);
        const cplx lifted = (s.values[u + 1] - L[u] * s.values[0]) / D[u];
        out.eigen_residual = std::max(out.eigen_residual, std::abs(rho * lifted - s.values[u]) / std::max(1.0, std::abs(s.values[u])));
    }
    s.recursion_residual = out.eigen_residual;
    return out;
}

struct HolderReport {
    int p = 1;
    int step = 1;
    double exponent = 1.5;
    std::vector<int> n;
    std::vector<double> ratios;
    /// Empirical sup of the ratio sequence.
    double sup = 0.0;
    /// log-log slope of the ratio against n over the second half of the samples.
    double trend_slope = 0.0;
    /// The tail sup exceeds ten times the sup over the first tenth of the samples.
    bool growth = false;
    /// p = 1 and Q(a_0) = 0, the regime in which the bound is claimed for the raw field.
    bool hypothesis_holds = false;
    cplx Q_a0{};

    json to_json() const {
        json j;
        j["p"] = p;
        j["step"] = step;
        j["exponent"] = exponent;
        j["n"] = n;
        j["ratios"] = ratios;
        j["sup"] = sup;
        j["trend_slope"] = trend_slope;
        j["growth"] = growth;
        j["hypothesis_holds"] = hypothesis_holds;
        j["Q_a0"] = cjson(Q_a0);
        return j;
    }
};

/// r_n = |v(z_n) - v(z_{n+pq})| / |z_n - z_{n+pq}|^{(p+2)/(p+1)} along the marked orbit.
inline HolderReport holder_check(const AnalyticFamily& fam, const Cycle& cyc, int N) {
    if (cyc.classification.kind != CycleKind::Parabolic) throw NotParabolic("holder_check needs a parabolic cycle");
    HolderReport rep;
    rep.p = cyc.classification.p;
    rep.step = rep.p * cyc.q;
    rep.exponent = static_cast<double>(rep.p + 2) / (rep.p + 1);
    rep.Q_a0 = Q_of(fam, cyc, cyc.points[0]);
    rep.hypothesis_holds = rep.p == 1 && std::abs(rep.Q_a0) <= 1e-8 * std::max(1.0, cyc.scale());
    if (N < 3 * rep.p) return rep;
    const SpeedField s = speed_field(fam, cyc.w, N + rep.step);
    for (int k = 1; k <= N; ++k) {
        const auto a = static_cast<std::size_t>(k - 1);
        const auto b = a + static_cast<std::size_t>(rep.step);
        const double dz = std::abs(s.points[a] - s.points[b]);
        if (dz == 0.0) break;
        rep.n.push_back(k);
        rep.ratios.push_back(std::abs(s.values[a] - s.values[b]) / std::pow(dz, rep.exponent));
    }
    if (rep.ratios.empty()) return rep;
    rep.sup = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    const std::size_t m = rep.ratios.size();
    const std::size_t head = std::max<std::size_t>(1, m / 10);
    const double head_sup = *std::max_element(rep.ratios.begin(), rep.ratios.begin() + static_cast<std::ptrdiff_t>(head));
    const double tail_sup = *std::max_element(rep.ratios.begin() + static_cast<std::ptrdiff_t>(m / 2), rep.ratios.end());
    rep.growth = tail_sup > 10 * head_sup;
    std::vector<double> xs, ys;
    for (std::size_t k = m / 2; k < m; ++k) {
        if (rep.ratios[k] > 0) {
            xs.push_back(std::log(static_cast<double>(rep.n[k])));
            ys.push_back(std::log(rep.ratios[k]));
        }
    }
    rep.trend_slope = detail::fit_slope(xs, ys);
    return rep;
}

}  // namespace parabifurc
