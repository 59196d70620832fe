#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parabifurc/errors.hpp"
#include "parabifurc/io.hpp"
#include "parabifurc/jet.hpp"
#include "parabifurc/region.hpp"

namespace parabifurc {

enum class FamilyForm { Additive, Multiplicative, Custom };

inline const char* to_string(FamilyForm f) {
    switch (f) {
        case FamilyForm::Additive: return "Additive";
        case FamilyForm::Multiplicative: return "Multiplicative";
        case FamilyForm::Custom: return "Custom";
    }
    return "?";
}

/// Writes f^(k)(z)/k! into out[k] for k < out.size().
using BaseJetFn = std::function<void(cplx z, std::span<cplx> out)>;
/// Full (u, v) jet of G_{w+v}(z+u); used by Custom families.
using FullJetFn = std::function<Jet2(cplx w, cplx z, int kz, int kw)>;

/// Disks V and D of the class-F covering condition.
struct ClassFDisks {
    Region V;
    Region D;
};

inline constexpr int kMaxJetZ = 8;
inline constexpr int kMaxJetW = 2;

/// Two-variable analytic map (w, z) -> G_w(z). Immutable once built and safe to
/// share between threads.
struct AnalyticFamily {
    std::string id;
    FamilyForm form = FamilyForm::Additive;
    BaseJetFn base;
    FullJetFn full;
    Region dyn_domain = Region::full_plane();
    Region param_domain = Region::full_plane();
    bool real_symmetric = false;
    bool odd = false;
    /// Only real (w, z) are admissible.
    bool real_line_only = false;
    cplx critical_point{};
    double escape_radius = 1e8;
    /// +1 when the family is in the orientation of the paper's sign statements
    /// (f + t with f in F_u^+, or t * f); -1 for the mirrored case.
    int orientation = 1;
    std::optional<ClassFDisks> class_f;
    json params = json::object();

    void check_domain(cplx w, cplx z) const {
        if (real_line_only && (w.imag() != 0.0 || z.imag() != 0.0))
            throw DomainError(id + " is defined on the real line only");
        if (!param_domain.contains(w)) throw DomainError(id + ": parameter outside W");
        if (!dyn_domain.contains(z)) throw DomainError(id + ": point outside U");
    }

    /// Jet without order caps; internal propagation needs orders above the public cap.
    Jet2 jet(cplx w, cplx z, int kz, int kw) const {
        check_domain(w, z);
        if (form == FamilyForm::Custom) return full(w, z, kz, kw);
        std::vector<cplx> f(static_cast<std::size_t>(kz + 1));
        base(z, f);
        Jet2 j(kz, kw);
        if (form == FamilyForm::Additive) {
            for (int i = 0; i <= kz; ++i) j(i, 0) = f[static_cast<std::size_t>(i)];
            j(0, 0) += w;
            if (kw >= 1) j(0, 1) = 1.0;
        } else {
            for (int i = 0; i <= kz; ++i) {
                j(i, 0) = w * f[static_cast<std::size_t>(i)];
                if (kw >= 1) j(i, 1) = f[static_cast<std::size_t>(i)];
            }
        }
        return j;
    }

    /// G_w(z) and d_z G_w(z).
    std::pair<cplx, cplx> value_dz(cplx w, cplx z) const {
        if (form == FamilyForm::Custom) {
            const Jet2 j = jet(w, z, 1, 0);
            return {j(0, 0), j(1, 0)};
        }
        check_domain(w, z);
        cplx f[2];
        base(z, f);
        if (form == FamilyForm::Additive) return {f[0] + w, f[1]};
        return {w * f[0], w * f[1]};
    }

    cplx value(cplx w, cplx z) const {
        if (form == FamilyForm::Custom) return jet(w, z, 0, 0)(0, 0);
        check_domain(w, z);
        cplx f[1];
        base(z, f);
        return form == FamilyForm::Additive ? f[0] + w : w * f[0];
    }

    /// L(z) = d_w G_w(z).
    cplx dw(cplx w, cplx z) const {
        if (form == FamilyForm::Additive) {
            check_domain(w, z);
            return 1.0;
        }
        return jet(w, z, 0, 1)(0, 1);
    }

    /// Critical value of G_w, the first point c_1 of the marked orbit.
    cplx marked_value(cplx w) const { return value(w, critical_point); }

    bool escaped(cplx z) const {
        return !std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > escape_radius ||
               !dyn_domain.contains(z) || (real_line_only && z.imag() != 0.0);
    }

    json to_json() const {
        json j;
        j["id"] = id;
        j["form"] = to_string(form);
        j["params"] = params;
        j["real_symmetric"] = real_symmetric;
        j["odd"] = odd;
        j["critical_point"] = cjson(critical_point);
        j["orientation"] = orientation;
        j["dyn_domain"] = dyn_domain.to_json();
        j["param_domain"] = param_domain.to_json();
        return j;
    }
};

/// Taylor coefficients of G_{w+v}(z+u) to orders (k_z, k_w), with k_z <= 8 and k_w <= 2.
inline Jet2 eval_jet(const AnalyticFamily& fam, cplx w, cplx z, int kz, int kw) {
    if (kz < 0 || kw < 0 || kz > kMaxJetZ || kw > kMaxJetW)
        throw OrderError("jet order (" + std::to_string(kz) + "," + std::to_string(kw) +
                         ") exceeds the cap (8,2)");
    return fam.jet(w, z, kz, kw);
}

/// [z0, G_w(z0), ..., G_w^{n-1}(z0)].
inline std::vector<cplx> orbit(const AnalyticFamily& fam, cplx w, cplx z0, int n) {
    if (n < 1) throw DomainError("orbit length must be positive");
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(n));
    cplx z = z0;
    for (int k = 0; k < n; ++k) {
        if (fam.escaped(z)) throw EscapeError(fam.id + ": iterate " + std::to_string(k) + " left U", out);
        out.push_back(z);
        if (k + 1 < n) z = fam.value(w, z);
    }
    return out;
}

namespace detail {

inline std::vector<double> binomial_row(int n) {
    std::vector<double> b(static_cast<std::size_t>(n + 1), 1.0);
    for (int k = 1; k < n; ++k) b[static_cast<std::size_t>(k)] = b[static_cast<std::size_t>(k - 1)] * (n - k + 1) / k;
    return b;
}

/// Coefficients of sin(z0 + u) or, with phase 1, cos(z0 + u), scaled by freq^k / k!.
inline void trig_coeffs(cplx z0, double freq, int phase, std::span<cplx> out) {
    const cplx s = std::sin(freq * z0);
    const cplx c = std::cos(freq * z0);
    const cplx cyc[4] = {s, c, -s, -c};
    double scale = 1.0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k > 0) scale *= freq / static_cast<double>(k);
        out[k] = cyc[(k + static_cast<std::size_t>(phase)) % 4] * scale;
    }
}

}  // namespace detail

/// z^d + c.
inline AnalyticFamily quad_family(int d = 2) {
    if (d < 2) throw DomainError("quad family needs degree d >= 2");
    AnalyticFamily f;
    f.id = "quad";
    f.form = FamilyForm::Additive;
    f.base = [d](cplx z0, std::span<cplx> out) {
        const auto binom = detail::binomial_row(d);
        std::vector<cplx> pw(static_cast<std::size_t>(d + 1), 1.0);
        for (int k = 1; k <= d; ++k) pw[static_cast<std::size_t>(k)] = pw[static_cast<std::size_t>(k - 1)] * z0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            const int kk = static_cast<int>(k);
            out[k] = kk <= d ? binom[k] * pw[static_cast<std::size_t>(d - kk)] : cplx{};
        }
    };
    f.real_symmetric = true;
    f.odd = false;
    f.critical_point = 0.0;
    f.orientation = d % 2 == 0 ? -1 : 1;
    f.params = {{"d", d}};
    if (d == 2) f.class_f = ClassFDisks{Region::disk(0.0, 5.0), Region::disk(0.0, std::sqrt(5.0))};
    return f;
}

/// w z (1 - z).
inline AnalyticFamily logistic_family() {
    AnalyticFamily f;
    f.id = "logistic";
    f.form = FamilyForm::Multiplicative;
    f.base = [](cplx z0, std::span<cplx> out) {
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.0;
        if (!out.empty()) out[0] = z0 * (1.0 - z0);
        if (out.size() > 1) out[1] = 1.0 - 2.0 * z0;
        if (out.size() > 2) out[2] = -1.0;
    };
    f.real_symmetric = true;
    f.critical_point = 0.5;
    return f;
}

/// w sin z.
inline AnalyticFamily sine_family() {
    AnalyticFamily f;
    f.id = "sine-mult";
    f.form = FamilyForm::Multiplicative;
    f.base = [](cplx z0, std::span<cplx> out) { detail::trig_coeffs(z0, 1.0, 0, out); };
    f.real_symmetric = true;
    f.odd = true;
    f.critical_point = std::numbers::pi / 2;
    return f;
}

/// w sin^2 z = w (1 - cos 2z) / 2.
inline AnalyticFamily sine2_family() {
    AnalyticFamily f;
    f.id = "sine2-mult";
    f.form = FamilyForm::Multiplicative;
    f.base = [](cplx z0, std::span<cplx> out) {
        detail::trig_coeffs(z0, 2.0, 1, out);
        for (auto& c : out) c *= -0.5;
        if (!out.empty()) out[0] += 0.5;
    };
    f.real_symmetric = true;
    f.critical_point = std::numbers::pi / 2;
    return f;
}

/// w e^z (1 - e^z).
inline AnalyticFamily exp_family() {
    AnalyticFamily f;
    f.id = "exp-mult";
    f.form = FamilyForm::Multiplicative;
    f.base = [](cplx z0, std::span<cplx> out) {
        const cplx e1 = std::exp(z0);
        const cplx e2 = std::exp(2.0 * z0);
        double fact = 1.0, two = 1.0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (k > 0) {
                fact *= static_cast<double>(k);
                two *= 2.0;
            }
            out[k] = (e1 - two * e2) / fact;
        }
    };
    f.real_symmetric = true;
    f.critical_point = -std::log(2.0);
    return f;
}

/// b exp(-1/|x|^l) + c on the real line, with value 0 and a zero jet at x = 0.
inline AnalyticFamily flat_family(double b = 1.0, double ell = 1.0) {
    if (!(ell > 0.0)) throw DomainError("flat family needs l > 0");
    if (b == 0.0) throw DomainError("flat family needs b != 0");
    AnalyticFamily f;
    f.id = "flat-add";
    f.form = FamilyForm::Additive;
    f.real_line_only = true;
    f.base = [b, ell](cplx z0, std::span<cplx> out) {
        for (auto& c : out) c = 0.0;
        const double x0 = z0.real();
        if (x0 == 0.0 || out.empty()) return;
        const int n = static_cast<int>(out.size()) - 1;
        // P(u) = |x0 + u|^{-l} = |x0|^{-l} (1 + u/x0)^{-l}
        Jet2 p(n, 0);
        double coeff = std::pow(std::abs(x0), -ell);
        for (int k = 0; k <= n; ++k) {
            p(k, 0) = -coeff;
            coeff *= (-ell - k) / (k + 1) / x0;
        }
        Jet2 ex(n, 0);
        double fact = 1.0;
        const double e0 = std::exp(p.value().real());
        for (int k = 0; k <= n; ++k) {
            if (k > 0) fact *= k;
            ex(k, 0) = e0 / fact;
        }
        const Jet2 r = compose(ex, p);
        for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = b * r(k, 0);
    };
    f.real_symmetric = true;
    f.critical_point = 0.0;
    f.orientation = b > 0 ? -1 : 1;
    f.params = {{"b", b}, {"l", ell}};
    return f;
}

/// Additive family w + sum_k coeffs[k] z^k; convenient for explicit test maps.
inline AnalyticFamily polynomial_family(std::string id, std::vector<cplx> coeffs) {
    AnalyticFamily f;
    f.id = std::move(id);
    f.form = FamilyForm::Additive;
    f.base = [coeffs](cplx z0, std::span<cplx> out) {
        // Taylor shift to z0 by repeated synthetic division.
        std::vector<cplx> b = coeffs;
        const std::size_t n = b.size();
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = n - 1; i > k; --i) b[i - 1] += z0 * b[i];
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = k < n ? b[k] : cplx{};
    };
    bool real = true;
    for (auto c : coeffs)
        if (c.imag() != 0.0) real = false;
    f.real_symmetric = real;
    f.critical_point = 0.0;
    return f;
}

inline std::vector<std::string> family_ids() {
    return {"quad", "logistic", "sine-mult", "sine2-mult", "exp-mult", "flat-add"};
}

/// Registry lookup by id with numeric parameters (quad: d; flat-add: b, l).
inline AnalyticFamily make_family(const std::string& id, const std::map<std::string, double>& params = {}) {
    auto take = [&](const std::vector<std::string>& allowed) {
        for (const auto& [k, v] : params) {
            bool ok = false;
            for (const auto& a : allowed) ok = ok || a == k;
            if (!ok) throw DomainError("family " + id + " has no parameter '" + k + "'");
        }
    };
    auto get = [&](const std::string& k, double dflt) {
        auto it = params.find(k);
        return it == params.end() ? dflt : it->second;
    };
    if (id == "quad") {
        take({"d"});
        const double d = get("d", 2);
        if (d != std::floor(d)) throw DomainError("quad degree must be an integer");
        return quad_family(static_cast<int>(d));
    }
    if (id == "logistic") {
        take({});
        return logistic_family();
    }
    if (id == "sine-mult") {
        take({});
        return sine_family();
    }
    if (id == "sine2-mult") {
        take({});
        return sine2_family();
    }
    if (id == "exp-mult") {
        take({});
        return exp_family();
    }
    if (id == "flat-add") {
        take({"b", "l"});
        return flat_family(get("b", 1.0), get("l", 1.0));
    }
    throw DomainError("unknown family id '" + id + "'");
}

struct ValidationCheck {
    std::string name;
    bool passed = true;
    bool sampled = false;
    std::string detail;
};

struct ValidationReport {
    std::string family;
    std::vector<ValidationCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    const ValidationCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    json to_json() const {
        json j;
        j["family"] = family;
        j["all_passed"] = all_passed();
        json arr = json::array();
        for (const auto& c : checks) {
            json e;
            e["name"] = c.name;
            e["status"] = c.passed ? "pass" : "fail";
            e["sampled"] = c.sampled;
            e["detail"] = c.detail;
            arr.push_back(e);
        }
        j["checks"] = arr;
        return j;
    }
};

/// Spot checks of the declared flags and, where declared, the class-F disk
/// containment. Failures are reported, never thrown.
inline ValidationReport validate_family(const AnalyticFamily& fam, int samples = 64, unsigned seed = 12345) {
    ValidationReport rep;
    rep.family = fam.id;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uz(-2.0, 2.0);
    std::uniform_real_distribution<double> uw(-3.0, 3.0);
    auto draw = [&](bool real) {
        const double wi = real ? 0.0 : 0.5 * uz(rng);
        const double zi = real ? 0.0 : 0.5 * uz(rng);
        return std::pair<cplx, cplx>{{uw(rng), wi}, {uz(rng), zi}};
    };
    auto scaled = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

    auto sample_check = [&](const std::string& name, auto&& fn) {
        ValidationCheck c{name, true, true, ""};
        double worst = 0.0;
        int used = 0;
        for (int s = 0; s < samples; ++s) {
            auto [w, z] = draw(fam.real_line_only);
            try {
                worst = std::max(worst, fn(w, z));
                ++used;
            } catch (const Error&) {
            }
        }
        c.passed = used > 0 && worst <= 1e-12;
        c.detail = "max scaled defect " + format_double(worst) + " over " + std::to_string(used) + " samples";
        rep.checks.push_back(c);
    };

    if (fam.real_symmetric) {
        sample_check("real_symmetry", [&](cplx w, cplx z) {
            return scaled(fam.value(std::conj(w), std::conj(z)), std::conj(fam.value(w, z)));
        });
    }
    if (fam.odd) {
        sample_check("oddness", [&](cplx w, cplx z) { return scaled(fam.value(w, -z), -fam.value(w, z)); });
    }
    if (fam.form == FamilyForm::Additive) {
        sample_check("additive_dw_is_one", [&](cplx w, cplx z) { return std::abs(fam.dw(w, z) - 1.0); });
    } else if (fam.form == FamilyForm::Multiplicative) {
        sample_check("multiplicative_dw_is_f", [&](cplx w, cplx z) {
            cplx f[1];
            fam.base(z, f);
            return scaled(fam.dw(w, z), f[0]);
        });
    }
    if (fam.class_f) {
        const auto& V = fam.class_f->V;
        const auto& D = fam.class_f->D;
        ValidationCheck c{"class_F_disk_containment", true, true, ""};
        const double diam = D.diameter();
        bool ok = V.kind == RegionKind::Disk && D.kind == RegionKind::Disk;
        if (ok) {
            // V contains B(0, diam D) and B(0, diam D) contains D.
            ok = std::abs(V.center) + diam <= V.radius && std::abs(D.center) + D.radius <= diam;
            for (int s = 0; s < samples && ok; ++s) {
                const double t = 2.0 * std::numbers::pi * s / samples;
                const cplx edge = D.center + D.radius * 0.999999 * std::polar(1.0, t);
                ok = std::abs(edge) < diam && V.contains(diam * 0.999999 * std::polar(1.0, t));
            }
        }
        c.passed = ok;
        c.detail = "diam D = " + format_double(diam) + ", radius V = " + format_double(V.radius);
        rep.checks.push_back(c);
    }
    return rep;
}

}  // namespace parabifurc
