#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "parabifurc/errors.hpp"
#include "parabifurc/family.hpp"
#include "parabifurc/io.hpp"

namespace parabifurc {

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_atom(const std::string& s, const std::string& what) {
    if (s == "pi") return std::numbers::pi;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size()) throw DomainError("cannot parse " + what + " '" + s + "'");
    return v;
}

}  // namespace detail

/// Real number with an optional sign, `pi`, and one `*` or `/` factor: 0.5, -pi/2, 2*pi.
inline double parse_real(const std::string& text, const std::string& what = "number") {
    std::string s = detail::trim(text);
    if (s.empty()) throw DomainError("empty " + what);
    double sign = 1.0;
    if (s[0] == '-' || s[0] == '+') {
        if (s[0] == '-') sign = -1.0;
        s = s.substr(1);
    }
    for (char op : {'/', '*'}) {
        const auto k = s.find(op);
        if (k != std::string::npos) {
            const double a = detail::parse_atom(s.substr(0, k), what);
            const double b = detail::parse_atom(s.substr(k + 1), what);
            return sign * (op == '/' ? a / b : a * b);
        }
    }
    return sign * detail::parse_atom(s, what);
}

/// Complex number as `x`, `yi`, `x+yi` or `x-yi`; each part accepts the parse_real forms.
inline std::complex<double> parse_complex(const std::string& text, const std::string& what = "complex number") {
    const std::string s = detail::trim(text);
    if (s.empty()) throw DomainError("empty " + what);
    if (s.back() != 'i') return {parse_real(s, what), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not a leading sign or an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag = [&](const std::string& p) {
        if (p.empty() || p == "+") return 1.0;
        if (p == "-") return -1.0;
        return parse_real(p, what);
    };
    if (split == std::string::npos) return {0.0, imag(body)};
    return {parse_real(body.substr(0, split), what), imag(body.substr(split))};
}

/// `a:b` with a < b.
inline std::pair<double, double> parse_range(const std::string& text) {
    const auto k = text.find(':');
    if (k == std::string::npos) throw DomainError("range must be written lo:hi, got '" + text + "'");
    const double a = parse_real(text.substr(0, k), "range bound"), b = parse_real(text.substr(k + 1), "range bound");
    if (!(a < b)) throw DomainError("range lower bound must be below the upper bound");
    return {a, b};
}

/// Settings shared by all subcommands; a config file supplies defaults that flags override.
struct RunConfig {
    std::string command;
    std::string family;
    /// Family constructor parameters such as the quad degree d.
    std::map<std::string, double> family_params;
    /// Value of the family parameter (c, w or t).
    std::optional<cplx> parameter;
    double newton_tol = 1e-12;
    double class_tol = 1e-8;
    double degeneracy_tol = 1e-8;
    std::optional<std::pair<double, double>> t_range;
    int grid_n = 201;
    /// Largest |lambda| in motion truncations.
    double lambda_eps = 1e-2;
    std::string output;
    std::string format;
    int threads = 0;

    static const std::vector<std::string>& keys() {
        static const std::vector<std::string> k = {"command",   "family", "param.<name>", "parameter",
                                                   "newton_tol", "class_tol", "degeneracy_tol", "t_range",
                                                   "grid_n",    "lambda_eps", "output", "format", "threads"};
        return k;
    }

    /// Names that set the family parameter rather than a constructor parameter.
    static bool is_parameter_name(const std::string& name) { return name == "c" || name == "w" || name == "t"; }

    /// `name=value` as given to --param.
    void set_param(const std::string& assignment) {
        const auto k = assignment.find('=');
        if (k == std::string::npos || k == 0) throw DomainError("parameter must be written name=value, got '" + assignment + "'");
        const std::string name = detail::trim(assignment.substr(0, k));
        const std::string value = assignment.substr(k + 1);
        if (is_parameter_name(name))
            parameter = parse_complex(value, "parameter " + name);
        else
            family_params[name] = parse_real(value, "parameter " + name);
    }

    void set(const std::string& key, const std::string& value) {
        auto positive = [&](const std::string& v) {
            const double x = parse_real(v, key);
            if (!(x > 0)) throw DomainError(key + " must be positive");
            return x;
        };
        if (key == "command") command = detail::trim(value);
        else if (key == "family") family = detail::trim(value);
        else if (key.rfind("param.", 0) == 0) set_param(key.substr(6) + "=" + value);
        else if (key == "parameter") parameter = parse_complex(value, key);
        else if (key == "newton_tol") newton_tol = positive(value);
        else if (key == "class_tol") class_tol = positive(value);
        else if (key == "degeneracy_tol") degeneracy_tol = positive(value);
        else if (key == "t_range") t_range = parse_range(value);
        else if (key == "grid_n") grid_n = static_cast<int>(parse_real(value, key));
        else if (key == "lambda_eps") lambda_eps = positive(value);
        else if (key == "output") output = detail::trim(value);
        else if (key == "format") format = detail::trim(value);
        else if (key == "threads") threads = static_cast<int>(parse_real(value, key));
        else throw DomainError("unknown configuration key '" + key + "'");
    }

    /// Throws DomainError when an invariant fails.
    void validate() const {
        if (!(newton_tol > 0 && class_tol > 0 && degeneracy_tol > 0 && lambda_eps > 0))
            throw DomainError("tolerances must be positive");
        if (grid_n < 2) throw DomainError("grid_n must be at least 2");
        if (threads < 0) throw DomainError("threads must be non-negative");
        if (!format.empty() && format != "json" && format != "csv")
            throw DomainError("format must be json or csv");
    }

    AnalyticFamily make() const {
        if (family.empty()) throw DomainError("no family given");
        return make_family(family, family_params);
    }

    json to_json() const {
        json j;
        j["command"] = command;
        j["family"] = family;
        j["family_params"] = family_params;
        j["parameter"] = parameter ? cjson(*parameter) : json(nullptr);
        j["newton_tol"] = newton_tol;
        j["class_tol"] = class_tol;
        j["degeneracy_tol"] = degeneracy_tol;
        j["t_range"] = t_range ? json::array({t_range->first, t_range->second}) : json(nullptr);
        j["grid_n"] = grid_n;
        j["lambda_eps"] = lambda_eps;
        j["output"] = output;
        j["format"] = format;
        j["threads"] = threads;
        return j;
    }
};

/// `key = value` lines; `#` starts a comment. Unknown keys are rejected.
inline RunConfig parse_config(std::istream& in, RunConfig cfg = {}) {
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DomainError("config line " + std::to_string(n) + ": expected key = value");
        try {
            cfg.set(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
        } catch (const DomainError& e) {
            const std::string msg = e.what();
            throw DomainError("config line " + std::to_string(n) + ": " + msg.substr(e.code().size() + 2));
        }
    }
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text, RunConfig cfg = {}) {
    std::istringstream in(text);
    return parse_config(in, std::move(cfg));
}

inline RunConfig load_config(const std::string& path, RunConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot read config file " + path);
    return parse_config(in, std::move(cfg));
}

}  // namespace parabifurc
