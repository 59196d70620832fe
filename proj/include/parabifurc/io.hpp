#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "parabifurc/errors.hpp"

namespace parabifurc {

using json = nlohmann::ordered_json;

/// Complex numbers serialize as [re, im].
inline json cjson(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline json cjson(const std::vector<std::complex<double>>& zs) {
    json a = json::array();
    for (auto z : zs) a.push_back(cjson(z));
    return a;
}

/// 17 significant digits, so every double round-trips.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump_string(std::ostream& os, const std::string& s) {
    os << json(s).dump();
}

inline void dump(std::ostream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                os << "{}";
                return;
            }
            os << "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ",\n";
                first = false;
                os << pad;
                dump_string(os, it.key());
                os << ": ";
                dump(os, it.value(), indent, depth + 1);
            }
            os << "\n" << close << "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                os << "[]";
                return;
            }
            bool scalar = true;
            for (const auto& e : j)
                if (e.is_structured()) scalar = false;
            if (scalar) {
                os << "[";
                for (std::size_t k = 0; k < j.size(); ++k) {
                    if (k) os << ", ";
                    dump(os, j[k], indent, depth + 1);
                }
                os << "]";
                return;
            }
            os << "[\n";
            for (std::size_t k = 0; k < j.size(); ++k) {
                if (k) os << ",\n";
                os << pad;
                dump(os, j[k], indent, depth + 1);
            }
            os << "\n" << close << "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            if (std::isfinite(x))
                os << format_double(x);
            else
                os << "null";
            return;
        }
        default: os << j.dump(); return;
    }
}

}  // namespace detail

/// Deterministic JSON text: insertion-ordered keys, 17-digit floats, LF endings.
inline std::string dump_json(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump(os, j, indent, 0);
    os << "\n";
    return os.str();
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot open output file " + path);
    f << text;
}

/// RFC-4180 CSV with a header row.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
        row_strings(header);
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw ShapeMismatch("csv row width differs from header");
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (k) out_ << ',';
            out_ << format_double(values[k]);
        }
        out_ << "\r\n";
    }

    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != columns_) throw ShapeMismatch("csv row width differs from header");
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << quote(cells[k]);
        }
        out_ << "\r\n";
    }

    std::string str() const { return out_.str(); }

    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }

  private:
    std::size_t columns_;
    std::ostringstream out_;
};

/// Binary PGM (P5), 8-bit, row-major from the top row.
inline std::string pgm_bytes(int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width <= 0 || height <= 0 ||
        pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ShapeMismatch("pgm raster size mismatch");
    std::string s = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    s.append(pixels.begin(), pixels.end());
    return s;
}

}  // namespace parabifurc
