#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "json.hpp"

namespace parabifurc {

enum class RegionKind { Disk, Rectangle, PuncturedDisk, HalfPlane, FullPlane };

/// Open region of the complex plane. Membership is boundary-exclusive.
struct Region {
    RegionKind kind = RegionKind::FullPlane;
    std::complex<double> center{};
    /// Disk and punctured-disk radius; may be infinite for a punctured plane.
    double radius = std::numeric_limits<double>::infinity();
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
    /// Half-plane {z : Re(z * conj(normal)) > offset}.
    std::complex<double> normal{1.0, 0.0};
    double offset = 0;

    static Region full_plane() { return {}; }
    static Region disk(std::complex<double> c, double r) {
        Region g;
        g.kind = RegionKind::Disk;
        g.center = c;
        g.radius = r;
        return g;
    }
    static Region punctured_disk(std::complex<double> c, double r) {
        Region g = disk(c, r);
        g.kind = RegionKind::PuncturedDisk;
        return g;
    }
    static Region rectangle(double re_lo, double re_hi, double im_lo, double im_hi) {
        Region g;
        g.kind = RegionKind::Rectangle;
        g.re_lo = re_lo;
        g.re_hi = re_hi;
        g.im_lo = im_lo;
        g.im_hi = im_hi;
        return g;
    }
    static Region half_plane(std::complex<double> normal, double offset) {
        Region g;
        g.kind = RegionKind::HalfPlane;
        g.normal = normal / std::abs(normal);
        g.offset = offset;
        return g;
    }

    bool contains(std::complex<double> z) const {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        switch (kind) {
            case RegionKind::FullPlane: return true;
            case RegionKind::Disk: return std::abs(z - center) < radius;
            case RegionKind::PuncturedDisk: {
                const double d = std::abs(z - center);
                return d > 0.0 && d < radius;
            }
            case RegionKind::Rectangle:
                return z.real() > re_lo && z.real() < re_hi && z.imag() > im_lo && z.imag() < im_hi;
            case RegionKind::HalfPlane: return (z * std::conj(normal)).real() > offset;
        }
        return false;
    }

    /// Euclidean diameter; infinite for unbounded regions.
    double diameter() const {
        switch (kind) {
            case RegionKind::Disk:
            case RegionKind::PuncturedDisk: return 2.0 * radius;
            case RegionKind::Rectangle: return std::hypot(re_hi - re_lo, im_hi - im_lo);
            default: return std::numeric_limits<double>::infinity();
        }
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        switch (kind) {
            case RegionKind::FullPlane: j["kind"] = "FullPlane"; break;
            case RegionKind::Disk:
            case RegionKind::PuncturedDisk:
                j["kind"] = kind == RegionKind::Disk ? "Disk" : "PuncturedDisk";
                j["center"] = {center.real(), center.imag()};
                j["radius"] = std::isfinite(radius) ? nlohmann::ordered_json(radius)
                                                    : nlohmann::ordered_json("inf");
                break;
            case RegionKind::Rectangle:
                j["kind"] = "Rectangle";
                j["re"] = {re_lo, re_hi};
                j["im"] = {im_lo, im_hi};
                break;
            case RegionKind::HalfPlane:
                j["kind"] = "HalfPlane";
                j["normal"] = {normal.real(), normal.imag()};
                j["offset"] = offset;
                break;
        }
        return j;
    }
};

}  // namespace parabifurc
