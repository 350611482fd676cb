#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asc {

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

struct ValueError : std::runtime_error {
    explicit ValueError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file contents (bad signature, truncated stream, CRC mismatch).
struct DecodeError : IoError {
    explicit DecodeError(const std::string& what) : IoError(what) {}
};

// Well-formed file using a feature we do not handle (bit depth, color type).
struct UnsupportedError : IoError {
    explicit UnsupportedError(const std::string& what) : IoError(what) {}
};

// Axis-aligned box in continuous pixel coordinates, max edges exclusive:
// area = (r1-r0)*(c1-c0).
struct Box {
    double r0 = 0, c0 = 0, r1 = 0, c1 = 0;

    double height() const { return r1 - r0; }
    double width() const { return c1 - c0; }
    double area() const { return std::max(0.0, height()) * std::max(0.0, width()); }
    double center_row() const { return 0.5 * (r0 + r1); }
    double center_col() const { return 0.5 * (c0 + c1); }
};

// Intersection-over-union of two boxes. Degenerate (zero-area) boxes have
// IoU 0 against everything, themselves included.
inline double iou(const Box& a, const Box& b) {
    const double ir = std::min(a.r1, b.r1) - std::max(a.r0, b.r0);
    const double ic = std::min(a.c1, b.c1) - std::max(a.c0, b.c0);
    if (ir <= 0.0 || ic <= 0.0) return 0.0;
    const double inter = ir * ic;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

// Dense H x W x 3 raster of doubles, row-major, channel-minor. The tag keeps
// images, color fields and gradients distinct types with one implementation.
template <typename Tag>
struct Raster3 {
    int height = 0;
    int width = 0;
    std::vector<double> data;  // height*width*3

    Raster3() = default;
    Raster3(int h, int w, double fill = 0.0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, fill) {
        if (h < 1 || w < 1) throw ShapeError("raster dimensions must be positive");
    }

    double& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
    }
    double at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * 3 + ch];
    }

    bool same_shape_as(int h, int w) const { return height == h && width == w; }

    // Enforces the [0,1] + finiteness invariant.
    void validate_unit_range(const char* what) const {
        for (double v : data) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw ValueError(std::string(what) + ": value outside [0,1]");
        }
    }

    void clamp_unit_range() {
        for (double& v : data) v = std::clamp(v, 0.0, 1.0);
    }

    bool operator==(const Raster3&) const = default;
};

struct ImageTag {};
struct ColorFieldTag {};
struct GradTag {};

using Image = Raster3<ImageTag>;        // pixel values in [0,1]
using ColorField = Raster3<ColorFieldTag>;  // replacement colors in [0,1]
using Grad3 = Raster3<GradTag>;         // unconstrained per-pixel gradients

// Binary H x W selection matrix; values are exactly 0 or 1.
struct Mask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    Mask() = default;
    Mask(int h, int w, std::uint8_t fill = 0)
        : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill ? 1 : 0) {
        if (h < 1 || w < 1) throw ShapeError("mask dimensions must be positive");
    }

    std::uint8_t& at(int r, int c) {
        return data[static_cast<std::size_t>(r) * width + c];
    }
    std::uint8_t at(int r, int c) const {
        return data[static_cast<std::size_t>(r) * width + c];
    }

    bool in_bounds(int r, int c) const {
        return r >= 0 && r < height && c >= 0 && c < width;
    }

    bool operator==(const Mask&) const = default;
};

// Coordinate-set view of a mask's 1-entries, row-major order, duplicate-free.
struct PixelSet {
    std::vector<std::pair<int, int>> coords;

    std::size_t size() const { return coords.size(); }
    bool empty() const { return coords.empty(); }
};

struct Pattern {
    Mask mask;
    ColorField colors;
};

inline long l0_norm(const Mask& m) {
    long n = 0;
    for (std::uint8_t v : m.data) n += v;
    return n;
}

inline PixelSet pixel_set(const Mask& m) {
    PixelSet ps;
    ps.coords.reserve(static_cast<std::size_t>(l0_norm(m)));
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c)
            if (m.at(r, c)) ps.coords.emplace_back(r, c);
    return ps;
}

inline Mask mask_of(const PixelSet& ps, int height, int width) {
    Mask m(height, width, 0);
    for (const auto& [r, c] : ps.coords) {
        if (!m.in_bounds(r, c))
            throw ValueError("pixel coordinate (" + std::to_string(r) + "," +
                             std::to_string(c) + ") out of range");
        m.at(r, c) = 1;
    }
    return m;
}

// x ⊕ P = (1-M)·x + M·T. Pixels with M=0 are copied bit-exactly.
inline Image apply_pattern(const Image& x, const Pattern& p) {
    if (!p.mask.data.size() || p.mask.height != x.height || p.mask.width != x.width)
        throw ShapeError("apply_pattern: mask/image dimensions differ");
    if (p.colors.height != x.height || p.colors.width != x.width)
        throw ShapeError("apply_pattern: colors/image dimensions differ");
    Image out = x;
    for (int r = 0; r < x.height; ++r) {
        for (int c = 0; c < x.width; ++c) {
            if (!p.mask.at(r, c)) continue;
            for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = p.colors.at(r, c, ch);
        }
    }
    return out;
}

}  // namespace asc
