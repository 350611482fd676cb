#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asc/core.hpp"
#include "asc/rng.hpp"

namespace asc {

// Closed polygon, vertices as (row, col) in continuous pixel coordinates.
struct Polygon {
    std::vector<std::array<double, 2>> pts;
};

struct GroundTruth {
    Box bbox;                        // contains every polygon vertex
    std::vector<Polygon> polygons;   // instance segmentation
    long object_area = 0;            // l0 of the rasterized segmentation
    std::string category = "object";
};

struct PriorContour {
    Mask mask;
};

namespace detail {

// Squared distance from point p to segment ab.
inline double point_segment_dist2(double pr, double pc, double ar, double ac, double br,
                                  double bc) {
    const double dr = br - ar, dc = bc - ac;
    const double len2 = dr * dr + dc * dc;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((pr - ar) * dr + (pc - ac) * dc) / len2, 0.0, 1.0);
    const double qr = ar + t * dr - pr, qc = ac + t * dc - pc;
    return qr * qr + qc * qc;
}

// Even-odd point-in-polygon over all rings; points on any edge count inside.
inline bool point_in_polygons(const std::vector<Polygon>& polys, double pr, double pc) {
    constexpr double kEdgeEps2 = 1e-18;
    bool inside = false;
    for (const Polygon& poly : polys) {
        const auto& v = poly.pts;
        const std::size_t n = v.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            if (point_segment_dist2(pr, pc, v[j][0], v[j][1], v[i][0], v[i][1]) <= kEdgeEps2)
                return true;
            const bool crosses = (v[i][0] > pr) != (v[j][0] > pr);
            if (crosses) {
                const double col_at = v[j][1] + (pr - v[j][0]) / (v[i][0] - v[j][0]) *
                                                    (v[i][1] - v[j][1]);
                if (pc < col_at) inside = !inside;
            }
        }
    }
    return inside;
}

inline Mask dilate4(const Mask& m) {
    Mask out = m;
    for (int r = 0; r < m.height; ++r) {
        for (int c = 0; c < m.width; ++c) {
            if (!m.at(r, c)) continue;
            if (r > 0) out.at(r - 1, c) = 1;
            if (r + 1 < m.height) out.at(r + 1, c) = 1;
            if (c > 0) out.at(r, c - 1) = 1;
            if (c + 1 < m.width) out.at(r, c + 1) = 1;
        }
    }
    return out;
}

// Keeps exactly `keep` of `n` list positions, evenly strided, phase seeded.
inline std::vector<bool> stride_keep(std::size_t n, std::size_t keep, std::uint64_t seed) {
    std::vector<bool> kept(n, false);
    if (keep >= n) {
        kept.assign(n, true);
        return kept;
    }
    if (keep == 0) return kept;
    Rng rng(seed ^ 0x5b1dll);
    const std::size_t phase = rng.index(n);
    std::size_t acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        acc += keep;
        if (acc >= n) {
            acc -= n;
            kept[(phase + j) % n] = true;
        }
    }
    return kept;
}

}  // namespace detail

// Fills polygon interiors (even-odd rule, pixel centers at integer
// coordinates, edges inclusive). Vertices outside the canvas are fine; only
// in-canvas pixels are produced.
inline Mask rasterize_polygon(const std::vector<Polygon>& polys, int height, int width) {
    for (const Polygon& p : polys)
        if (p.pts.size() < 3)
            throw ValueError("degenerate polygon: fewer than 3 vertices");
    Mask m(height, width, 0);
    if (polys.empty()) return m;

    // Restrict the scan to the vertex bbox (clamped to canvas).
    double rmin = 1e300, rmax = -1e300, cmin = 1e300, cmax = -1e300;
    for (const Polygon& p : polys) {
        for (const auto& v : p.pts) {
            rmin = std::min(rmin, v[0]);
            rmax = std::max(rmax, v[0]);
            cmin = std::min(cmin, v[1]);
            cmax = std::max(cmax, v[1]);
        }
    }
    if (rmax < 0 || cmax < 0 || rmin > height - 1 || cmin > width - 1) return m;
    const int r0 = std::max(0, static_cast<int>(std::floor(rmin)));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(rmax)));
    const int c0 = std::max(0, static_cast<int>(std::floor(cmin)));
    const int c1 = std::min(width - 1, static_cast<int>(std::ceil(cmax)));

    for (int r = r0; r <= r1; ++r)
        for (int c = c0; c <= c1; ++c)
            if (detail::point_in_polygons(polys, r, c)) m.at(r, c) = 1;
    return m;
}

// Inner 4-connectivity boundary: segmentation pixels with at least one
// 4-neighbor outside the segmentation (the image border counts as outside).
inline PriorContour extract_boundary(const Mask& seg) {
    if (l0_norm(seg) == 0) throw ValueError("extract_boundary: empty segmentation");
    Mask out(seg.height, seg.width, 0);
    for (int r = 0; r < seg.height; ++r) {
        for (int c = 0; c < seg.width; ++c) {
            if (!seg.at(r, c)) continue;
            const bool edge = r == 0 || r == seg.height - 1 || c == 0 || c == seg.width - 1 ||
                              !seg.at(r - 1, c) || !seg.at(r + 1, c) || !seg.at(r, c - 1) ||
                              !seg.at(r, c + 1);
            if (edge) out.at(r, c) = 1;
        }
    }
    return PriorContour{out};
}

// Fits a mask to an l0 budget. Over budget: drop pixels by uniform stride
// along row-major traversal (seeded phase). Under budget: thicken by repeated
// one-pixel dilation restricted to `seg`, keeping all original pixels and
// stride-pruning only the added ones.
inline Mask fit_budget(const Mask& m, const Mask& seg, long budget, std::uint64_t seed) {
    if (budget < 1) throw ValueError("fit_budget: budget must be >= 1");
    if (m.height != seg.height || m.width != seg.width)
        throw ShapeError("fit_budget: mask/segmentation dimensions differ");
    const long n = l0_norm(m);
    if (n == budget) return m;

    if (n > budget) {
        const PixelSet ps = pixel_set(m);
        const std::vector<bool> kept =
            detail::stride_keep(ps.coords.size(), static_cast<std::size_t>(budget), seed);
        Mask out(m.height, m.width, 0);
        for (std::size_t i = 0; i < ps.coords.size(); ++i)
            if (kept[i]) out.at(ps.coords[i].first, ps.coords[i].second) = 1;
        return out;
    }

    Mask grown = m;
    long count = n;
    while (count < budget) {
        Mask next = detail::dilate4(grown);
        for (std::size_t i = 0; i < next.data.size(); ++i) next.data[i] &= seg.data[i];
        const long next_count = l0_norm(next);
        if (next_count == count) break;  // segmentation saturated
        grown = next;
        count = next_count;
    }
    if (count <= budget) return grown;

    // Prune among added pixels only; the original mask is preserved.
    std::vector<std::pair<int, int>> added;
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c)
            if (grown.at(r, c) && !m.at(r, c)) added.emplace_back(r, c);
    const std::vector<bool> kept =
        detail::stride_keep(added.size(), static_cast<std::size_t>(budget - n), seed);
    Mask out = m;
    for (std::size_t i = 0; i < added.size(); ++i)
        if (kept[i]) out.at(added[i].first, added[i].second) = 1;
    return out;
}

// l0 budget for an object: floor(fraction * object_area), at least 1 pixel.
inline long budget_pixels(const GroundTruth& gt, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw ValueError("budget_pixels: fraction must be in (0,1]");
    const long b = static_cast<long>(std::floor(fraction * static_cast<double>(gt.object_area)));
    return std::max(1L, b);
}

inline Mask rasterize_gt(const GroundTruth& gt, int height, int width) {
    return rasterize_polygon(gt.polygons, height, width);
}

}  // namespace asc
