#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/rng.hpp"

namespace asc {

struct Scene {
    long id = 0;
    Image image;
    std::vector<GroundTruth> objects;  // objects[0] is the designated target
};

namespace detail {

inline constexpr int kSceneSize = 64;

struct PlacedShape {
    int kind;  // 0 ellipse, 1 rectangle, 2 triangle
    double cr, cc, half_r, half_c;
    std::array<double, 3> color;
};

inline Polygon shape_polygon(const PlacedShape& s) {
    Polygon poly;
    if (s.kind == 0) {
        const int kVerts = 24;
        for (int i = 0; i < kVerts; ++i) {
            const double th = 2.0 * 3.14159265358979323846 * i / kVerts;
            poly.pts.push_back({s.cr + s.half_r * std::sin(th), s.cc + s.half_c * std::cos(th)});
        }
    } else if (s.kind == 1) {
        poly.pts = {{s.cr - s.half_r, s.cc - s.half_c},
                    {s.cr - s.half_r, s.cc + s.half_c},
                    {s.cr + s.half_r, s.cc + s.half_c},
                    {s.cr + s.half_r, s.cc - s.half_c}};
    } else {
        poly.pts = {{s.cr - s.half_r, s.cc},
                    {s.cr + s.half_r, s.cc + s.half_c},
                    {s.cr + s.half_r, s.cc - s.half_c}};
    }
    return poly;
}

// Low-frequency value noise: coarse lattice, bilinear upsample.
inline std::vector<double> coarse_noise(Rng& rng, int size, int cells, double lo, double hi) {
    const int lattice = cells + 1;
    std::vector<double> knots(static_cast<std::size_t>(lattice) * lattice);
    for (double& v : knots) v = rng.uniform(lo, hi);
    std::vector<double> out(static_cast<std::size_t>(size) * size);
    const double scale = static_cast<double>(cells) / size;
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const double fr = r * scale, fc = c * scale;
            const int ir = std::min(static_cast<int>(fr), cells - 1);
            const int ic = std::min(static_cast<int>(fc), cells - 1);
            const double tr = fr - ir, tc = fc - ic;
            const double v00 = knots[static_cast<std::size_t>(ir) * lattice + ic];
            const double v01 = knots[static_cast<std::size_t>(ir) * lattice + ic + 1];
            const double v10 = knots[static_cast<std::size_t>(ir + 1) * lattice + ic];
            const double v11 = knots[static_cast<std::size_t>(ir + 1) * lattice + ic + 1];
            out[static_cast<std::size_t>(r) * size + c] =
                (1 - tr) * ((1 - tc) * v00 + tc * v01) + tr * ((1 - tc) * v10 + tc * v11);
        }
    }
    return out;
}

}  // namespace detail

// Renders one 64x64 scene: 1-3 shaded shapes with distinct saturated hues on
// a textured gray background. Shapes are drawn from their own polygons, so
// each ground-truth segmentation matches the rendered mask exactly.
inline Scene gen_scene(long id, Rng& rng) {
    using detail::kSceneSize;
    Scene scene;
    scene.id = id;
    scene.image = Image(kSceneSize, kSceneSize);

    const std::vector<double> base =
        detail::coarse_noise(rng, kSceneSize, 8, 0.35, 0.60);
    const double tint_r = rng.uniform(-0.04, 0.04);
    const double tint_b = rng.uniform(-0.04, 0.04);
    for (int r = 0; r < kSceneSize; ++r) {
        for (int c = 0; c < kSceneSize; ++c) {
            const double v = base[static_cast<std::size_t>(r) * kSceneSize + c] +
                             rng.uniform(-0.03, 0.03);
            scene.image.at(r, c, 0) = std::clamp(v + tint_r, 0.0, 1.0);
            scene.image.at(r, c, 1) = std::clamp(v, 0.0, 1.0);
            scene.image.at(r, c, 2) = std::clamp(v + tint_b, 0.0, 1.0);
        }
    }

    static const std::array<std::array<double, 3>, 8> kPalette = {{{0.85, 0.10, 0.10},
                                                                   {0.10, 0.75, 0.15},
                                                                   {0.15, 0.20, 0.90},
                                                                   {0.90, 0.75, 0.10},
                                                                   {0.80, 0.15, 0.80},
                                                                   {0.10, 0.80, 0.80},
                                                                   {0.95, 0.50, 0.15},
                                                                   {0.55, 0.10, 0.90}}};
    std::vector<std::size_t> palette_order(kPalette.size());
    for (std::size_t i = 0; i < palette_order.size(); ++i) palette_order[i] = i;
    rng.shuffle(palette_order);

    const int want = 1 + static_cast<int>(rng.below(3));
    std::vector<detail::PlacedShape> placed;
    for (int obj = 0; obj < want; ++obj) {
        for (int attempt = 0; attempt < 40; ++attempt) {
            detail::PlacedShape s;
            s.kind = static_cast<int>(rng.below(3));
            // Minimum sizes keep 3.5% of the object area at >= 4 pixels.
            const double lo = (s.kind == 2) ? 8.0 : (s.kind == 0 ? 6.5 : 5.5);
            s.half_r = rng.uniform(lo, 10.0);
            s.half_c = rng.uniform(lo, 10.0);
            s.cr = rng.uniform(s.half_r + 1.5, kSceneSize - 1.5 - s.half_r);
            s.cc = rng.uniform(s.half_c + 1.5, kSceneSize - 1.5 - s.half_c);
            s.color = kPalette[palette_order[placed.size() % kPalette.size()]];

            bool clear = true;
            for (const detail::PlacedShape& q : placed) {
                const bool apart = s.cr + s.half_r + 2 < q.cr - q.half_r ||
                                   q.cr + q.half_r + 2 < s.cr - s.half_r ||
                                   s.cc + s.half_c + 2 < q.cc - q.half_c ||
                                   q.cc + q.half_c + 2 < s.cc - s.half_c;
                if (!apart) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;

            const Polygon poly = detail::shape_polygon(s);
            const Mask raster = rasterize_polygon({poly}, kSceneSize, kSceneSize);
            const long area = l0_norm(raster);
            if (area < 64) continue;

            for (int r = 0; r < kSceneSize; ++r) {
                for (int c = 0; c < kSceneSize; ++c) {
                    if (!raster.at(r, c)) continue;
                    const double dr = (r - s.cr) / s.half_r;
                    const double dc = (c - s.cc) / s.half_c;
                    const double shade = 1.0 - 0.35 * std::min(dr * dr + dc * dc, 1.0);
                    for (int ch = 0; ch < 3; ++ch)
                        scene.image.at(r, c, ch) = std::clamp(
                            s.color[ch] * shade + rng.uniform(-0.02, 0.02), 0.0, 1.0);
                }
            }

            GroundTruth gt;
            gt.polygons = {poly};
            double rmin = 1e9, rmax = -1e9, cmin = 1e9, cmax = -1e9;
            for (const auto& v : poly.pts) {
                rmin = std::min(rmin, v[0]);
                rmax = std::max(rmax, v[0]);
                cmin = std::min(cmin, v[1]);
                cmax = std::max(cmax, v[1]);
            }
            gt.bbox = {rmin, cmin, rmax, cmax};
            gt.object_area = area;
            gt.category = "object";
            scene.objects.push_back(std::move(gt));
            placed.push_back(s);
            break;
        }
    }

    if (scene.objects.empty()) {
        // Vanishingly unlikely given 40 placement attempts; keep the scene
        // well-formed by forcing a centered rectangle.
        detail::PlacedShape s{1, 32.0, 32.0, 8.0, 8.0, kPalette[palette_order[0]]};
        const Polygon poly = detail::shape_polygon(s);
        const Mask raster = rasterize_polygon({poly}, kSceneSize, kSceneSize);
        for (const auto& [r, c] : pixel_set(raster).coords)
            for (int ch = 0; ch < 3; ++ch) scene.image.at(r, c, ch) = s.color[ch];
        GroundTruth gt;
        gt.polygons = {poly};
        gt.bbox = {s.cr - s.half_r, s.cc - s.half_c, s.cr + s.half_r, s.cc + s.half_c};
        gt.object_area = l0_norm(raster);
        scene.objects.push_back(std::move(gt));
    }
    return scene;
}

// Deterministic per (n, seed); each scene draws from its own stream, so
// scene i is identical no matter how many scenes surround it.
inline std::vector<Scene> gen_scenes(long n, std::uint64_t seed) {
    if (n < 1) throw ValueError("gen_scenes: n must be >= 1");
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
        scenes.push_back(gen_scene(i, rng));
    }
    return scenes;
}

}  // namespace asc
