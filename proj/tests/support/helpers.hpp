#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/rng.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("asc_test_" + tag + "_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline asc::Image gray_image(int h, int w, double v) { return asc::Image(h, w, v); }

inline asc::Mask mask_from_coords(int h, int w,
                                  const std::vector<std::pair<int, int>>& coords) {
    asc::Mask m(h, w, 0);
    for (const auto& [r, c] : coords) m.at(r, c) = 1;
    return m;
}

inline asc::Mask random_mask(int h, int w, double density, asc::Rng& rng) {
    asc::Mask m(h, w, 0);
    for (auto& v : m.data) v = rng.chance(density) ? 1 : 0;
    return m;
}

// Axis-aligned rectangular ground truth covering [r0,r1) x [c0,c1).
inline asc::GroundTruth rect_gt(double r0, double c0, double r1, double c1, int canvas_h,
                                int canvas_w) {
    asc::GroundTruth gt;
    asc::Polygon poly;
    poly.pts = {{r0, c0}, {r0, c1}, {r1, c1}, {r1, c0}};
    gt.polygons = {poly};
    gt.bbox = {r0, c0, r1, c1};
    gt.object_area = asc::l0_norm(asc::rasterize_polygon({poly}, canvas_h, canvas_w));
    return gt;
}

}  // namespace testutil
