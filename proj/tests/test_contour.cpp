#include <catch2/catch_amalgamated.hpp>

#include "asc/contour.hpp"
#include "asc/rng.hpp"
#include "support/helpers.hpp"

using asc::GroundTruth;
using asc::Mask;
using asc::Polygon;

namespace {

// Independent point-in-polygon oracle: crossing count along the +row ray
// (the implementation casts along +col), plus exact edge inclusion.
bool oracle_inside(const std::vector<Polygon>& polys, double pr, double pc) {
    bool inside = false;
    for (const Polygon& poly : polys) {
        const auto& v = poly.pts;
        for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
            if (asc::detail::point_segment_dist2(pr, pc, v[j][0], v[j][1], v[i][0], v[i][1]) <=
                1e-18)
                return true;
            if ((v[i][1] > pc) != (v[j][1] > pc)) {
                const double row_at =
                    v[j][0] + (pc - v[j][1]) / (v[i][1] - v[j][1]) * (v[i][0] - v[j][0]);
                if (pr < row_at) inside = !inside;
            }
        }
    }
    return inside;
}

Mask oracle_raster(const std::vector<Polygon>& polys, int h, int w) {
    Mask m(h, w, 0);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if (oracle_inside(polys, r, c)) m.at(r, c) = 1;
    return m;
}

}  // namespace

TEST_CASE("rasterize_polygon: axis-aligned square fills 16 pixels") {
    Polygon sq;
    sq.pts = {{1, 1}, {1, 4}, {4, 4}, {4, 1}};
    const Mask m = asc::rasterize_polygon({sq}, 6, 6);
    REQUIRE(asc::l0_norm(m) == 16);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            REQUIRE(m.at(r, c) == ((r >= 1 && r <= 4 && c >= 1 && c <= 4) ? 1 : 0));
}

TEST_CASE("rasterize_polygon: polygon fully outside the canvas") {
    Polygon sq;
    sq.pts = {{10, 10}, {10, 14}, {14, 14}, {14, 10}};
    REQUIRE(asc::l0_norm(asc::rasterize_polygon({sq}, 6, 6)) == 0);
}

TEST_CASE("rasterize_polygon: right triangle matches center-sampling oracle") {
    Polygon tri;
    tri.pts = {{0, 0}, {0, 4}, {4, 0}};
    const Mask m = asc::rasterize_polygon({tri}, 6, 6);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            REQUIRE(m.at(r, c) == ((r + c <= 4) ? 1 : 0));
    REQUIRE(m == oracle_raster({tri}, 6, 6));
}

TEST_CASE("rasterize_polygon: degenerate polygon rejected") {
    Polygon line;
    line.pts = {{0, 0}, {3, 3}};
    REQUIRE_THROWS_AS(asc::rasterize_polygon({line}, 6, 6), asc::ValueError);
}

TEST_CASE("rasterize_polygon agrees with the oracle on random convex shapes") {
    asc::Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        // random ellipse-ish polygon
        Polygon poly;
        const double cr = rng.uniform(6, 18), cc = rng.uniform(6, 18);
        const double ar = rng.uniform(2, 6), ac = rng.uniform(2, 6);
        const int verts = 3 + static_cast<int>(rng.below(9));
        for (int i = 0; i < verts; ++i) {
            const double th = 2 * 3.14159265358979 * i / verts;
            poly.pts.push_back({cr + ar * std::sin(th), cc + ac * std::cos(th)});
        }
        REQUIRE(asc::rasterize_polygon({poly}, 24, 24) == oracle_raster({poly}, 24, 24));
    }
}

TEST_CASE("extract_boundary: 3x3 block keeps all but the center") {
    Mask seg(5, 5, 0);
    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 3; ++c) seg.at(r, c) = 1;
    const Mask b = asc::extract_boundary(seg).mask;
    REQUIRE(asc::l0_norm(b) == 8);
    REQUIRE(b.at(2, 2) == 0);
}

TEST_CASE("extract_boundary: single pixel and full canvas") {
    Mask one(4, 4, 0);
    one.at(2, 1) = 1;
    REQUIRE(asc::extract_boundary(one).mask == one);

    const Mask full(5, 7, 1);
    const Mask ring = asc::extract_boundary(full).mask;
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 7; ++c) {
            const bool border = r == 0 || r == 4 || c == 0 || c == 6;
            REQUIRE(ring.at(r, c) == (border ? 1 : 0));
        }
}

TEST_CASE("extract_boundary rejects empty segmentation") {
    REQUIRE_THROWS_AS(asc::extract_boundary(Mask(4, 4, 0)), asc::ValueError);
}

TEST_CASE("extract_boundary: exact neighbor characterization on random shapes") {
    asc::Rng rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        Mask seg = testutil::random_mask(12, 12, 0.5, rng);
        if (asc::l0_norm(seg) == 0) seg.at(0, 0) = 1;
        const Mask b = asc::extract_boundary(seg).mask;
        for (int r = 0; r < 12; ++r)
            for (int c = 0; c < 12; ++c) {
                if (!seg.at(r, c)) {
                    REQUIRE(b.at(r, c) == 0);
                    continue;
                }
                const bool outside_neighbor = r == 0 || r == 11 || c == 0 || c == 11 ||
                                              !seg.at(r - 1, c) || !seg.at(r + 1, c) ||
                                              !seg.at(r, c - 1) || !seg.at(r, c + 1);
                REQUIRE(b.at(r, c) == (outside_neighbor ? 1 : 0));
            }
    }
}

TEST_CASE("fit_budget: feasible mask unchanged") {
    asc::Rng rng(3);
    Mask seg(8, 8, 1);
    Mask m(8, 8, 0);
    for (int i = 0; i < 10; ++i) m.at(static_cast<int>(rng.below(8)), static_cast<int>(rng.below(8))) = 1;
    const long n = asc::l0_norm(m);
    REQUIRE(asc::fit_budget(m, seg, n, 42) == m);
    REQUIRE(asc::fit_budget(m, seg, n + 5, 42) != m);  // thickens toward the budget
}

TEST_CASE("fit_budget: shrink picks a subset of the original") {
    asc::Rng rng(5);
    Mask seg(20, 20, 1);
    Mask m(20, 20, 0);
    while (asc::l0_norm(m) < 100)
        m.at(static_cast<int>(rng.below(20)), static_cast<int>(rng.below(20))) = 1;
    const Mask out = asc::fit_budget(m, seg, 50, 7);
    REQUIRE(asc::l0_norm(out) == 50);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c)
            if (out.at(r, c)) REQUIRE(m.at(r, c) == 1);
}

TEST_CASE("fit_budget: thicken keeps the original and stays inside seg") {
    // thin 40-pixel contour inside a large blob
    Mask seg(20, 20, 0);
    for (int r = 2; r < 18; ++r)
        for (int c = 2; c < 18; ++c) seg.at(r, c) = 1;
    Mask thin(20, 20, 0);
    int placed = 0;
    for (int c = 2; c < 18 && placed < 40; ++c, ++placed) thin.at(5, c) = 1;
    for (int r = 6; r < 18 && placed < 40; ++r, ++placed) thin.at(r, 9) = 1;
    for (int c = 3; c < 17 && placed < 40; ++c, ++placed) thin.at(12, c) = 1;
    REQUIRE(asc::l0_norm(thin) == 40);

    const Mask out = asc::fit_budget(thin, seg, 120, 11);
    REQUIRE(asc::l0_norm(out) <= 120);
    REQUIRE(asc::l0_norm(out) > 40);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c) {
            if (thin.at(r, c)) REQUIRE(out.at(r, c) == 1);  // superset
            if (out.at(r, c)) REQUIRE(seg.at(r, c) == 1);   // inside seg
        }
}

TEST_CASE("fit_budget: deterministic for a fixed seed, rejects budget < 1") {
    asc::Rng rng(9);
    const Mask seg(16, 16, 1);
    const Mask m = testutil::random_mask(16, 16, 0.4, rng);
    REQUIRE(asc::fit_budget(m, seg, 20, 123) == asc::fit_budget(m, seg, 20, 123));
    REQUIRE_THROWS_AS(asc::fit_budget(m, seg, 0, 1), asc::ValueError);
}

TEST_CASE("fit_budget: saturated segmentation caps the growth") {
    Mask seg(6, 6, 0);
    for (int r = 2; r <= 3; ++r)
        for (int c = 2; c <= 3; ++c) seg.at(r, c) = 1;
    Mask m(6, 6, 0);
    m.at(2, 2) = 1;
    const Mask out = asc::fit_budget(m, seg, 100, 0);
    REQUIRE(asc::l0_norm(out) == 4);  // all of seg, still <= budget
}

TEST_CASE("budget_pixels: paper budgets and the floor/min edge") {
    GroundTruth gt;
    gt.object_area = 1000;
    REQUIRE(asc::budget_pixels(gt, 0.05) == 50);
    REQUIRE(asc::budget_pixels(gt, 0.035) == 35);
    gt.object_area = 10;
    REQUIRE(asc::budget_pixels(gt, 0.035) == 1);
    REQUIRE_THROWS_AS(asc::budget_pixels(gt, 0.0), asc::ValueError);
    REQUIRE_THROWS_AS(asc::budget_pixels(gt, 1.5), asc::ValueError);
}
