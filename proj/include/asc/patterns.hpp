#pragma once

#include <cmath>
#include <string>

#include "asc/contour.hpp"
#include "asc/core.hpp"

namespace asc {
namespace detail {

struct PixelRect {
    int r0, c0, r1, c1;  // inclusive
    bool empty() const { return r0 > r1 || c0 > c1; }
};

// Integer pixel rect covered by the bbox, clipped to the canvas.
inline PixelRect bbox_pixel_rect(const Box& b, int height, int width) {
    PixelRect r;
    r.r0 = std::max(0, static_cast<int>(std::floor(b.r0)));
    r.c0 = std::max(0, static_cast<int>(std::floor(b.c0)));
    r.r1 = std::min(height - 1, static_cast<int>(std::ceil(b.r1)) - 1);
    r.c1 = std::min(width - 1, static_cast<int>(std::ceil(b.c1)) - 1);
    return r;
}

inline void paint_square(Mask& m, const PixelRect& clip, int center_r, int center_c, int side) {
    const int r0 = center_r - side / 2;
    const int c0 = center_c - side / 2;
    for (int r = std::max(r0, clip.r0); r <= std::min(r0 + side - 1, clip.r1); ++r)
        for (int c = std::max(c0, clip.c0); c <= std::min(c0 + side - 1, clip.c1); ++c)
            m.at(r, c) = 1;
}

inline Mask stride_prune_mask(const Mask& m, long budget) {
    const long n = l0_norm(m);
    if (n <= budget) return m;
    const PixelSet ps = pixel_set(m);
    const std::vector<bool> kept =
        stride_keep(ps.coords.size(), static_cast<std::size_t>(budget), /*seed=*/0);
    Mask out(m.height, m.width, 0);
    for (std::size_t i = 0; i < ps.coords.size(); ++i)
        if (kept[i]) out.at(ps.coords[i].first, ps.coords[i].second) = 1;
    return out;
}

inline Mask grid2x2_lattice(const PixelRect& rect, int height, int width, int thickness) {
    Mask m(height, width, 0);
    if (rect.empty()) return m;
    const int mid_r = (rect.r0 + rect.r1) / 2;
    const int mid_c = (rect.c0 + rect.c1) / 2;
    const int band_starts_r[3] = {rect.r0, mid_r - thickness / 2, rect.r1 - thickness + 1};
    const int band_starts_c[3] = {rect.c0, mid_c - thickness / 2, rect.c1 - thickness + 1};
    for (int s : band_starts_r)
        for (int r = std::max(s, rect.r0); r <= std::min(s + thickness - 1, rect.r1); ++r)
            for (int c = rect.c0; c <= rect.c1; ++c) m.at(r, c) = 1;
    for (int s : band_starts_c)
        for (int c = std::max(s, rect.c0); c <= std::min(s + thickness - 1, rect.c1); ++c)
            for (int r = rect.r0; r <= rect.r1; ++r) m.at(r, c) = 1;
    return m;
}

}  // namespace detail

// One square of side floor(sqrt(budget)) at the bbox center.
inline Mask adv_patch(const GroundTruth& gt, long budget, int height, int width) {
    if (budget < 1) throw ValueError("adv_patch: budget must be >= 1");
    const detail::PixelRect rect = detail::bbox_pixel_rect(gt.bbox, height, width);
    Mask m(height, width, 0);
    const int side = static_cast<int>(std::floor(std::sqrt(static_cast<double>(budget))));
    detail::paint_square(m, rect, static_cast<int>(std::lround(gt.bbox.center_row())),
                         static_cast<int>(std::lround(gt.bbox.center_col())), side);
    return m;
}

// Four squares of side floor(sqrt(budget/4)) at the bbox quadrant centers.
inline Mask four_patch(const GroundTruth& gt, long budget, int height, int width) {
    if (budget < 4) throw ValueError("four_patch: budget must be >= 4");
    const detail::PixelRect rect = detail::bbox_pixel_rect(gt.bbox, height, width);
    Mask m(height, width, 0);
    const int side = static_cast<int>(std::floor(std::sqrt(budget / 4.0)));
    const double qr = gt.bbox.height() / 4.0, qc = gt.bbox.width() / 4.0;
    for (int sr : {-1, 1}) {
        for (int sc : {-1, 1}) {
            const int cr = static_cast<int>(std::lround(gt.bbox.center_row() + sr * qr));
            const int cc = static_cast<int>(std::lround(gt.bbox.center_col() + sc * qc));
            detail::paint_square(m, rect, cr, cc, side);
        }
    }
    return m;
}

// Lattice splitting the bbox into 2x2 cells: two border lines plus one
// midline each way, at the thickest line width that stays within budget.
inline Mask grid_2x2(const GroundTruth& gt, long budget, int height, int width) {
    if (budget < 1) throw ValueError("grid_2x2: budget must be >= 1");
    const detail::PixelRect rect = detail::bbox_pixel_rect(gt.bbox, height, width);
    if (rect.empty()) return Mask(height, width, 0);
    Mask best = detail::grid2x2_lattice(rect, height, width, 1);
    const int max_t = std::max(rect.r1 - rect.r0, rect.c1 - rect.c0) + 1;
    for (int t = 2; t <= max_t; ++t) {
        Mask cand = detail::grid2x2_lattice(rect, height, width, t);
        const long n = l0_norm(cand);
        if (n > budget) break;
        if (n == l0_norm(best)) break;  // bbox saturated
        best = std::move(cand);
    }
    return detail::stride_prune_mask(best, budget);
}

// k x k lattice of 2x2 pixel squares spread evenly over the bbox, with
// k the largest integer such that 4k^2 <= budget.
inline Mask small_grid(const GroundTruth& gt, long budget, int height, int width) {
    if (budget < 1) throw ValueError("small_grid: budget must be >= 1");
    const detail::PixelRect rect = detail::bbox_pixel_rect(gt.bbox, height, width);
    Mask m(height, width, 0);
    if (rect.empty()) return m;
    const int mid_r = (rect.r0 + rect.r1) / 2;
    const int mid_c = (rect.c0 + rect.c1) / 2;
    if (budget < 4) {
        if (m.in_bounds(mid_r, mid_c)) m.at(mid_r, mid_c) = 1;
        return m;
    }
    const int k = static_cast<int>(std::floor(std::sqrt(budget / 4.0)));
    const int span_r = rect.r1 - rect.r0 - 1;  // anchors so the 2x2 fits
    const int span_c = rect.c1 - rect.c0 - 1;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            int ar = (k == 1) ? mid_r : rect.r0 + static_cast<int>(std::lround(
                                            i * std::max(0, span_r) / double(k - 1)));
            int ac = (k == 1) ? mid_c : rect.c0 + static_cast<int>(std::lround(
                                            j * std::max(0, span_c) / double(k - 1)));
            for (int r = std::max(ar, rect.r0); r <= std::min(ar + 1, rect.r1); ++r)
                for (int c = std::max(ac, rect.c0); c <= std::min(ac + 1, rect.c1); ++c)
                    m.at(r, c) = 1;
        }
    }
    return m;
}

// Horizontal plus vertical chord of the segmentation through its centroid,
// thickened (within the segmentation) or pruned to meet the budget.
inline Mask strip(const GroundTruth& gt, const Mask& seg, long budget) {
    (void)gt;
    if (budget < 1) throw ValueError("strip: budget must be >= 1");
    const long n = l0_norm(seg);
    if (n == 0) throw ValueError("strip: empty segmentation");

    double sum_r = 0, sum_c = 0;
    std::vector<long> row_counts(seg.height, 0), col_counts(seg.width, 0);
    for (int r = 0; r < seg.height; ++r) {
        for (int c = 0; c < seg.width; ++c) {
            if (!seg.at(r, c)) continue;
            sum_r += r;
            sum_c += c;
            ++row_counts[r];
            ++col_counts[c];
        }
    }
    const int cen_r = static_cast<int>(std::lround(sum_r / n));
    const int cen_c = static_cast<int>(std::lround(sum_c / n));

    // Nearest row/col that actually intersects the segmentation.
    auto nearest_occupied = [](const std::vector<long>& counts, int from) {
        for (int d = 0; d < static_cast<int>(counts.size()); ++d) {
            if (from - d >= 0 && counts[from - d] > 0) return from - d;
            if (from + d < static_cast<int>(counts.size()) && counts[from + d] > 0)
                return from + d;
        }
        return from;
    };
    const int row = nearest_occupied(row_counts, std::clamp(cen_r, 0, seg.height - 1));
    const int col = nearest_occupied(col_counts, std::clamp(cen_c, 0, seg.width - 1));

    Mask cross(seg.height, seg.width, 0);
    for (int c = 0; c < seg.width; ++c)
        if (seg.at(row, c)) cross.at(row, c) = 1;
    for (int r = 0; r < seg.height; ++r)
        if (seg.at(r, col)) cross.at(r, col) = 1;
    return fit_budget(cross, seg, budget, /*seed=*/0);
}

}  // namespace asc
