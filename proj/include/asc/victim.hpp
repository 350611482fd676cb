#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/loss.hpp"

namespace asc {

struct Detection {
    Box bbox;
    double objectness = 0.0;  // in [0,1]
    std::string category = "object";
};

struct LossGrad {
    double loss = 0.0;
    Grad3 grad;                 // dJ/dx, same shape as the input image
    bool dead_gradient = false; // no matched box ever contributed
};

// Detector abstraction: detections plus loss gradients w.r.t. the input.
// Implementations must be deterministic functions of (weights, x).
class VictimModel {
public:
    virtual ~VictimModel() = default;

    virtual int input_height() const = 0;
    virtual int input_width() const = 0;

    virtual std::vector<Detection> detect(const Image& x) const = 0;
    virtual LossGrad loss_and_grad(const Image& x, const GroundTruth& gt,
                                   const LossSpec& loss) const = 0;
};

// Greedy non-maximum suppression. Candidates are taken by descending
// objectness (ties broken by list position, so the result is deterministic);
// a candidate is dropped when it overlaps an already-kept box above the
// threshold. Survivors are returned sorted by objectness, descending.
inline std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
    std::vector<std::size_t> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].objectness > dets[b].objectness;
    });
    std::vector<Detection> kept;
    for (std::size_t idx : order) {
        bool suppressed = false;
        for (const Detection& k : kept) {
            if (iou(dets[idx].bbox, k.bbox) > iou_threshold) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) kept.push_back(std::move(dets[idx]));
    }
    return kept;
}

struct SparseGradEntry {
    int r = 0, c = 0, ch = 0;
    double value = 0.0;
};

// Central finite differences of the loss at sampled coordinates. Test oracle
// for the analytic gradients; O(2 * samples) forward passes.
inline std::vector<SparseGradEntry> finite_diff_grad(const VictimModel& model, const Image& x,
                                                     const GroundTruth& gt, const LossSpec& loss,
                                                     double eps,
                                                     const std::vector<SparseGradEntry>& samples) {
    std::vector<SparseGradEntry> out;
    out.reserve(samples.size());
    for (const SparseGradEntry& s : samples) {
        Image plus = x, minus = x;
        plus.at(s.r, s.c, s.ch) += eps;
        minus.at(s.r, s.c, s.ch) -= eps;
        const double jp = model.loss_and_grad(plus, gt, loss).loss;
        const double jm = model.loss_and_grad(minus, gt, loss).loss;
        out.push_back({s.r, s.c, s.ch, (jp - jm) / (2.0 * eps)});
    }
    return out;
}

}  // namespace asc
