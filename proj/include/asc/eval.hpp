#pragma once

#include <vector>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/victim.hpp"

namespace asc {

// Detection criterion: some prediction overlaps the ground truth with
// IoU above 0.5 AND has confidence above 0.5. Both inequalities are strict;
// ties count as not detected.
inline bool is_detected(const std::vector<Detection>& dets, const GroundTruth& gt,
                        double iou_threshold = 0.5, double conf_threshold = 0.5) {
    for (const Detection& det : dets)
        if (iou(det.bbox, gt.bbox) > iou_threshold && det.objectness > conf_threshold)
            return true;
    return false;
}

// Successful Detection Rate: fraction of images still detected.
inline double sdr(const std::vector<bool>& per_image_detected) {
    if (per_image_detected.empty()) return 0.0;
    long n = 0;
    for (bool d : per_image_detected) n += d;
    return static_cast<double>(n) / static_cast<double>(per_image_detected.size());
}

}  // namespace asc
