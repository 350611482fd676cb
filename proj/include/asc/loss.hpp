#pragma once

#include <cmath>
#include <vector>

#include "asc/core.hpp"

namespace asc {

struct LossSpec {
    enum class Kind { Disappear };
    Kind kind = Kind::Disappear;
    double iou_match_threshold = 0.5;

    void validate() const {
        if (!(iou_match_threshold > 0.0) || !(iou_match_threshold < 1.0))
            throw ValueError("LossSpec: iou_match_threshold must be in (0,1)");
    }
};

// Objectness scores below this are treated as already-background; the log is
// clamped so the loss stays finite.
inline constexpr double kObjectnessFloor = 1e-12;

// Disappearing loss J = -sum_i log(p_i) over the matched candidate boxes.
// Maximizing J drives every matched objectness toward zero. Empty match set
// gives J = 0.
inline double disappear_loss(const std::vector<double>& matched_objectness) {
    double j = 0.0;
    for (double p : matched_objectness) j -= std::log(std::max(p, kObjectnessFloor));
    return j;
}

}  // namespace asc
