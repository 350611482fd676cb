#pragma once

// Umbrella header for the contour-prior sparse attack toolkit.

#include "asc/attack.hpp"
#include "asc/bench.hpp"
#include "asc/coco.hpp"
#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/eval.hpp"
#include "asc/image_io.hpp"
#include "asc/log.hpp"
#include "asc/patterns.hpp"
#include "asc/result_io.hpp"
#include "asc/rng.hpp"
#include "asc/scenes.hpp"
#include "asc/tiny_detector.hpp"
#include "asc/train.hpp"
#include "asc/victim.hpp"
