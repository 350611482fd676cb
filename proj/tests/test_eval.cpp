#include <catch2/catch_amalgamated.hpp>

#include "asc/eval.hpp"
#include "asc/rng.hpp"
#include "support/helpers.hpp"

using asc::Box;
using asc::Detection;
using asc::GroundTruth;

TEST_CASE("iou: area-arithmetic example") {
    const Box a{0, 0, 10, 10}, b{5, 5, 15, 15};
    REQUIRE_THAT(asc::iou(a, b), Catch::Matchers::WithinAbs(1.0 / 7.0, 1e-12));
}

TEST_CASE("iou: identity, disjoint, degenerate") {
    const Box b{2, 3, 9, 11};
    REQUIRE(asc::iou(b, b) == 1.0);
    REQUIRE(asc::iou({0, 0, 4, 4}, {10, 10, 12, 12}) == 0.0);
    const Box degenerate{5, 5, 5, 9};
    REQUIRE(asc::iou(degenerate, b) == 0.0);
    REQUIRE(asc::iou(degenerate, degenerate) == 0.0);
}

TEST_CASE("iou: symmetry and range on 1000 random pairs") {
    asc::Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        auto random_box = [&]() {
            const double r0 = rng.uniform(-10, 50), c0 = rng.uniform(-10, 50);
            return Box{r0, c0, r0 + rng.uniform(0.0, 30), c0 + rng.uniform(0.0, 30)};
        };
        const Box a = random_box(), b = random_box();
        const double ab = asc::iou(a, b), ba = asc::iou(b, a);
        REQUIRE(ab == ba);
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0);
    }
}

TEST_CASE("is_detected: strict thresholds on both IoU and confidence") {
    GroundTruth gt;
    gt.bbox = {0, 0, 10, 10};

    auto det = [](Box b, double conf) { return Detection{b, conf, "object"}; };
    const Box good{0, 0, 10, 10};   // IoU 1.0
    const Box ok{2, 0, 12, 10};     // IoU 8/12 = 0.667
    const Box half{5, 0, 15, 10};   // IoU 5/15 = 0.333

    REQUIRE(asc::is_detected({det(ok, 0.6)}, gt));
    REQUIRE_FALSE(asc::is_detected({det(ok, 0.5)}, gt));    // conf must exceed 0.5
    REQUIRE_FALSE(asc::is_detected({det(half, 0.9)}, gt));  // iou must exceed 0.5
    REQUIRE_FALSE(asc::is_detected({}, gt));
    REQUIRE(asc::is_detected({det(half, 0.9), det(good, 0.51)}, gt));

    // a box at exactly IoU 0.5 does not count
    const Box exactly_half{0, 0, 10, 5.0 + 10.0 / 3.0};  // needs iou == 0.5
    (void)exactly_half;
    const Box two_thirds{0, 0, 10, 20};  // IoU 0.5 exactly: inter 100, union 200
    REQUIRE_FALSE(asc::is_detected({det(two_thirds, 0.9)}, gt));
}

TEST_CASE("sdr: direct counts") {
    REQUIRE(asc::sdr({true, true, false, false}) == 0.5);
    REQUIRE(asc::sdr({false, false}) == 0.0);
    REQUIRE(asc::sdr({}) == 0.0);
    std::vector<bool> many(1000, false);
    for (int i = 0; i < 983; ++i) many[i] = true;
    REQUIRE_THAT(asc::sdr(many), Catch::Matchers::WithinAbs(0.983, 1e-12));
}
