#include <catch2/catch_amalgamated.hpp>

#include "asc/core.hpp"
#include "asc/rng.hpp"
#include "support/helpers.hpp"

using asc::ColorField;
using asc::Image;
using asc::Mask;
using asc::Pattern;
using asc::PixelSet;

TEST_CASE("apply_pattern: all-zero mask is the identity") {
    asc::Rng rng(7);
    Image x(5, 4);
    for (double& v : x.data) v = rng.uniform();
    Pattern p{Mask(5, 4, 0), ColorField(5, 4, 0.77)};
    const Image out = asc::apply_pattern(x, p);
    REQUIRE(out.data == x.data);  // bit-exact
}

TEST_CASE("apply_pattern: all-one mask replaces everything") {
    Image x(3, 3, 0.25);
    ColorField t(3, 3);
    asc::Rng rng(9);
    for (double& v : t.data) v = rng.uniform();
    const Image out = asc::apply_pattern(x, {Mask(3, 3, 1), t});
    REQUIRE(out.data == t.data);
}

TEST_CASE("apply_pattern: hand-evaluated 2x2 case") {
    // x = [[0.1,0.2],[0.3,0.4]] replicated over channels, M selects (0,0).
    Image x(2, 2);
    const double vals[2][2] = {{0.1, 0.2}, {0.3, 0.4}};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int ch = 0; ch < 3; ++ch) x.at(r, c, ch) = vals[r][c];
    Mask m(2, 2, 0);
    m.at(0, 0) = 1;
    const Image out = asc::apply_pattern(x, {m, ColorField(2, 2, 0.9)});
    // per-pixel oracle: (1-M)*x + M*T
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int ch = 0; ch < 3; ++ch) {
                const double want = (r == 0 && c == 0) ? 0.9 : vals[r][c];
                REQUIRE(out.at(r, c, ch) == want);
            }
}

TEST_CASE("apply_pattern: dimension mismatch is a shape error") {
    Image x(4, 4, 0.5);
    REQUIRE_THROWS_AS(asc::apply_pattern(x, {Mask(3, 4, 0), ColorField(4, 4, 0.0)}),
                      asc::ShapeError);
    REQUIRE_THROWS_AS(asc::apply_pattern(x, {Mask(4, 4, 0), ColorField(4, 3, 0.0)}),
                      asc::ShapeError);
}

TEST_CASE("apply_pattern: untouched pixels are exact, input not mutated, idempotent") {
    asc::Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        Image x(8, 8);
        for (double& v : x.data) v = rng.uniform();
        const Image x_copy = x;
        const Mask m = testutil::random_mask(8, 8, 0.3, rng);
        ColorField t(8, 8);
        for (double& v : t.data) v = rng.uniform();
        const Pattern p{m, t};
        const Image once = asc::apply_pattern(x, p);
        REQUIRE(x.data == x_copy.data);
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                for (int ch = 0; ch < 3; ++ch) {
                    const double want = m.at(r, c) ? t.at(r, c, ch) : x.at(r, c, ch);
                    REQUIRE(once.at(r, c, ch) == want);
                }
        const Image twice = asc::apply_pattern(once, p);
        REQUIRE(twice.data == once.data);
    }
}

TEST_CASE("l0_norm: zero, full, diagonal") {
    REQUIRE(asc::l0_norm(Mask(8, 8, 0)) == 0);
    REQUIRE(asc::l0_norm(Mask(8, 8, 1)) == 64);
    Mask diag(5, 5, 0);
    for (int i = 0; i < 5; ++i) diag.at(i, i) = 1;
    REQUIRE(asc::l0_norm(diag) == 5);
}

TEST_CASE("l0_norm equals direct summation for random masks") {
    asc::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Mask m = testutil::random_mask(9, 13, rng.uniform(), rng);
        long total = 0;
        for (auto v : m.data) total += v;
        REQUIRE(asc::l0_norm(m) == total);
        REQUIRE(static_cast<long>(asc::pixel_set(m).size()) == total);
    }
}

TEST_CASE("pixel_set/mask_of: small cases") {
    REQUIRE(asc::mask_of(PixelSet{}, 3, 3) == Mask(3, 3, 0));
    PixelSet one;
    one.coords = {{0, 0}};
    const Mask m = asc::mask_of(one, 1, 1);
    REQUIRE(m.at(0, 0) == 1);
    REQUIRE(asc::l0_norm(m) == 1);
}

TEST_CASE("pixel_set/mask_of round trip on random masks") {
    asc::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Mask m = testutil::random_mask(16, 16, rng.uniform(), rng);
        REQUIRE(asc::mask_of(asc::pixel_set(m), 16, 16) == m);
    }
}

TEST_CASE("mask_of rejects out-of-range coordinates") {
    PixelSet bad;
    bad.coords = {{2, 0}};
    REQUIRE_THROWS_AS(asc::mask_of(bad, 2, 2), asc::ValueError);
}

TEST_CASE("raster types reject degenerate dimensions") {
    REQUIRE_THROWS_AS(Image(0, 4), asc::ShapeError);
    REQUIRE_THROWS_AS(Mask(4, 0), asc::ShapeError);
}
