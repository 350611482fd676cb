#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "asc/eval.hpp"
#include "asc/rng.hpp"
#include "asc/tiny_detector.hpp"
#include "support/helpers.hpp"

using asc::Detection;
using asc::GroundTruth;
using asc::Image;
using asc::LossSpec;
using asc::TinyDetector;

namespace {

Image random_image(asc::Rng& rng) {
    Image x(64, 64);
    for (double& v : x.data) v = rng.uniform();
    return x;
}

GroundTruth centered_gt() {
    return testutil::rect_gt(24, 24, 40, 40, 64, 64);
}

}  // namespace

TEST_CASE("zero weights: every objectness is sigmoid(0)=0.5, NMS deterministic") {
    TinyDetector model;  // zero-initialized weights
    asc::Rng rng(3);
    const Image x = random_image(rng);
    const std::vector<Detection> dets = model.detect(x);
    REQUIRE_FALSE(dets.empty());
    for (const Detection& d : dets) REQUIRE(d.objectness == 0.5);
    // pairwise IoU <= 0.5 after suppression
    for (std::size_t i = 0; i < dets.size(); ++i)
        for (std::size_t j = i + 1; j < dets.size(); ++j)
            REQUIRE(asc::iou(dets[i].bbox, dets[j].bbox) <= 0.5);
    const std::vector<Detection> again = model.detect(x);
    REQUIRE(dets.size() == again.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        REQUIRE(dets[i].bbox.r0 == again[i].bbox.r0);
        REQUIRE(dets[i].objectness == again[i].objectness);
    }
}

TEST_CASE("detect rejects wrong input shapes") {
    TinyDetector model;
    REQUIRE_THROWS_AS(model.detect(Image(32, 64, 0.5)), asc::ShapeError);
    REQUIRE_THROWS_AS(model.loss_and_grad(Image(64, 32, 0.5), centered_gt(), LossSpec{}),
                      asc::ShapeError);
}

TEST_CASE("analytic input gradient matches central finite differences") {
    asc::Rng rng(17);
    const GroundTruth gt = centered_gt();
    const LossSpec loss;
    int total = 0, agree = 0;
    for (int img_trial = 0; img_trial < 3; ++img_trial) {
        TinyDetector model;
        model.init_random(1000 + img_trial);
        const Image x = random_image(rng);
        const asc::LossGrad lg = model.loss_and_grad(x, gt, loss);
        if (lg.dead_gradient) continue;  // random net may miss the gt box

        std::vector<asc::SparseGradEntry> samples;
        for (int s = 0; s < 30; ++s)
            samples.push_back({static_cast<int>(rng.below(64)),
                               static_cast<int>(rng.below(64)),
                               static_cast<int>(rng.below(3)), 0.0});
        const auto fd = asc::finite_diff_grad(model, x, gt, loss, 1e-4, samples);
        for (const asc::SparseGradEntry& e : fd) {
            const double analytic = lg.grad.at(e.r, e.c, e.ch);
            const double denom = std::max({std::abs(analytic), std::abs(e.value), 1e-6});
            ++total;
            if (std::abs(analytic - e.value) / denom < 1e-3) ++agree;
        }
    }
    REQUIRE(total > 0);
    REQUIRE(static_cast<double>(agree) / total >= 0.95);
}

TEST_CASE("no matched boxes: zero loss, zero gradient, dead flag") {
    TinyDetector model;
    model.init_random(5);
    asc::Rng rng(7);
    const Image x = random_image(rng);
    const GroundTruth tiny_corner = testutil::rect_gt(0, 0, 3, 3, 64, 64);
    const asc::LossGrad lg = model.loss_and_grad(x, tiny_corner, LossSpec{});
    REQUIRE(lg.dead_gradient);
    REQUIRE(lg.loss == 0.0);
    for (double v : lg.grad.data) REQUIRE(v == 0.0);
}

TEST_CASE("loss grows when the matched set grows") {
    // sum-of-terms oracle: J(A u B) = J(A) + J(B) for disjoint matches
    const std::vector<double> a{0.6, 0.7}, b{0.9};
    std::vector<double> both = a;
    both.insert(both.end(), b.begin(), b.end());
    REQUIRE(asc::disappear_loss(both) >=
            asc::disappear_loss(a));
    REQUIRE_THAT(asc::disappear_loss(both),
                 Catch::Matchers::WithinAbs(
                     asc::disappear_loss(a) + asc::disappear_loss(b), 1e-12));
}

TEST_CASE("nms: survivors pairwise below threshold, sorted by confidence") {
    asc::Rng rng(41);
    std::vector<Detection> dets;
    for (int i = 0; i < 60; ++i) {
        const double r0 = rng.uniform(0, 40), c0 = rng.uniform(0, 40);
        dets.push_back({{r0, c0, r0 + rng.uniform(4, 20), c0 + rng.uniform(4, 20)},
                        rng.uniform(), "object"});
    }
    const std::vector<Detection> kept = asc::nms(dets, 0.5);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i + 1 < kept.size()) REQUIRE(kept[i].objectness >= kept[i + 1].objectness);
        for (std::size_t j = i + 1; j < kept.size(); ++j)
            REQUIRE(asc::iou(kept[i].bbox, kept[j].bbox) <= 0.5);
    }
}

TEST_CASE("weights serialize round-trip bit-exactly with distinct error paths") {
    testutil::TempDir tmp("weights");
    TinyDetector model;
    model.init_random(99);
    model.save(tmp.file("w.bin"));
    const TinyDetector back = TinyDetector::load(tmp.file("w.bin"));
    REQUIRE(back.same_weights(model));

    REQUIRE_THROWS_AS(TinyDetector::load(tmp.file("missing.bin")), asc::IoError);

    std::vector<std::uint8_t> bytes;
    {
        std::ifstream in(tmp.file("w.bin"), std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto write_bytes = [&](const std::string& path, const std::vector<std::uint8_t>& b) {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(b.data()), static_cast<long>(b.size()));
    };

    std::vector<std::uint8_t> bad_magic = bytes;
    bad_magic[0] = 'X';
    write_bytes(tmp.file("bad_magic.bin"), bad_magic);
    REQUIRE_THROWS_AS(TinyDetector::load(tmp.file("bad_magic.bin")), asc::DecodeError);

    std::vector<std::uint8_t> bad_version = bytes;
    bad_version[4] = 99;
    write_bytes(tmp.file("bad_version.bin"), bad_version);
    REQUIRE_THROWS_AS(TinyDetector::load(tmp.file("bad_version.bin")), asc::UnsupportedError);

    std::vector<std::uint8_t> truncated = bytes;
    truncated.resize(truncated.size() / 3);
    write_bytes(tmp.file("trunc.bin"), truncated);
    REQUIRE_THROWS_AS(TinyDetector::load(tmp.file("trunc.bin")), asc::DecodeError);
}

TEST_CASE("finite_diff_grad hits the requested coordinates only") {
    TinyDetector model;
    model.init_random(1);
    asc::Rng rng(2);
    const Image x = random_image(rng);
    const std::vector<asc::SparseGradEntry> samples = {{10, 12, 0, 0.0}, {40, 9, 2, 0.0}};
    const auto fd = asc::finite_diff_grad(model, x, centered_gt(), LossSpec{}, 1e-4, samples);
    REQUIRE(fd.size() == 2);
    REQUIRE(fd[0].r == 10);
    REQUIRE(fd[1].ch == 2);
}
