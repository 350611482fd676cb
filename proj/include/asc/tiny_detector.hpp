#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "asc/core.hpp"
#include "asc/rng.hpp"
#include "asc/victim.hpp"

namespace asc {
namespace detail {

inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct ConvSpec {
    int in_c, out_c, ksize, stride, pad;
    int weight_count() const { return out_c * in_c * ksize * ksize; }
    int out_dim(int in_dim) const { return (in_dim + 2 * pad - ksize) / stride + 1; }
};

struct ConvLayer {
    ConvSpec spec;
    std::vector<double> w;  // [out][in][ky][kx]
    std::vector<double> b;  // [out]

    explicit ConvLayer(ConvSpec s)
        : spec(s), w(static_cast<std::size_t>(s.weight_count()), 0.0),
          b(static_cast<std::size_t>(s.out_c), 0.0) {}

    // in: [in_c][h][w] flat. out: [out_c][oh][ow] flat.
    void forward(const std::vector<double>& in, int h, int wdt, std::vector<double>& out) const {
        const int oh = spec.out_dim(h), ow = spec.out_dim(wdt);
        out.assign(static_cast<std::size_t>(spec.out_c) * oh * ow, 0.0);
        for (int o = 0; o < spec.out_c; ++o) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    double acc = b[o];
                    const int y0 = y * spec.stride - spec.pad;
                    const int x0 = x * spec.stride - spec.pad;
                    for (int i = 0; i < spec.in_c; ++i) {
                        for (int ky = 0; ky < spec.ksize; ++ky) {
                            const int yy = y0 + ky;
                            if (yy < 0 || yy >= h) continue;
                            const double* in_row =
                                in.data() + (static_cast<std::size_t>(i) * h + yy) * wdt;
                            const double* w_row =
                                w.data() + ((static_cast<std::size_t>(o) * spec.in_c + i) *
                                                spec.ksize +
                                            ky) *
                                               spec.ksize;
                            for (int kx = 0; kx < spec.ksize; ++kx) {
                                const int xx = x0 + kx;
                                if (xx < 0 || xx >= wdt) continue;
                                acc += in_row[xx] * w_row[kx];
                            }
                        }
                    }
                    out[(static_cast<std::size_t>(o) * oh + y) * ow + x] = acc;
                }
            }
        }
    }

    void backward_input(const std::vector<double>& dout, int h, int wdt,
                        std::vector<double>& din) const {
        const int oh = spec.out_dim(h), ow = spec.out_dim(wdt);
        din.assign(static_cast<std::size_t>(spec.in_c) * h * wdt, 0.0);
        for (int o = 0; o < spec.out_c; ++o) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    const double g = dout[(static_cast<std::size_t>(o) * oh + y) * ow + x];
                    if (g == 0.0) continue;
                    const int y0 = y * spec.stride - spec.pad;
                    const int x0 = x * spec.stride - spec.pad;
                    for (int i = 0; i < spec.in_c; ++i) {
                        for (int ky = 0; ky < spec.ksize; ++ky) {
                            const int yy = y0 + ky;
                            if (yy < 0 || yy >= h) continue;
                            double* din_row =
                                din.data() + (static_cast<std::size_t>(i) * h + yy) * wdt;
                            const double* w_row =
                                w.data() + ((static_cast<std::size_t>(o) * spec.in_c + i) *
                                                spec.ksize +
                                            ky) *
                                               spec.ksize;
                            for (int kx = 0; kx < spec.ksize; ++kx) {
                                const int xx = x0 + kx;
                                if (xx < 0 || xx >= wdt) continue;
                                din_row[xx] += g * w_row[kx];
                            }
                        }
                    }
                }
            }
        }
    }

    void backward_params(const std::vector<double>& dout, const std::vector<double>& in, int h,
                         int wdt, std::vector<double>& dw, std::vector<double>& db) const {
        const int oh = spec.out_dim(h), ow = spec.out_dim(wdt);
        for (int o = 0; o < spec.out_c; ++o) {
            for (int y = 0; y < oh; ++y) {
                for (int x = 0; x < ow; ++x) {
                    const double g = dout[(static_cast<std::size_t>(o) * oh + y) * ow + x];
                    if (g == 0.0) continue;
                    db[o] += g;
                    const int y0 = y * spec.stride - spec.pad;
                    const int x0 = x * spec.stride - spec.pad;
                    for (int i = 0; i < spec.in_c; ++i) {
                        for (int ky = 0; ky < spec.ksize; ++ky) {
                            const int yy = y0 + ky;
                            if (yy < 0 || yy >= h) continue;
                            const double* in_row =
                                in.data() + (static_cast<std::size_t>(i) * h + yy) * wdt;
                            double* dw_row =
                                dw.data() + ((static_cast<std::size_t>(o) * spec.in_c + i) *
                                                 spec.ksize +
                                             ky) *
                                                spec.ksize;
                            for (int kx = 0; kx < spec.ksize; ++kx) {
                                const int xx = x0 + kx;
                                if (xx < 0 || xx >= wdt) continue;
                                dw_row[kx] += g * in_row[xx];
                            }
                        }
                    }
                }
            }
        }
    }
};

}  // namespace detail

// Anchor-grid detector over 64x64x3 inputs: two stride-2 3x3 convolutions
// (3->8->16 channels, ReLU) and a 1x1 head emitting, per 16x16 grid cell,
// an objectness logit plus 4 box offsets. Box parameterization: center =
// cell center + tanh(t) * cell_size, size = 16px anchor * exp(t).
class TinyDetector : public VictimModel {
public:
    static constexpr int kInput = 64;
    static constexpr int kGrid = 16;
    static constexpr int kCellSize = 4;
    static constexpr double kAnchor = 16.0;
    static constexpr double kScoreThreshold = 0.05;
    static constexpr double kNmsIou = 0.5;

    TinyDetector()
        : conv1_({3, 8, 3, 2, 1}), conv2_({8, 16, 3, 2, 1}), head_({16, 5, 1, 1, 0}) {}

    void init_random(std::uint64_t seed) {
        Rng rng(seed ^ 0x7f4a7c15ULL);
        for (detail::ConvLayer* layer : {&conv1_, &conv2_, &head_}) {
            const double scale =
                std::sqrt(2.0 / (layer->spec.in_c * layer->spec.ksize * layer->spec.ksize));
            for (double& v : layer->w) v = scale * rng.normal();
            for (double& v : layer->b) v = 0.0;
        }
    }

    int input_height() const override { return kInput; }
    int input_width() const override { return kInput; }

    struct Activations {
        std::vector<double> input;          // [3][64][64]
        std::vector<double> z1, a1;         // [8][32][32]
        std::vector<double> z2, a2;         // [16][16][16]
        std::vector<double> out;            // [5][16][16]
    };

    void forward(const Image& x, Activations& act) const {
        if (!x.same_shape_as(kInput, kInput))
            throw ShapeError("TinyDetector: input must be 64x64x3");
        act.input.assign(static_cast<std::size_t>(3) * kInput * kInput, 0.0);
        for (int r = 0; r < kInput; ++r)
            for (int c = 0; c < kInput; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    act.input[(static_cast<std::size_t>(ch) * kInput + r) * kInput + c] =
                        x.at(r, c, ch) - 0.5;

        conv1_.forward(act.input, kInput, kInput, act.z1);
        act.a1 = act.z1;
        for (double& v : act.a1) v = std::max(v, 0.0);
        conv2_.forward(act.a1, 32, 32, act.z2);
        act.a2 = act.z2;
        for (double& v : act.a2) v = std::max(v, 0.0);
        head_.forward(act.a2, kGrid, kGrid, act.out);
    }

    // Raw per-cell prediction, decoded.
    struct Candidate {
        Box bbox;
        double objectness;
        double obj_logit;
        int cell;  // row-major grid index
    };

    std::vector<Candidate> decode(const std::vector<double>& head_out) const {
        std::vector<Candidate> cands;
        cands.reserve(kGrid * kGrid);
        const auto at = [&](int ch, int gy, int gx) {
            return head_out[(static_cast<std::size_t>(ch) * kGrid + gy) * kGrid + gx];
        };
        for (int gy = 0; gy < kGrid; ++gy) {
            for (int gx = 0; gx < kGrid; ++gx) {
                const double z_obj = at(0, gy, gx);
                const double center_r =
                    gy * kCellSize + kCellSize / 2.0 + std::tanh(at(1, gy, gx)) * kCellSize;
                const double center_c =
                    gx * kCellSize + kCellSize / 2.0 + std::tanh(at(2, gy, gx)) * kCellSize;
                const double bh = kAnchor * std::exp(std::clamp(at(3, gy, gx), -10.0, 10.0));
                const double bw = kAnchor * std::exp(std::clamp(at(4, gy, gx), -10.0, 10.0));
                Candidate cand;
                cand.bbox = {center_r - bh / 2, center_c - bw / 2, center_r + bh / 2,
                             center_c + bw / 2};
                cand.obj_logit = z_obj;
                cand.objectness = detail::sigmoid(z_obj);
                cand.cell = gy * kGrid + gx;
                cands.push_back(cand);
            }
        }
        return cands;
    }

    std::vector<Candidate> candidates(const Image& x) const {
        Activations act;
        forward(x, act);
        return decode(act.out);
    }

    std::vector<Detection> detect(const Image& x) const override {
        std::vector<Detection> dets;
        for (const Candidate& cand : candidates(x)) {
            if (cand.objectness > kScoreThreshold)
                dets.push_back({cand.bbox, cand.objectness, "object"});
        }
        return nms(std::move(dets), kNmsIou);
    }

    // Disappearing loss over candidate boxes matched to the ground truth at
    // IoU > threshold (pre-NMS, pre-score-filter), with exact reverse-mode
    // input gradients. Matching is treated as fixed at the evaluation point.
    LossGrad loss_and_grad(const Image& x, const GroundTruth& gt,
                           const LossSpec& loss) const override {
        loss.validate();
        Activations act;
        forward(x, act);
        const std::vector<Candidate> cands = decode(act.out);

        std::vector<double> dout(act.out.size(), 0.0);
        double j = 0.0;
        bool any_matched = false;
        for (const Candidate& cand : cands) {
            if (iou(cand.bbox, gt.bbox) <= loss.iou_match_threshold) continue;
            any_matched = true;
            j -= std::log(std::max(cand.objectness, kObjectnessFloor));
            // d(-log sigmoid(z))/dz = sigmoid(z) - 1; zero when the log is
            // clamped, so the gradient matches the evaluated loss.
            if (cand.objectness > kObjectnessFloor)
                dout[static_cast<std::size_t>(cand.cell)] = cand.objectness - 1.0;
        }

        LossGrad result;
        result.loss = j;
        result.grad = Grad3(kInput, kInput, 0.0);
        result.dead_gradient = !any_matched;
        if (!any_matched) return result;

        std::vector<double> da2, dz2, da1, dz1, dinput;
        head_.backward_input(dout, kGrid, kGrid, da2);
        dz2 = da2;
        for (std::size_t i = 0; i < dz2.size(); ++i)
            if (act.z2[i] <= 0.0) dz2[i] = 0.0;
        conv2_.backward_input(dz2, 32, 32, da1);
        dz1 = da1;
        for (std::size_t i = 0; i < dz1.size(); ++i)
            if (act.z1[i] <= 0.0) dz1[i] = 0.0;
        conv1_.backward_input(dz1, kInput, kInput, dinput);

        for (int r = 0; r < kInput; ++r)
            for (int c = 0; c < kInput; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    result.grad.at(r, c, ch) =
                        dinput[(static_cast<std::size_t>(ch) * kInput + r) * kInput + c];
        return result;
    }

    detail::ConvLayer& conv1() { return conv1_; }
    detail::ConvLayer& conv2() { return conv2_; }
    detail::ConvLayer& head() { return head_; }
    const detail::ConvLayer& conv1() const { return conv1_; }
    const detail::ConvLayer& conv2() const { return conv2_; }
    const detail::ConvLayer& head() const { return head_; }

    bool same_weights(const TinyDetector& other) const {
        return conv1_.w == other.conv1_.w && conv1_.b == other.conv1_.b &&
               conv2_.w == other.conv2_.w && conv2_.b == other.conv2_.b &&
               head_.w == other.head_.w && head_.b == other.head_.b;
    }

    // Versioned flat binary: magic, version, per-layer conv spec + row-major
    // doubles (weights then biases), little-endian.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open weights file for writing: " + path);
        out.write(kMagic, 4);
        write_u32(out, kVersion);
        write_u32(out, 3);
        for (const detail::ConvLayer* layer : {&conv1_, &conv2_, &head_}) {
            for (int v : {layer->spec.in_c, layer->spec.out_c, layer->spec.ksize,
                          layer->spec.stride, layer->spec.pad})
                write_u32(out, static_cast<std::uint32_t>(v));
            out.write(reinterpret_cast<const char*>(layer->w.data()),
                      static_cast<std::streamsize>(layer->w.size() * sizeof(double)));
            out.write(reinterpret_cast<const char*>(layer->b.data()),
                      static_cast<std::streamsize>(layer->b.size() * sizeof(double)));
        }
        if (!out) throw IoError("write failure: " + path);
    }

    static TinyDetector load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open weights file: " + path);
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, kMagic, 4) != 0)
            throw DecodeError("bad weights magic: " + path);
        if (read_u32(in, path) != kVersion)
            throw UnsupportedError("unsupported weights version: " + path);
        if (read_u32(in, path) != 3) throw DecodeError("unexpected layer count: " + path);
        TinyDetector model;
        for (detail::ConvLayer* layer : {&model.conv1_, &model.conv2_, &model.head_}) {
            int vals[5];
            for (int& v : vals) v = static_cast<int>(read_u32(in, path));
            const detail::ConvSpec& s = layer->spec;
            if (vals[0] != s.in_c || vals[1] != s.out_c || vals[2] != s.ksize ||
                vals[3] != s.stride || vals[4] != s.pad)
                throw DecodeError("weights layer shape mismatch: " + path);
            in.read(reinterpret_cast<char*>(layer->w.data()),
                    static_cast<std::streamsize>(layer->w.size() * sizeof(double)));
            in.read(reinterpret_cast<char*>(layer->b.data()),
                    static_cast<std::streamsize>(layer->b.size() * sizeof(double)));
            if (!in) throw DecodeError("truncated weights file: " + path);
        }
        return model;
    }

private:
    static constexpr const char* kMagic = "ASCW";
    static constexpr std::uint32_t kVersion = 1;

    static void write_u32(std::ofstream& out, std::uint32_t v) {
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    static std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!in) throw DecodeError("truncated weights file: " + path);
        return v;
    }

    detail::ConvLayer conv1_, conv2_, head_;
};

}  // namespace asc
