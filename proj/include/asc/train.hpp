#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "asc/core.hpp"
#include "asc/eval.hpp"
#include "asc/rng.hpp"
#include "asc/scenes.hpp"
#include "asc/tiny_detector.hpp"

namespace asc {

struct TrainReport {
    TinyDetector model;
    double val_clean_sdr = 0.0;
    double final_train_loss = 0.0;
    long train_count = 0;
    long val_count = 0;
};

namespace detail {

struct AdamState {
    std::vector<double> m, v;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(std::vector<double>& theta, const std::vector<double>& grad,
                      AdamState& state, double lr, long t) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        theta[i] -= lr * (state.m[i] / bc1) / (std::sqrt(state.v[i] / bc2) + eps);
    }
}

inline double smooth_l1(double d) {
    const double a = std::abs(d);
    return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

inline double smooth_l1_grad(double d) { return std::clamp(d, -1.0, 1.0); }

struct CellTarget {
    int cell;
    double t_dr, t_dc, t_logh, t_logw;
};

inline std::vector<CellTarget> assign_targets(const std::vector<GroundTruth>& objects) {
    std::vector<CellTarget> targets;
    for (const GroundTruth& gt : objects) {
        const double cr = gt.bbox.center_row(), cc = gt.bbox.center_col();
        const int gy = std::clamp(static_cast<int>(cr) / TinyDetector::kCellSize, 0,
                                  TinyDetector::kGrid - 1);
        const int gx = std::clamp(static_cast<int>(cc) / TinyDetector::kCellSize, 0,
                                  TinyDetector::kGrid - 1);
        CellTarget t;
        t.cell = gy * TinyDetector::kGrid + gx;
        bool duplicate = false;
        for (const CellTarget& prev : targets) duplicate |= prev.cell == t.cell;
        if (duplicate) continue;
        const double cell_r = gy * TinyDetector::kCellSize + TinyDetector::kCellSize / 2.0;
        const double cell_c = gx * TinyDetector::kCellSize + TinyDetector::kCellSize / 2.0;
        t.t_dr = (cr - cell_r) / TinyDetector::kCellSize;  // target for tanh(z)
        t.t_dc = (cc - cell_c) / TinyDetector::kCellSize;
        t.t_logh = std::log(std::max(gt.bbox.height(), 1.0) / TinyDetector::kAnchor);
        t.t_logw = std::log(std::max(gt.bbox.width(), 1.0) / TinyDetector::kAnchor);
        targets.push_back(t);
    }
    return targets;
}

}  // namespace detail

// Per-cell objectness BCE (positive cells up-weighted) plus smooth-L1 box
// regression on matched cells; Adam, one image per update, seeded shuffle.
// Returns the trained model and its clean SDR on a held-out validation split
// (the last tenth of the dataset).
inline TrainReport train_tiny(const std::vector<Scene>& dataset, int epochs, double lr,
                              std::uint64_t seed) {
    if (dataset.empty()) throw ValueError("train_tiny: empty dataset");
    if (epochs < 0) throw ValueError("train_tiny: epochs must be >= 0");

    constexpr double kPosWeight = 48.0;
    constexpr double kBoxWeight = 4.0;
    constexpr int kGrid = TinyDetector::kGrid;
    constexpr int kCells = kGrid * kGrid;

    TrainReport report;
    report.model.init_random(seed);
    TinyDetector& model = report.model;

    const std::size_t n = dataset.size();
    const std::size_t val_n = (n >= 10) ? n / 10 : 0;
    const std::size_t train_n = n - val_n;
    report.train_count = static_cast<long>(train_n);
    report.val_count = static_cast<long>(val_n);

    detail::AdamState aw1(model.conv1().w.size()), ab1(model.conv1().b.size());
    detail::AdamState aw2(model.conv2().w.size()), ab2(model.conv2().b.size());
    detail::AdamState awh(model.head().w.size()), abh(model.head().b.size());

    Rng rng = Rng::stream(seed, 0x7261696eULL);
    std::vector<std::size_t> order(train_n);
    for (std::size_t i = 0; i < train_n; ++i) order[i] = i;

    long step = 0;
    double running_loss = 0.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        running_loss = 0.0;
        for (std::size_t idx : order) {
            const Scene& scene = dataset[idx];
            TinyDetector::Activations act;
            model.forward(scene.image, act);
            const std::vector<detail::CellTarget> targets =
                detail::assign_targets(scene.objects);

            std::vector<double> dout(act.out.size(), 0.0);
            std::vector<char> is_pos(kCells, 0);
            for (const detail::CellTarget& t : targets) is_pos[t.cell] = 1;

            double loss = 0.0;
            for (int cell = 0; cell < kCells; ++cell) {
                const double z = act.out[cell];  // channel 0 = objectness
                const double y = is_pos[cell] ? 1.0 : 0.0;
                const double wgt = (is_pos[cell] ? kPosWeight : 1.0) / kCells;
                // numerically stable BCE on the logit
                loss += wgt * (std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z))));
                dout[cell] = wgt * (detail::sigmoid(z) - y);
            }

            const double box_norm =
                targets.empty() ? 1.0 : static_cast<double>(targets.size());
            for (const detail::CellTarget& t : targets) {
                const double z_dr = act.out[1 * kCells + t.cell];
                const double z_dc = act.out[2 * kCells + t.cell];
                const double z_lh = act.out[3 * kCells + t.cell];
                const double z_lw = act.out[4 * kCells + t.cell];
                const double a_dr = std::tanh(z_dr), a_dc = std::tanh(z_dc);
                const double w = kBoxWeight / box_norm;
                loss += w * (detail::smooth_l1(a_dr - t.t_dr) + detail::smooth_l1(a_dc - t.t_dc) +
                             detail::smooth_l1(z_lh - t.t_logh) +
                             detail::smooth_l1(z_lw - t.t_logw));
                dout[1 * kCells + t.cell] =
                    w * detail::smooth_l1_grad(a_dr - t.t_dr) * (1.0 - a_dr * a_dr);
                dout[2 * kCells + t.cell] =
                    w * detail::smooth_l1_grad(a_dc - t.t_dc) * (1.0 - a_dc * a_dc);
                dout[3 * kCells + t.cell] = w * detail::smooth_l1_grad(z_lh - t.t_logh);
                dout[4 * kCells + t.cell] = w * detail::smooth_l1_grad(z_lw - t.t_logw);
            }
            running_loss += loss;

            // Backward pass: head -> conv2 -> conv1, parameter grads only.
            std::vector<double> dwh(model.head().w.size(), 0.0), dbh(model.head().b.size(), 0.0);
            std::vector<double> dw2(model.conv2().w.size(), 0.0), db2(model.conv2().b.size(), 0.0);
            std::vector<double> dw1(model.conv1().w.size(), 0.0), db1(model.conv1().b.size(), 0.0);
            std::vector<double> da2, dz2, da1, dz1;

            model.head().backward_params(dout, act.a2, kGrid, kGrid, dwh, dbh);
            model.head().backward_input(dout, kGrid, kGrid, da2);
            dz2 = da2;
            for (std::size_t i = 0; i < dz2.size(); ++i)
                if (act.z2[i] <= 0.0) dz2[i] = 0.0;
            model.conv2().backward_params(dz2, act.a1, 32, 32, dw2, db2);
            model.conv2().backward_input(dz2, 32, 32, da1);
            dz1 = da1;
            for (std::size_t i = 0; i < dz1.size(); ++i)
                if (act.z1[i] <= 0.0) dz1[i] = 0.0;
            model.conv1().backward_params(dz1, act.input, TinyDetector::kInput,
                                          TinyDetector::kInput, dw1, db1);

            ++step;
            detail::adam_step(model.conv1().w, dw1, aw1, lr, step);
            detail::adam_step(model.conv1().b, db1, ab1, lr, step);
            detail::adam_step(model.conv2().w, dw2, aw2, lr, step);
            detail::adam_step(model.conv2().b, db2, ab2, lr, step);
            detail::adam_step(model.head().w, dwh, awh, lr, step);
            detail::adam_step(model.head().b, dbh, abh, lr, step);
        }
    }
    report.final_train_loss = train_n ? running_loss / static_cast<double>(train_n) : 0.0;

    std::vector<bool> detected;
    for (std::size_t i = train_n; i < n; ++i)
        detected.push_back(is_detected(model.detect(dataset[i].image), dataset[i].objects[0]));
    report.val_clean_sdr = val_n ? sdr(detected) : 0.0;
    return report;
}

}  // namespace asc
