#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/eval.hpp"
#include "asc/rng.hpp"
#include "asc/victim.hpp"

namespace asc {

struct AttackConfig {
    double alpha_color = 0.01;      // color ascent step size
    int color_steps_per_round = 40; // PGD steps per color optimization
    int rounds = 60;                // mask sampling rounds K
    int sample_radius = 3;          // Chebyshev relocation radius r
    double move_fraction = 0.1;     // fraction of pixels relocated per proposal
    double budget_fraction = 0.05;  // l0 budget as a fraction of object area
    enum class SuccessCheck { Detection, None };
    SuccessCheck success_check = SuccessCheck::Detection;
    std::uint64_t rng_seed = 0;
    LossSpec loss;

    void validate() const {
        if (!(alpha_color > 0.0)) throw ValueError("AttackConfig: alpha_color must be > 0");
        if (color_steps_per_round < 1)
            throw ValueError("AttackConfig: color_steps_per_round must be >= 1");
        if (rounds < 0) throw ValueError("AttackConfig: rounds must be >= 0");
        if (sample_radius < 1) throw ValueError("AttackConfig: sample_radius must be >= 1");
        if (!(move_fraction > 0.0) || move_fraction > 1.0)
            throw ValueError("AttackConfig: move_fraction must be in (0,1]");
        if (!(budget_fraction > 0.0) || budget_fraction > 1.0)
            throw ValueError("AttackConfig: budget_fraction must be in (0,1]");
        loss.validate();
    }
};

struct AttackResult {
    Pattern pattern;            // (M*, T*)
    std::vector<double> trace;  // incumbent-best loss after each evaluation
    bool success = false;       // object no longer detected
    long l0_used = 0;
    int rounds_used = 0;
    double wall_ms = 0.0;
    double final_loss = 0.0;
    bool dead_gradient = false;  // no color step ever saw a usable gradient
    std::string pattern_name;
};

struct ColorOptResult {
    ColorField colors;
    double loss = 0.0;
    bool dead_gradient = false;
};

// Clipped gradient ascent on the colors of the masked pixels:
//   T_{i+1} = Clip_[0,1](T_i + alpha * grad J(x ⊕ (M, T_i)))
// restricted to mask=1 entries (others cannot affect the composite). Returns
// the best iterate by loss, not the last. A gradient that is zero on every
// masked entry at step 0 returns T0 with the dead flag set.
inline ColorOptResult optimize_colors(const VictimModel& model, const Image& x, const Mask& mask,
                                      const ColorField& t0, const GroundTruth& gt,
                                      const LossSpec& loss, int steps, double alpha) {
    if (mask.height != x.height || mask.width != x.width ||
        t0.height != x.height || t0.width != x.width)
        throw ShapeError("optimize_colors: shape mismatch");
    const PixelSet masked = pixel_set(mask);

    ColorOptResult best;
    best.colors = t0;
    best.colors.clamp_unit_range();

    ColorField t = best.colors;
    {
        const LossGrad at_start = model.loss_and_grad(apply_pattern(x, {mask, t}), gt, loss);
        best.loss = at_start.loss;
        if (masked.empty()) {
            best.dead_gradient = true;
            return best;
        }
    }

    for (int step = 0; step < steps; ++step) {
        const Image composite = apply_pattern(x, {mask, t});
        const LossGrad lg = model.loss_and_grad(composite, gt, loss);
        if (lg.loss > best.loss) {
            best.loss = lg.loss;
            best.colors = t;
        }
        double masked_grad_mag = 0.0;
        for (const auto& [r, c] : masked.coords)
            for (int ch = 0; ch < 3; ++ch) masked_grad_mag += std::abs(lg.grad.at(r, c, ch));
        if (masked_grad_mag == 0.0) {
            if (step == 0) best.dead_gradient = true;
            break;
        }
        for (const auto& [r, c] : masked.coords)
            for (int ch = 0; ch < 3; ++ch)
                t.at(r, c, ch) =
                    std::clamp(t.at(r, c, ch) + alpha * lg.grad.at(r, c, ch), 0.0, 1.0);
    }

    const double final_loss = model.loss_and_grad(apply_pattern(x, {mask, t}), gt, loss).loss;
    if (final_loss > best.loss) {
        best.loss = final_loss;
        best.colors = t;
    }
    return best;
}

struct PixelMove {
    std::pair<int, int> from, to;
};

// Relocates ceil(move_fraction * |set|) randomly chosen pixels, each to a
// uniformly random unoccupied cell within Chebyshev radius r of its old
// position, constrained to seg=1. A pixel with no legal target stays put.
inline PixelSet sample_pixel_set(const PixelSet& current, const Mask& seg, int radius,
                                 double move_fraction, long budget, Rng& rng,
                                 std::vector<PixelMove>* moves_out = nullptr) {
    if (current.empty()) throw ValueError("sample_pixel_set: current set is empty");
    if (radius < 1) throw ValueError("sample_pixel_set: radius must be >= 1");

    std::vector<std::pair<int, int>> coords = current.coords;
    if (static_cast<long>(coords.size()) > budget)
        coords.resize(static_cast<std::size_t>(budget));

    Mask occupied(seg.height, seg.width, 0);
    for (const auto& [r, c] : coords) occupied.at(r, c) = 1;

    const std::size_t movers =
        std::min(coords.size(),
                 static_cast<std::size_t>(
                     std::ceil(move_fraction * static_cast<double>(coords.size()))));
    const std::vector<std::size_t> chosen = rng.sample_indices(coords.size(), movers);

    std::vector<std::pair<int, int>> targets;
    for (std::size_t idx : chosen) {
        const auto [r, c] = coords[idx];
        occupied.at(r, c) = 0;  // its own cell frees up for other movers
        targets.clear();
        for (int rr = std::max(0, r - radius); rr <= std::min(seg.height - 1, r + radius); ++rr)
            for (int cc = std::max(0, c - radius); cc <= std::min(seg.width - 1, c + radius);
                 ++cc)
                if (seg.at(rr, cc) && !occupied.at(rr, cc) && !(rr == r && cc == c))
                    targets.emplace_back(rr, cc);
        if (targets.empty()) {
            occupied.at(r, c) = 1;  // blocked: stays
            continue;
        }
        const auto [nr, nc] = targets[rng.index(targets.size())];
        coords[idx] = {nr, nc};
        occupied.at(nr, nc) = 1;
        if (moves_out) moves_out->push_back({{r, c}, {nr, nc}});
    }

    PixelSet out;
    out.coords = std::move(coords);
    return out;
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
        .count();
}

inline bool attack_succeeded(const VictimModel& model, const Image& x, const Pattern& p,
                             const GroundTruth& gt, const AttackConfig& config) {
    if (config.success_check == AttackConfig::SuccessCheck::None) return false;
    return !is_detected(model.detect(apply_pattern(x, p)), gt);
}

}  // namespace detail

// Alternating optimization engine. Starts from the budget-fitted prior
// contour (or a caller-supplied warm-start pattern), optimizes colors, then
// for each round proposes a relocated pixel set, optimizes its colors, and
// accepts it only on strict loss improvement. Exits early once the object is
// no longer detected. rounds = 0 reduces to the fixed-contour attack.
inline AttackResult asc_optimize(const VictimModel& model, const Image& x, const GroundTruth& gt,
                                 const AttackConfig& config,
                                 const std::optional<Pattern>& warm_start = std::nullopt) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const long budget = budget_pixels(gt, config.budget_fraction);
    const Mask seg = rasterize_gt(gt, x.height, x.width);
    if (l0_norm(seg) == 0)
        throw ValueError("asc_optimize: segmentation rasterizes to nothing");

    Mask mask;
    ColorField colors;
    if (warm_start) {
        if (warm_start->mask.height != x.height || warm_start->mask.width != x.width)
            throw ShapeError("asc_optimize: warm-start shape mismatch");
        if (l0_norm(warm_start->mask) > budget)
            throw ValueError("asc_optimize: warm-start mask exceeds the budget");
        mask = warm_start->mask;
        colors = warm_start->colors;
    } else {
        mask = fit_budget(extract_boundary(seg).mask, seg, budget, config.rng_seed);
        colors = ColorField(x.height, x.width, 0.5);
    }

    Rng rng = Rng::stream(config.rng_seed, 0xa5c0ULL);
    AttackResult result;
    result.pattern_name = config.rounds == 0 ? "fasc" : "asc";
    bool all_dead = true;

    const auto check_budget = [&](const Mask& m) {
        if (l0_norm(m) > budget)
            throw ValueError("asc_optimize: internal budget violation");
    };
    check_budget(mask);

    ColorOptResult opt = optimize_colors(model, x, mask, colors, gt, config.loss,
                                         config.color_steps_per_round, config.alpha_color);
    colors = opt.colors;
    double incumbent = opt.loss;
    all_dead &= opt.dead_gradient;
    result.trace.push_back(incumbent);
    result.success = detail::attack_succeeded(model, x, {mask, colors}, gt, config);

    for (int k = 1; k <= config.rounds && !result.success; ++k) {
        result.rounds_used = k;

        // (a) refine colors on the incumbent mask
        opt = optimize_colors(model, x, mask, colors, gt, config.loss,
                              config.color_steps_per_round, config.alpha_color);
        colors = opt.colors;
        incumbent = opt.loss;
        all_dead &= opt.dead_gradient;
        result.trace.push_back(incumbent);
        result.success = detail::attack_succeeded(model, x, {mask, colors}, gt, config);
        if (result.success) break;

        // (b) propose a relocated pixel set
        std::vector<PixelMove> moves;
        const PixelSet proposal =
            sample_pixel_set(pixel_set(mask), seg, config.sample_radius, config.move_fraction,
                             budget, rng, &moves);
        const Mask cand_mask = mask_of(proposal, x.height, x.width);
        check_budget(cand_mask);
        for (const PixelMove& mv : moves) {
            const int dr = std::abs(mv.from.first - mv.to.first);
            const int dc = std::abs(mv.from.second - mv.to.second);
            if (std::max(dr, dc) > config.sample_radius)
                throw ValueError("asc_optimize: relocation outside the sample radius");
        }

        // (c) optimize the candidate's colors, warm-started from the
        // incumbent; relocated pixels restart from mid-gray
        ColorField cand_colors = colors;
        for (const PixelMove& mv : moves)
            for (int ch = 0; ch < 3; ++ch)
                cand_colors.at(mv.to.first, mv.to.second, ch) = 0.5;
        const ColorOptResult cand_opt =
            optimize_colors(model, x, cand_mask, cand_colors, gt, config.loss,
                            config.color_steps_per_round, config.alpha_color);
        all_dead &= cand_opt.dead_gradient;

        // (d) greedy acceptance on strict improvement
        if (cand_opt.loss > incumbent) {
            mask = cand_mask;
            colors = cand_opt.colors;
            incumbent = cand_opt.loss;
        }
        result.trace.push_back(incumbent);
        result.success = detail::attack_succeeded(model, x, {mask, colors}, gt, config);
    }

    result.pattern = {std::move(mask), std::move(colors)};
    result.final_loss = incumbent;
    result.l0_used = l0_norm(result.pattern.mask);
    result.dead_gradient = all_dead;
    result.wall_ms = detail::elapsed_ms(t_start);
    return result;
}

// Fixed Adversarial Semantic Contour: budget-fitted prior contour, color
// optimization only.
inline AttackResult f_asc(const VictimModel& model, const Image& x, const GroundTruth& gt,
                          const AttackConfig& config) {
    AttackConfig fixed = config;
    fixed.rounds = 0;
    AttackResult result = asc_optimize(model, x, gt, fixed);
    result.pattern_name = "fasc";
    return result;
}

// Optimized ASC: run the fixed attack first and only continue with the full
// alternating optimization when it fails, warm-started from its incumbent.
inline AttackResult o_asc(const VictimModel& model, const Image& x, const GroundTruth& gt,
                          const AttackConfig& config) {
    AttackResult fixed = f_asc(model, x, gt, config);
    fixed.pattern_name = "oasc";
    if (fixed.success || config.rounds == 0) return fixed;

    AttackResult optimized = asc_optimize(model, x, gt, config, fixed.pattern);
    optimized.pattern_name = "oasc";
    optimized.trace.insert(optimized.trace.begin(), fixed.trace.begin(), fixed.trace.end());
    optimized.wall_ms += fixed.wall_ms;
    return optimized;
}

// Baseline pipeline: a fixed mask from the pattern zoo, colors optimized.
inline AttackResult attack_with_pattern(const VictimModel& model, const Image& x,
                                        const GroundTruth& gt, const Mask& mask,
                                        const AttackConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();
    const long budget = budget_pixels(gt, config.budget_fraction);
    if (l0_norm(mask) > budget)
        throw ValueError("attack_with_pattern: mask exceeds the l0 budget");

    const ColorField t0(x.height, x.width, 0.5);
    const ColorOptResult opt = optimize_colors(model, x, mask, t0, gt, config.loss,
                                               config.color_steps_per_round, config.alpha_color);

    AttackResult result;
    result.pattern = {mask, opt.colors};
    result.trace = {opt.loss};
    result.final_loss = opt.loss;
    result.dead_gradient = opt.dead_gradient;
    result.l0_used = l0_norm(mask);
    result.rounds_used = 0;
    result.success = detail::attack_succeeded(model, x, result.pattern, gt, config);
    result.wall_ms = detail::elapsed_ms(t_start);
    return result;
}

}  // namespace asc
