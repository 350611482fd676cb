#pragma once

#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asc/attack.hpp"
#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/eval.hpp"
#include "asc/patterns.hpp"
#include "asc/scenes.hpp"
#include "asc/victim.hpp"

namespace asc {

inline const std::vector<std::string> kAllPatterns = {
    "advpatch", "fourpatch", "grid2x2", "smallgrid", "strip", "fasc", "oasc"};

struct BenchRow {
    long image_id = 0;
    std::string pattern;
    double budget_fraction = 0.0;
    bool detected = false;
    double best_iou = 0.0;
    double best_conf = 0.0;
    long l0_used = 0;
    int rounds = 0;
    double wall_ms = 0.0;
};

struct BenchSkip {
    long image_id = 0;
    std::string pattern;  // empty when the whole image was skipped
    std::string reason;
};

struct BenchReport {
    std::vector<std::string> patterns;
    std::vector<double> budgets;
    double clean_sdr = 0.0;
    std::vector<BenchRow> rows;    // image asc, then pattern, then budget
    std::vector<BenchSkip> skips;
    // SDR per (pattern, budget), same index order as patterns x budgets.
    std::vector<std::vector<double>> table;
    nlohmann::json config_echo;
};

namespace detail {

struct PerImageOutcome {
    bool skipped_whole = false;
    bool clean_detected = false;
    std::vector<BenchRow> rows;
    std::vector<BenchSkip> skips;
};

inline BenchRow attack_row(const VictimModel& model, const Image& x, const GroundTruth& gt,
                           const AttackResult& res, long image_id, const std::string& pattern,
                           double budget_fraction) {
    BenchRow row;
    row.image_id = image_id;
    row.pattern = pattern;
    row.budget_fraction = budget_fraction;
    row.l0_used = res.l0_used;
    row.rounds = res.rounds_used;
    row.wall_ms = res.wall_ms;
    const std::vector<Detection> dets = model.detect(apply_pattern(x, res.pattern));
    row.detected = is_detected(dets, gt);
    for (const Detection& det : dets) {
        const double overlap = iou(det.bbox, gt.bbox);
        row.best_iou = std::max(row.best_iou, overlap);
        if (overlap > 0.5) row.best_conf = std::max(row.best_conf, det.objectness);
    }
    return row;
}

inline PerImageOutcome bench_one_image(const VictimModel& model, const Scene& scene,
                                       const std::vector<std::string>& patterns,
                                       const std::vector<double>& budgets,
                                       const AttackConfig& base_config,
                                       std::uint64_t bench_seed) {
    PerImageOutcome out;
    const Image& x = scene.image;
    const GroundTruth& gt = scene.objects[0];

    if (!x.same_shape_as(model.input_height(), model.input_width())) {
        out.skipped_whole = true;
        out.skips.push_back({scene.id, "", "image size does not match the model input"});
        return out;
    }
    out.clean_detected = is_detected(model.detect(x), gt);

    Mask seg;  // built lazily; only strip needs it
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        const std::string& pattern = patterns[pi];
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            const double frac = budgets[bi];
            AttackConfig cfg = base_config;
            cfg.budget_fraction = frac;
            cfg.rng_seed = Rng::stream(bench_seed, (static_cast<std::uint64_t>(scene.id) << 16) ^
                                                       (pi * 31 + bi))
                               .next_u64();
            try {
                AttackResult res;
                if (pattern == "fasc") {
                    res = f_asc(model, x, gt, cfg);
                } else if (pattern == "oasc") {
                    res = o_asc(model, x, gt, cfg);
                } else {
                    const long budget = budget_pixels(gt, frac);
                    Mask m;
                    if (pattern == "advpatch") {
                        m = adv_patch(gt, budget, x.height, x.width);
                    } else if (pattern == "fourpatch") {
                        m = four_patch(gt, budget, x.height, x.width);
                    } else if (pattern == "grid2x2") {
                        m = grid_2x2(gt, budget, x.height, x.width);
                    } else if (pattern == "smallgrid") {
                        m = small_grid(gt, budget, x.height, x.width);
                    } else if (pattern == "strip") {
                        if (seg.data.empty()) seg = rasterize_gt(gt, x.height, x.width);
                        m = strip(gt, seg, budget);
                    } else {
                        throw ValueError("unknown pattern: " + pattern);
                    }
                    res = attack_with_pattern(model, x, gt, m, cfg);
                }
                out.rows.push_back(attack_row(model, x, gt, res, scene.id, pattern, frac));
            } catch (const ValueError& e) {
                out.skips.push_back({scene.id, pattern, e.what()});
            }
        }
    }
    return out;
}

inline std::string format_budget_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
    return buf;
}

}  // namespace detail

// Runs the full pattern x budget grid over the dataset. Per-image work fans
// out to `workers` threads; each image derives its own RNG stream from
// (seed, image id) and results are assembled in image order, so the report
// is identical regardless of scheduling.
inline BenchReport run_bench(const VictimModel& model, const std::vector<Scene>& scenes,
                             const std::vector<std::string>& patterns,
                             const std::vector<double>& budgets, const AttackConfig& config,
                             int workers = 0) {
    config.validate();
    if (scenes.empty()) throw ValueError("run_bench: empty dataset");
    if (patterns.empty() || budgets.empty())
        throw ValueError("run_bench: need at least one pattern and one budget");
    for (const std::string& p : patterns) {
        bool known = false;
        for (const std::string& k : kAllPatterns) known |= k == p;
        if (!known) throw ValueError("run_bench: unknown pattern: " + p);
    }

    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }

    std::vector<detail::PerImageOutcome> outcomes(scenes.size());
    std::atomic<std::size_t> cursor{0};
    auto run_worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= scenes.size()) break;
            outcomes[i] = detail::bench_one_image(model, scenes[i], patterns, budgets, config,
                                                  config.rng_seed);
        }
    };
    if (workers == 1) {
        run_worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker);
        for (std::thread& t : pool) t.join();
    }

    BenchReport report;
    report.patterns = patterns;
    report.budgets = budgets;
    std::vector<bool> clean;
    std::map<std::pair<std::size_t, std::size_t>, std::pair<long, long>> tally;
    for (const detail::PerImageOutcome& out : outcomes) {
        report.skips.insert(report.skips.end(), out.skips.begin(), out.skips.end());
        if (out.skipped_whole) continue;
        clean.push_back(out.clean_detected);
        report.rows.insert(report.rows.end(), out.rows.begin(), out.rows.end());
    }
    report.clean_sdr = sdr(clean);

    report.table.assign(patterns.size(), std::vector<double>(budgets.size(), 0.0));
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        for (std::size_t bi = 0; bi < budgets.size(); ++bi) {
            long det = 0, tot = 0;
            for (const BenchRow& row : report.rows) {
                if (row.pattern == patterns[pi] && row.budget_fraction == budgets[bi]) {
                    ++tot;
                    det += row.detected;
                }
            }
            report.table[pi][bi] = tot ? static_cast<double>(det) / tot : 0.0;
        }
    }
    return report;
}

// Per-image rows. wall_ms is measured time and is the one column that can
// differ between byte-identical reruns.
inline void write_rows_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "image_id,pattern,budget_fraction,detected,best_iou,best_conf,l0_used,rounds,"
           "wall_ms\n";
    char buf[256];
    for (const BenchRow& r : report.rows) {
        std::snprintf(buf, sizeof(buf), "%ld,%s,%.6f,%d,%.6f,%.6f,%ld,%d,%.3f\n", r.image_id,
                      r.pattern.c_str(), r.budget_fraction, r.detected ? 1 : 0, r.best_iou,
                      r.best_conf, r.l0_used, r.rounds, r.wall_ms);
        out << buf;
    }
}

// The SDR summary grid (patterns x budgets, clean row first). Deterministic
// byte-for-byte for a fixed seed.
inline void write_summary_csv(const BenchReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "pattern";
    for (double b : report.budgets) out << ",sdr_" << detail::format_budget_percent(b);
    out << "\n";
    char buf[64];
    out << "clean";
    for (std::size_t bi = 0; bi < report.budgets.size(); ++bi) {
        std::snprintf(buf, sizeof(buf), ",%.6f", report.clean_sdr);
        out << buf;
    }
    out << "\n";
    for (std::size_t pi = 0; pi < report.patterns.size(); ++pi) {
        out << report.patterns[pi];
        for (std::size_t bi = 0; bi < report.budgets.size(); ++bi) {
            std::snprintf(buf, sizeof(buf), ",%.6f", report.table[pi][bi]);
            out << buf;
        }
        out << "\n";
    }
}

inline nlohmann::json report_json(const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRow& r : report.rows)
        rows.push_back({{"image_id", r.image_id},
                        {"pattern", r.pattern},
                        {"budget_fraction", r.budget_fraction},
                        {"detected", r.detected},
                        {"best_iou", r.best_iou},
                        {"best_conf", r.best_conf},
                        {"l0_used", r.l0_used},
                        {"rounds", r.rounds},
                        {"wall_ms", r.wall_ms}});
    nlohmann::json skips = nlohmann::json::array();
    for (const BenchSkip& s : report.skips)
        skips.push_back({{"image_id", s.image_id}, {"pattern", s.pattern}, {"reason", s.reason}});
    nlohmann::json table;
    for (std::size_t pi = 0; pi < report.patterns.size(); ++pi)
        for (std::size_t bi = 0; bi < report.budgets.size(); ++bi)
            table[report.patterns[pi]][detail::format_budget_percent(report.budgets[bi])] =
                report.table[pi][bi];
    return {{"clean_sdr", report.clean_sdr}, {"sdr", table},       {"rows", rows},
            {"skips", skips},                {"config", report.config_echo}};
}

}  // namespace asc
