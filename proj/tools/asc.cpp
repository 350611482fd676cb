// Command-line surface for the contour-prior sparse attack toolkit.
//
// Subcommands: gen-data, train, attack, bench, render. Exit codes: 0 success,
// 1 usage, 2 I/O, 3 config/validation. ASC_LOG={error|info|debug} controls
// stderr logging; stdout carries machine-readable output only.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asc/asc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

struct AttackFlags {
    double alpha = 0.01;
    int steps = 40;
    int rounds = 60;
    int radius = 3;
    double move_fraction = 0.1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "color ascent step size");
        cmd->add_option("--steps", steps, "color steps per optimization round");
        cmd->add_option("--rounds", rounds, "mask sampling rounds (K)");
        cmd->add_option("--radius", radius, "pixel relocation radius");
        cmd->add_option("--move-fraction", move_fraction, "fraction of pixels moved per round");
    }

    asc::AttackConfig to_config(double budget, std::uint64_t seed) const {
        asc::AttackConfig cfg;
        cfg.alpha_color = alpha;
        cfg.color_steps_per_round = steps;
        cfg.rounds = rounds;
        cfg.sample_radius = radius;
        cfg.move_fraction = move_fraction;
        cfg.budget_fraction = budget;
        cfg.rng_seed = seed;
        return cfg;
    }
};

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : csv) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_gen_data(long n, std::uint64_t seed, const std::string& out_dir) {
    const std::vector<asc::Scene> scenes = asc::gen_scenes(n, seed);
    asc::save_dataset(scenes, out_dir);
    asc::log_info("wrote " + std::to_string(scenes.size()) + " scenes to " + out_dir);
    return kExitOk;
}

int cmd_train(const std::string& data_dir, int epochs, double lr, std::uint64_t seed,
              const std::string& out_path) {
    const std::vector<asc::Scene> scenes = asc::load_dataset(data_dir);
    asc::log_info("training on " + std::to_string(scenes.size()) + " scenes");
    const asc::TrainReport report = asc::train_tiny(scenes, epochs, lr, seed);
    report.model.save(out_path);
    std::printf("val_clean_sdr %.6f\n", report.val_clean_sdr);
    asc::log_info("weights written to " + out_path);
    return kExitOk;
}

asc::GroundTruth find_annotation(const std::string& ann_path, const std::string& image_path,
                                 long image_id, int target_index) {
    const fs::path ann(ann_path);
    const std::string dir = ann.has_parent_path() ? ann.parent_path().string() : ".";
    const std::vector<asc::Scene> scenes = asc::load_dataset(dir);
    const std::string file_name = fs::path(image_path).filename().string();
    for (const asc::Scene& scene : scenes) {
        char expect[32];
        std::snprintf(expect, sizeof(expect), "scene_%06ld.png", scene.id);
        const bool id_match = image_id >= 0 && scene.id == image_id;
        const bool name_match = image_id < 0 && file_name == expect;
        if (id_match || name_match || (image_id < 0 && scenes.size() == 1)) {
            if (target_index < 0 || target_index >= static_cast<int>(scene.objects.size()))
                throw asc::ValueError("target index out of range for image");
            return scene.objects[static_cast<std::size_t>(target_index)];
        }
    }
    throw asc::ValueError("no annotation found for image " + file_name +
                          " (use --image-id to disambiguate)");
}

int cmd_attack(const std::string& model_path, const std::string& image_path,
               const std::string& ann_path, long image_id, int target_index,
               const std::string& pattern, double budget, std::uint64_t seed,
               const AttackFlags& flags, const std::string& out_dir) {
    const asc::TinyDetector model = asc::TinyDetector::load(model_path);
    const asc::Image x = asc::load_image(image_path);
    const asc::GroundTruth gt = find_annotation(ann_path, image_path, image_id, target_index);
    const asc::AttackConfig cfg = flags.to_config(budget, seed);

    asc::AttackResult result;
    if (pattern == "fasc") {
        result = asc::f_asc(model, x, gt, cfg);
    } else if (pattern == "oasc") {
        result = asc::o_asc(model, x, gt, cfg);
    } else {
        const long budget_px = asc::budget_pixels(gt, budget);
        asc::Mask mask;
        if (pattern == "advpatch") {
            mask = asc::adv_patch(gt, budget_px, x.height, x.width);
        } else if (pattern == "fourpatch") {
            mask = asc::four_patch(gt, budget_px, x.height, x.width);
        } else if (pattern == "grid2x2") {
            mask = asc::grid_2x2(gt, budget_px, x.height, x.width);
        } else if (pattern == "smallgrid") {
            mask = asc::small_grid(gt, budget_px, x.height, x.width);
        } else if (pattern == "strip") {
            mask = asc::strip(gt, asc::rasterize_gt(gt, x.height, x.width), budget_px);
        } else {
            throw asc::ValueError("unknown pattern: " + pattern);
        }
        result = asc::attack_with_pattern(model, x, gt, mask, cfg);
        result.pattern_name = pattern;
    }

    asc::save_attack_result(result, x, cfg, out_dir);
    std::printf("success %d l0_used %ld rounds %d final_loss %.6f\n", result.success ? 1 : 0,
                result.l0_used, result.rounds_used, result.final_loss);
    return kExitOk;
}

int cmd_bench(const std::string& model_path, const std::string& data_dir,
              const std::string& patterns_csv, const std::string& budgets_csv,
              std::uint64_t seed, const AttackFlags& flags, int workers,
              const std::string& out_dir) {
    const asc::TinyDetector model = asc::TinyDetector::load(model_path);
    const std::vector<asc::Scene> scenes = asc::load_dataset(data_dir);

    std::vector<std::string> patterns =
        patterns_csv == "all" ? asc::kAllPatterns : split_list(patterns_csv);
    std::vector<double> budgets;
    for (const std::string& tok : split_list(budgets_csv)) {
        try {
            budgets.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw asc::ValueError("bad budget value: " + tok);
        }
    }

    asc::AttackConfig cfg = flags.to_config(budgets.empty() ? 0.05 : budgets.front(), seed);
    asc::BenchReport report = asc::run_bench(model, scenes, patterns, budgets, cfg, workers);
    report.config_echo = asc::attack_config_json(cfg);
    report.config_echo["patterns"] = patterns;
    report.config_echo["budgets"] = budgets;
    report.config_echo["workers"] = workers;
    report.config_echo["images"] = scenes.size();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw asc::IoError("cannot create output directory: " + out_dir);
    asc::write_rows_csv(report, (fs::path(out_dir) / "rows.csv").string());
    asc::write_summary_csv(report, (fs::path(out_dir) / "summary.csv").string());
    std::ofstream json_out((fs::path(out_dir) / "report.json").string());
    if (!json_out) throw asc::IoError("cannot write report.json");
    json_out << asc::report_json(report).dump(1) << "\n";

    std::printf("clean_sdr %.6f\n", report.clean_sdr);
    for (std::size_t pi = 0; pi < report.patterns.size(); ++pi)
        for (std::size_t bi = 0; bi < report.budgets.size(); ++bi)
            std::printf("sdr %s %.1f %.6f\n", report.patterns[pi].c_str(),
                        report.budgets[bi] * 100.0, report.table[pi][bi]);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Contour-prior sparse (l0) attacks on object detectors"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags take precedence)");

    // gen-data
    long gen_n = 200;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "data";
    CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic detection dataset");
    gen->add_option("--n", gen_n, "number of scenes")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output directory")->required();

    // train
    std::string train_data = "data", train_out = "weights.bin";
    int train_epochs = 30;
    double train_lr = 1e-3;
    std::uint64_t train_seed = 0;
    CLI::App* train = app.add_subcommand("train", "train the built-in tiny detector");
    train->add_option("--data", train_data, "dataset directory")->required();
    train->add_option("--epochs", train_epochs, "training epochs");
    train->add_option("--lr", train_lr, "Adam learning rate");
    train->add_option("--seed", train_seed, "RNG seed");
    train->add_option("--out", train_out, "weights output path")->required();

    // attack
    std::string atk_model, atk_image, atk_ann, atk_pattern = "fasc", atk_out = "attack_out";
    double atk_budget = 0.05;
    std::uint64_t atk_seed = 0;
    long atk_image_id = -1;
    int atk_target = 0;
    AttackFlags atk_flags;
    CLI::App* attack = app.add_subcommand("attack", "attack one image");
    attack->add_option("--model", atk_model, "detector weights")->required();
    attack->add_option("--image", atk_image, "input image (png/ppm)")->required();
    attack->add_option("--ann", atk_ann, "COCO-style dataset.json with the annotation")
        ->required();
    attack->add_option("--image-id", atk_image_id, "image id in the annotation file");
    attack->add_option("--target", atk_target, "annotation index of the target object");
    attack
        ->add_option("--pattern", atk_pattern,
                     "advpatch|fourpatch|grid2x2|smallgrid|strip|fasc|oasc")
        ->check(CLI::IsMember(asc::kAllPatterns));
    attack->add_option("--budget", atk_budget, "l0 budget as a fraction of object area");
    attack->add_option("--seed", atk_seed, "RNG seed");
    attack->add_option("--out", atk_out, "output directory");
    atk_flags.add_to(attack);

    // bench
    std::string bench_model, bench_data, bench_patterns = "all",
                bench_budgets = "0.05,0.035", bench_out = "bench_out";
    std::uint64_t bench_seed = 0;
    int bench_workers = 0;
    AttackFlags bench_flags;
    CLI::App* bench = app.add_subcommand("bench", "run the SDR benchmark grid");
    bench->add_option("--model", bench_model, "detector weights")->required();
    bench->add_option("--data", bench_data, "dataset directory")->required();
    bench->add_option("--patterns", bench_patterns, "comma list or 'all'");
    bench->add_option("--budgets", bench_budgets, "comma list of budget fractions");
    bench->add_option("--seed", bench_seed, "RNG seed");
    bench->add_option("--workers", bench_workers, "worker threads (0 = hardware)");
    bench->add_option("--out", bench_out, "output directory");
    bench_flags.add_to(bench);

    // render
    std::string render_result, render_out = "panel.png";
    CLI::App* render = app.add_subcommand("render", "compose result panels into one PNG");
    render->add_option("--result", render_result, "result.json from an attack run")->required();
    render->add_option("--out", render_out, "output PNG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_n, gen_seed, gen_out);
        if (train->parsed())
            return cmd_train(train_data, train_epochs, train_lr, train_seed, train_out);
        if (attack->parsed())
            return cmd_attack(atk_model, atk_image, atk_ann, atk_image_id, atk_target,
                              atk_pattern, atk_budget, atk_seed, atk_flags, atk_out);
        if (bench->parsed())
            return cmd_bench(bench_model, bench_data, bench_patterns, bench_budgets, bench_seed,
                             bench_flags, bench_workers, bench_out);
        if (render->parsed()) {
            asc::render_result_panel(render_result, render_out);
            return kExitOk;
        }
    } catch (const asc::IoError& e) {
        asc::log_error(e.what());
        return kExitIo;
    } catch (const asc::ValueError& e) {
        asc::log_error(e.what());
        return kExitConfig;
    } catch (const asc::ShapeError& e) {
        asc::log_error(e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        asc::log_error(e.what());
        return kExitConfig;
    }
    return kExitUsage;
}
