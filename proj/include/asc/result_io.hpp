#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "asc/attack.hpp"
#include "asc/core.hpp"
#include "asc/image_io.hpp"

namespace asc {

inline nlohmann::json attack_config_json(const AttackConfig& config) {
    return {{"alpha_color", config.alpha_color},
            {"color_steps_per_round", config.color_steps_per_round},
            {"rounds", config.rounds},
            {"sample_radius", config.sample_radius},
            {"move_fraction", config.move_fraction},
            {"budget_fraction", config.budget_fraction},
            {"success_check",
             config.success_check == AttackConfig::SuccessCheck::Detection ? "detection"
                                                                           : "none"},
            {"rng_seed", config.rng_seed},
            {"iou_match_threshold", config.loss.iou_match_threshold},
            {"loss", "disappear"}};
}

// Writes result.json plus PNG renders of the original image, the final mask,
// the color field, and the adversarial composite.
inline void save_attack_result(const AttackResult& result, const Image& x,
                               const AttackConfig& config, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);

    save_png(x, (fs::path(dir) / "original.png").string());
    save_mask_png(result.pattern.mask, (fs::path(dir) / "mask.png").string());
    Image colors_img(result.pattern.colors.height, result.pattern.colors.width);
    colors_img.data = result.pattern.colors.data;
    save_png(colors_img, (fs::path(dir) / "colors.png").string());
    save_png(apply_pattern(x, result.pattern), (fs::path(dir) / "adversarial.png").string());

    nlohmann::json j = {{"pattern", result.pattern_name},
                        {"success", result.success},
                        {"l0_used", result.l0_used},
                        {"rounds_used", result.rounds_used},
                        {"wall_ms", result.wall_ms},
                        {"final_loss", result.final_loss},
                        {"dead_gradient", result.dead_gradient},
                        {"trace", result.trace},
                        {"config", attack_config_json(config)},
                        {"files",
                         {{"original", "original.png"},
                          {"mask", "mask.png"},
                          {"colors", "colors.png"},
                          {"adversarial", "adversarial.png"}}}};
    std::ofstream out((fs::path(dir) / "result.json").string());
    if (!out) throw IoError("cannot write result.json in " + dir);
    out << j.dump(1) << "\n";
}

// Side-by-side panel: original | mask | colors | adversarial.
inline Image compose_panels(const std::vector<Image>& panels, int separator = 2) {
    if (panels.empty()) throw ValueError("compose_panels: nothing to compose");
    int height = 0, width = 0;
    for (const Image& p : panels) {
        height = std::max(height, p.height);
        width += p.width;
    }
    width += separator * static_cast<int>(panels.size() - 1);
    Image out(height, width, 0.15);
    int col = 0;
    for (const Image& p : panels) {
        for (int r = 0; r < p.height; ++r)
            for (int c = 0; c < p.width; ++c)
                for (int ch = 0; ch < 3; ++ch) out.at(r, col + c, ch) = p.at(r, c, ch);
        col += p.width + separator;
    }
    return out;
}

// Re-renders the four panels referenced by a result.json into one PNG.
inline void render_result_panel(const std::string& result_json_path,
                                const std::string& out_png_path) {
    namespace fs = std::filesystem;
    std::ifstream in(result_json_path);
    if (!in) throw IoError("cannot open result file: " + result_json_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("malformed result JSON: " + std::string(e.what()));
    }
    const fs::path base = fs::path(result_json_path).parent_path();
    const auto& files = j.at("files");
    const Mask mask = load_mask_png((base / files.at("mask").get<std::string>()).string());
    Image mask_rgb(mask.height, mask.width);
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            for (int ch = 0; ch < 3; ++ch) mask_rgb.at(r, c, ch) = mask.at(r, c) ? 1.0 : 0.0;
    const Image panel = compose_panels(
        {load_image((base / files.at("original").get<std::string>()).string()), mask_rgb,
         load_image((base / files.at("colors").get<std::string>()).string()),
         load_image((base / files.at("adversarial").get<std::string>()).string())});
    save_png(panel, out_png_path);
}

}  // namespace asc
