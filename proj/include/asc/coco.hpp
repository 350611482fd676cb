#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "asc/contour.hpp"
#include "asc/core.hpp"
#include "asc/image_io.hpp"
#include "asc/scenes.hpp"

namespace asc {

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open annotation file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace detail

// Writes a dataset as COCO-style JSON plus one PNG per image.
inline void save_dataset(const std::vector<Scene>& scenes, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create dataset directory: " + dir);

    nlohmann::json images = nlohmann::json::array();
    nlohmann::json annotations = nlohmann::json::array();
    long ann_id = 1;
    for (const Scene& scene : scenes) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%06ld.png", scene.id);
        save_png(scene.image, (fs::path(dir) / name).string());
        images.push_back({{"id", scene.id},
                          {"height", scene.image.height},
                          {"width", scene.image.width},
                          {"file_name", name}});
        for (const GroundTruth& gt : scene.objects) {
            nlohmann::json segmentation = nlohmann::json::array();
            for (const Polygon& poly : gt.polygons) {
                nlohmann::json ring = nlohmann::json::array();
                for (const auto& v : poly.pts) {
                    ring.push_back(v[1]);  // x
                    ring.push_back(v[0]);  // y
                }
                segmentation.push_back(ring);
            }
            annotations.push_back(
                {{"id", ann_id++},
                 {"image_id", scene.id},
                 {"bbox", {gt.bbox.c0, gt.bbox.r0, gt.bbox.width(), gt.bbox.height()}},
                 {"segmentation", segmentation},
                 {"area", gt.object_area},
                 {"category_id", 1}});
        }
    }
    nlohmann::json root = {{"images", images},
                           {"annotations", annotations},
                           {"categories", {{{"id", 1}, {"name", "object"}}}}};
    std::ofstream out((fs::path(dir) / "dataset.json").string());
    if (!out) throw IoError("cannot write dataset.json in " + dir);
    out << root.dump(1) << "\n";
}

// Parses COCO-style annotations. bbox [x,y,w,h] becomes a (row,col) box;
// segmentation rings [x1,y1,...] become (row,col) polygons.
inline std::vector<GroundTruth> parse_annotation(const nlohmann::json& ann,
                                                 const std::map<long, std::string>& categories) {
    std::vector<GroundTruth> out;
    GroundTruth gt;
    const auto& bbox = ann.at("bbox");
    const double x = bbox.at(0).get<double>(), y = bbox.at(1).get<double>();
    const double w = bbox.at(2).get<double>(), h = bbox.at(3).get<double>();
    gt.bbox = {y, x, y + h, x + w};
    for (const auto& ring : ann.at("segmentation")) {
        Polygon poly;
        for (std::size_t i = 0; i + 1 < ring.size(); i += 2)
            poly.pts.push_back({ring.at(i + 1).get<double>(), ring.at(i).get<double>()});
        gt.polygons.push_back(std::move(poly));
    }
    gt.object_area = ann.value("area", 0L);
    if (ann.contains("category_id")) {
        const auto it = categories.find(ann["category_id"].get<long>());
        gt.category = (it != categories.end()) ? it->second : "object";
    }
    out.push_back(std::move(gt));
    return out;
}

// Loads a dataset directory written by save_dataset (or any COCO-style JSON
// with PNG/PPM images alongside).
inline std::vector<Scene> load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    const std::string json_path = (fs::path(dir) / "dataset.json").string();
    const nlohmann::json root = detail::load_json_file(json_path);

    std::map<long, std::string> categories;
    if (root.contains("categories"))
        for (const auto& cat : root["categories"])
            categories[cat.at("id").get<long>()] = cat.value("name", "object");

    std::map<long, Scene> by_id;
    for (const auto& im : root.at("images")) {
        Scene scene;
        scene.id = im.at("id").get<long>();
        scene.image = load_image((fs::path(dir) / im.at("file_name").get<std::string>()).string());
        if (scene.image.height != im.at("height").get<int>() ||
            scene.image.width != im.at("width").get<int>())
            throw DecodeError("image dimensions disagree with dataset.json for id " +
                              std::to_string(scene.id));
        by_id[scene.id] = std::move(scene);
    }
    for (const auto& ann : root.at("annotations")) {
        const long image_id = ann.at("image_id").get<long>();
        const auto it = by_id.find(image_id);
        if (it == by_id.end())
            throw DecodeError("annotation references unknown image id " +
                              std::to_string(image_id));
        for (GroundTruth& gt : parse_annotation(ann, categories))
            it->second.objects.push_back(std::move(gt));
    }

    std::vector<Scene> scenes;
    scenes.reserve(by_id.size());
    for (auto& [id, scene] : by_id) {
        if (scene.objects.empty())
            throw DecodeError("image id " + std::to_string(id) + " has no annotations");
        scenes.push_back(std::move(scene));
    }
    return scenes;
}

}  // namespace asc
