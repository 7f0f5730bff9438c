#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "beansplit/csv.hpp"
#include "beansplit/dataset.hpp"
#include "beansplit/error.hpp"
#include "beansplit/image.hpp"
#include "beansplit/io.hpp"
#include "beansplit/measures.hpp"
#include "beansplit/net.hpp"
#include "beansplit/weights_io.hpp"

namespace beansplit {

// Everything the A2-A4 pipeline needs: both models plus thresholds and the
// histogram constants.
struct PipelineConfig {
    NetworkWeights bean_model;
    NetworkWeights split_model;
    std::string bean_weights_id;
    std::string split_weights_id;
    double bean_threshold = 0.5;
    double split_threshold = 0.5;
    std::size_t max_split_area = 1;  // M, pixels
    int bin_count = 10;              // N
    int connectivity = 8;

    void validate() const {
        if (bean_threshold < 0.0 || bean_threshold > 1.0 || split_threshold < 0.0 ||
            split_threshold > 1.0) {
            fail(ErrorCode::InvalidParameter, "thresholds must be in [0,1]");
        }
        if (max_split_area < 1 || bin_count < 1) {
            fail(ErrorCode::InvalidParameter, "M and N must be >= 1");
        }
        if (connectivity != 4 && connectivity != 8) {
            fail(ErrorCode::InvalidParameter, "connectivity must be 4 or 8");
        }
        if (bean_model.kind != ModelKind::BeanVsTray) {
            fail(ErrorCode::ShapeMismatch, "bean weights carry the wrong model_kind");
        }
        if (split_model.kind != ModelKind::SplitVsSeedCoat) {
            fail(ErrorCode::ShapeMismatch, "split weights carry the wrong model_kind");
        }
    }

    // stable provenance hash over thresholds, constants and weight ids
    std::string hash() const {
        nlohmann::json j{
            {"bean_weights", bean_weights_id}, {"split_weights", split_weights_id},
            {"bean_threshold", bean_threshold}, {"split_threshold", split_threshold},
            {"M", max_split_area},              {"N", bin_count},
            {"connectivity", connectivity},
        };
        const std::string text = j.dump();
        return weights_id(std::vector<std::uint8_t>(text.begin(), text.end()));
    }
};

// Pipeline config JSON: weight paths are resolved relative to the config
// file's directory.
inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedHeader, "bad pipeline config: " + std::string(e.what()));
    }
    const auto base = path.parent_path();
    PipelineConfig cfg;
    const auto bean_bytes = read_file(base / j.at("bean_weights").get<std::string>());
    const auto split_bytes = read_file(base / j.at("split_weights").get<std::string>());
    cfg.bean_model = deserialize_weights(bean_bytes);
    cfg.split_model = deserialize_weights(split_bytes);
    cfg.bean_weights_id = weights_id(bean_bytes);
    cfg.split_weights_id = weights_id(split_bytes);
    cfg.bean_threshold = j.value("bean_threshold", 0.5);
    cfg.split_threshold = j.at("split_threshold").get<double>();
    cfg.max_split_area = j.at("M").get<std::size_t>();
    cfg.bin_count = j.value("N", 10);
    cfg.connectivity = j.value("connectivity", 8);
    cfg.validate();
    return cfg;
}

inline void write_pipeline_config(const std::filesystem::path& path,
                                  const std::string& bean_weights_rel,
                                  const std::string& split_weights_rel, double bean_threshold,
                                  double split_threshold, std::size_t max_split_area,
                                  int bin_count, int connectivity) {
    nlohmann::json j{
        {"bean_weights", bean_weights_rel}, {"split_weights", split_weights_rel},
        {"bean_threshold", bean_threshold}, {"split_threshold", split_threshold},
        {"M", max_split_area},              {"N", bin_count},
        {"connectivity", connectivity},
    };
    write_text_file(path, j.dump(2) + "\n");
}

struct SampleMeasures {
    std::string image_id;
    double bsr = 0.0;
    std::vector<double> bsh_bins;
    std::size_t n_splits = 0;
    std::size_t split_px = 0;
    std::size_t seedcoat_px = 0;
    std::size_t bean_px = 0;
    std::string config_hash;
};

// A2-A4: classify bean vs tray, then split vs seed coat within bean pixels,
// assemble the 3-class mask, and reduce it to BSR and BSH.
inline LabelMask predict_mask(const PipelineConfig& cfg, const RgbImage& image) {
    cfg.validate();
    const int m = std::max(cfg.bean_model.config.pool_multiple(),
                           cfg.split_model.config.pool_multiple());
    auto [padded, off] = pad_to_multiple(image, m);
    const Tensor bean_prob = softmax(pyramid_forward(cfg.bean_model, padded));
    const Tensor split_prob = softmax(pyramid_forward(cfg.split_model, padded));

    LabelMask mask = LabelMask::filled(image.width, image.height, PixelClass::Tray);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const int py = y + off.top, px = x + off.left;
            if (bean_prob.at(py, px)[1] < cfg.bean_threshold) continue;
            mask.at(x, y) = split_prob.at(py, px)[1] >= cfg.split_threshold
                                ? PixelClass::Split
                                : PixelClass::SeedCoat;
        }
    }
    return mask;
}

inline SampleMeasures measures_from_mask(const PipelineConfig& cfg, const LabelMask& mask,
                                         const std::string& image_id) {
    SampleMeasures sm;
    sm.image_id = image_id;
    sm.config_hash = cfg.hash();
    sm.split_px = mask.count(PixelClass::Split);
    sm.seedcoat_px = mask.count(PixelClass::SeedCoat);
    sm.bean_px = sm.split_px + sm.seedcoat_px;
    if (sm.bean_px == 0) fail(ErrorCode::NoBeanPixels, image_id + ": no predicted bean pixels");
    sm.bsr = bsr(mask);

    std::vector<std::size_t> areas;
    const auto components =
        connected_components(BinaryMask::of_class(mask, PixelClass::Split), cfg.connectivity);
    for (const auto& c : components) areas.push_back(c.area);
    sm.n_splits = components.size();
    sm.bsh_bins = bsh(areas, sm.bean_px, cfg.max_split_area, cfg.bin_count).bins;
    return sm;
}

inline SampleMeasures analyze_image(const PipelineConfig& cfg, const RgbImage& image,
                                    const std::string& image_id) {
    return measures_from_mask(cfg, predict_mask(cfg, image), image_id);
}

// Measures JSON per image.
inline std::string measures_to_json(const SampleMeasures& sm, const PipelineConfig& cfg) {
    nlohmann::json j{
        {"image", sm.image_id},
        {"bsr", sm.bsr},
        {"bsh", sm.bsh_bins},
        {"n_splits", sm.n_splits},
        {"split_px", sm.split_px},
        {"bean_px", sm.bean_px},
        {"M", cfg.max_split_area},
        {"N", cfg.bin_count},
        {"threshold", cfg.split_threshold},
        {"weights_id", cfg.split_weights_id},
        {"config_hash", sm.config_hash},
    };
    return j.dump(2) + "\n";
}

// Measures CSV: image,bsr,bsh_1..N,n_splits,split_px,bean_px
inline std::string measures_csv_header(int bin_count) {
    std::string h = "image,bsr";
    for (int i = 1; i <= bin_count; ++i) h += ",bsh_" + std::to_string(i);
    h += ",n_splits,split_px,bean_px\n";
    return h;
}

inline std::string measures_csv_row(const SampleMeasures& sm) {
    char buf[64];
    std::string row = sm.image_id;
    std::snprintf(buf, sizeof(buf), ",%.12g", sm.bsr);
    row += buf;
    for (double b : sm.bsh_bins) {
        std::snprintf(buf, sizeof(buf), ",%.12g", b);
        row += buf;
    }
    row += "," + std::to_string(sm.n_splits) + "," + std::to_string(sm.split_px) + "," +
           std::to_string(sm.bean_px) + "\n";
    return row;
}

struct MeasuresTable {
    int bin_count = 0;
    std::vector<SampleMeasures> rows;
};

inline MeasuresTable load_measures_csv(const std::string& text) {
    const auto rows = csv::parse(text);
    if (rows.empty() || rows[0].size() < 6 || rows[0][0] != "image" || rows[0][1] != "bsr") {
        fail(ErrorCode::MissingColumn, "not a measures CSV");
    }
    MeasuresTable table;
    table.bin_count = static_cast<int>(rows[0].size()) - 5;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != rows[0].size()) {
            fail(ErrorCode::MissingColumn, "measures row " + std::to_string(i));
        }
        SampleMeasures sm;
        sm.image_id = f[0];
        sm.bsr = std::stod(f[1]);
        for (int b = 0; b < table.bin_count; ++b) sm.bsh_bins.push_back(std::stod(f[2 + b]));
        sm.n_splits = std::stoul(f[2 + table.bin_count]);
        sm.split_px = std::stoul(f[3 + table.bin_count]);
        sm.bean_px = std::stoul(f[4 + table.bin_count]);
        table.rows.push_back(std::move(sm));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Score sidecar: raw 32-bit IEEE-754 little-endian floats, row-major, with a
// JSON companion {width,height,channels}.
// ---------------------------------------------------------------------------

inline void write_score_sidecar(const std::filesystem::path& path, const Tensor& scores) {
    std::vector<std::uint8_t> raw;
    raw.reserve(scores.values.size() * 4);
    for (double v : scores.values) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        for (int i = 0; i < 4; ++i) raw.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    write_file(path, raw);
    nlohmann::json j{{"width", scores.width}, {"height", scores.height},
                     {"channels", scores.channels}};
    write_text_file(path.string() + ".json", j.dump() + "\n");
}

inline Tensor read_score_sidecar(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path.string() + ".json"));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedHeader, "bad score companion: " + std::string(e.what()));
    }
    Tensor t(j.at("height").get<int>(), j.at("width").get<int>(), j.at("channels").get<int>());
    const auto raw = read_file(path);
    if (raw.size() != t.values.size() * 4) {
        fail(ErrorCode::LengthMismatch, "score payload does not match companion dims");
    }
    for (std::size_t i = 0; i < t.values.size(); ++i) {
        std::uint32_t bits = 0;
        for (int k = 0; k < 4; ++k) bits |= static_cast<std::uint32_t>(raw[4 * i + k]) << (8 * k);
        float f;
        std::memcpy(&f, &bits, 4);
        t.values[i] = static_cast<double>(f);
    }
    return t;
}

}  // namespace beansplit
