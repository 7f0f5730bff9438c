#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "beansplit/error.hpp"
#include "beansplit/net.hpp"

namespace beansplit {

// Weight file layout ("BSWT" format, version 1):
//   bytes 0..3   magic "BSWT"
//   bytes 4..7   format version, u32 little-endian
//   bytes 8..15  JSON config length, u64 little-endian
//   ...          config JSON (includes model_kind and receptive_field)
//   ...          parameters as IEEE-754 binary32 little-endian, canonical order
//
// Parameters are held in memory as doubles; one save narrows them to float,
// after which save -> load -> save is bit-identical.

inline constexpr std::uint32_t kWeightsFormatVersion = 1;

namespace detail {

inline void put_u32(std::uint8_t* out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
inline void put_u64(std::uint8_t* out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
inline std::uint32_t get_u32(const std::vector<std::uint8_t>& b, std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[off + i]) << (8 * i);
    return v;
}
inline std::uint64_t get_u64(const std::vector<std::uint8_t>& b, std::size_t off) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[off + i]) << (8 * i);
    return v;
}

}  // namespace detail

inline nlohmann::json config_to_json(const NetworkConfig& cfg) {
    return nlohmann::json{
        {"levels", cfg.levels},
        {"channels", cfg.channels},
        {"encoder_convs", cfg.encoder_convs},
        {"decoder_convs", cfg.decoder_convs},
        {"classes", cfg.classes},
        {"input_norm", cfg.input_norm},
    };
}

inline NetworkConfig config_from_json(const nlohmann::json& j) {
    NetworkConfig cfg;
    cfg.levels = j.at("levels").get<int>();
    cfg.channels = j.at("channels").get<std::vector<int>>();
    cfg.encoder_convs = j.at("encoder_convs").get<std::vector<int>>();
    cfg.decoder_convs = j.at("decoder_convs").get<std::vector<int>>();
    cfg.classes = j.at("classes").get<int>();
    cfg.input_norm = j.at("input_norm").get<std::array<double, 3>>();
    cfg.validate();
    return cfg;
}

// User-facing net config files may give only the knobs they care about;
// anything omitted falls back to the default pattern for the level count.
inline NetworkConfig net_config_from_json(const nlohmann::json& j) {
    NetworkConfig cfg;
    cfg.levels = j.value("levels", cfg.levels);
    if (j.contains("channels")) {
        cfg.channels = j.at("channels").get<std::vector<int>>();
    } else {
        cfg.channels.resize(cfg.levels);
        for (int l = 0; l < cfg.levels; ++l) cfg.channels[l] = std::min(16 << l, 64);
    }
    cfg.encoder_convs = j.contains("encoder_convs")
                            ? j.at("encoder_convs").get<std::vector<int>>()
                            : std::vector<int>(cfg.levels, 2);
    cfg.decoder_convs = j.contains("decoder_convs")
                            ? j.at("decoder_convs").get<std::vector<int>>()
                            : std::vector<int>(std::max(cfg.levels - 1, 0), 1);
    cfg.classes = j.value("classes", 2);
    if (j.contains("input_norm")) {
        cfg.input_norm = j.at("input_norm").get<std::array<double, 3>>();
    }
    cfg.validate();
    return cfg;
}

inline std::vector<std::uint8_t> serialize_weights(const NetworkWeights& w) {
    const NetworkLayout lay = make_layout(w.config);
    if (w.params.size() != lay.param_count) {
        fail(ErrorCode::ShapeMismatch, "parameter vector does not match config");
    }
    nlohmann::json cfg = config_to_json(w.config);
    cfg["model_kind"] = model_kind_name(w.kind);
    cfg["receptive_field"] = receptive_field(w.config);
    const std::string cfg_text = cfg.dump();

    std::vector<std::uint8_t> out(16 + cfg_text.size() + w.params.size() * 4);
    out[0] = 'B';
    out[1] = 'S';
    out[2] = 'W';
    out[3] = 'T';
    detail::put_u32(&out[4], kWeightsFormatVersion);
    detail::put_u64(&out[8], cfg_text.size());
    std::memcpy(&out[16], cfg_text.data(), cfg_text.size());
    std::size_t off = 16 + cfg_text.size();
    for (double p : w.params) {
        const float f = static_cast<float>(p);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        detail::put_u32(&out[off], bits);
        off += 4;
    }
    return out;
}

inline NetworkWeights deserialize_weights(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || bytes[0] != 'B' || bytes[1] != 'S' || bytes[2] != 'W' || bytes[3] != 'T') {
        fail(ErrorCode::BadMagic, "not a BSWT weight file");
    }
    const std::uint32_t version = detail::get_u32(bytes, 4);
    if (version != kWeightsFormatVersion) {
        fail(ErrorCode::UnsupportedVersion, "weight file version " + std::to_string(version));
    }
    const std::uint64_t cfg_len = detail::get_u64(bytes, 8);
    if (16 + cfg_len > bytes.size()) {
        fail(ErrorCode::LengthMismatch, "config block exceeds file size");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + cfg_len);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::MalformedHeader, std::string("bad config JSON: ") + e.what());
    }

    NetworkWeights w;
    w.config = config_from_json(j);
    const std::string kind = j.at("model_kind").get<std::string>();
    if (kind == "bean") {
        w.kind = ModelKind::BeanVsTray;
    } else if (kind == "split") {
        w.kind = ModelKind::SplitVsSeedCoat;
    } else {
        fail(ErrorCode::MalformedHeader, "unknown model_kind '" + kind + "'");
    }

    const NetworkLayout lay = make_layout(w.config);
    const std::size_t payload = bytes.size() - 16 - cfg_len;
    if (payload != lay.param_count * 4) {
        fail(ErrorCode::LengthMismatch,
             "expected " + std::to_string(lay.param_count * 4) + " parameter bytes, found " +
                 std::to_string(payload));
    }
    w.params.resize(lay.param_count);
    for (std::size_t i = 0; i < lay.param_count; ++i) {
        const std::uint32_t bits = detail::get_u32(bytes, 16 + cfg_len + 4 * i);
        float f;
        std::memcpy(&f, &bits, 4);
        w.params[i] = static_cast<double>(f);
    }
    return w;
}

// FNV-1a over the serialized bytes; used as the provenance id of a model.
inline std::string weights_id(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace beansplit
