#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "beansplit/csv.hpp"
#include "beansplit/error.hpp"
#include "beansplit/image.hpp"

namespace beansplit {

enum class Partition { Train, Val, Score };

inline const char* partition_name(Partition p) {
    switch (p) {
        case Partition::Train: return "train";
        case Partition::Val: return "val";
        case Partition::Score: return "score";
    }
    return "?";
}

// One canned sample of the study: genotype x retort time x replicate.
struct SampleRecord {
    std::string image_path;
    std::string label_path;  // empty when unlabeled
    std::string genotype;
    int retort_min = 0;   // one of {10,15,20,30,45}
    int replicate = 0;
    Partition partition = Partition::Score;
    std::optional<double> intactness;  // 5-point panel rating when present

    bool has_label() const { return !label_path.empty(); }
};

struct DatasetManifest {
    std::vector<SampleRecord> records;  // row order preserved

    std::vector<const SampleRecord*> partition(Partition p) const {
        std::vector<const SampleRecord*> out;
        for (const auto& r : records) {
            if (r.partition == p) out.push_back(&r);
        }
        return out;
    }

    std::size_t count(Partition p) const { return partition(p).size(); }
};

constexpr std::array<int, 5> kRetortTimes = {10, 15, 20, 30, 45};

inline bool valid_retort_time(int minutes) {
    for (int t : kRetortTimes) {
        if (t == minutes) return true;
    }
    return false;
}

// Manifest CSV: image_path,label_path,genotype,retort_min,replicate,partition,intactness
// Optional columns (label_path, intactness) may be left empty.
inline DatasetManifest load_manifest(const std::string& text) {
    static const std::vector<std::string> kColumns = {
        "image_path", "label_path", "genotype", "retort_min",
        "replicate",  "partition",  "intactness"};

    const auto rows = csv::parse(text);
    if (rows.empty()) fail(ErrorCode::MissingColumn, "empty manifest");

    const auto& header = rows[0];
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (i >= header.size() || header[i] != kColumns[i]) {
            fail(ErrorCode::MissingColumn, "manifest header must be " +
                                               std::string("image_path,label_path,genotype,"
                                                           "retort_min,replicate,partition,intactness"));
        }
    }

    DatasetManifest m;
    std::set<std::string> seen_images;
    for (std::size_t row = 1; row < rows.size(); ++row) {
        const auto& f = rows[row];
        if (f.size() != kColumns.size()) {
            fail(ErrorCode::MissingColumn,
                 "row " + std::to_string(row) + " has " + std::to_string(f.size()) + " fields");
        }
        SampleRecord r;
        r.image_path = f[0];
        r.label_path = f[1];
        r.genotype = f[2];
        try {
            r.retort_min = std::stoi(f[3]);
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidRetortTime,
                 "row " + std::to_string(row) + ": non-numeric retort_min");
        }
        if (!valid_retort_time(r.retort_min)) {
            fail(ErrorCode::InvalidRetortTime,
                 "retort_min " + f[3] + " not in {10,15,20,30,45}");
        }
        try {
            r.replicate = std::stoi(f[4]);
        } catch (const std::exception&) {
            fail(ErrorCode::MissingColumn,
                 "row " + std::to_string(row) + ": non-numeric replicate");
        }
        if (f[5] == "train") {
            r.partition = Partition::Train;
        } else if (f[5] == "val") {
            r.partition = Partition::Val;
        } else if (f[5] == "score") {
            r.partition = Partition::Score;
        } else {
            fail(ErrorCode::MissingColumn, "unknown partition '" + f[5] + "'");
        }
        if ((r.partition == Partition::Train || r.partition == Partition::Val) && !r.has_label()) {
            fail(ErrorCode::MissingLabel, "train/val row " + r.image_path + " has no label_path");
        }
        if (!f[6].empty()) r.intactness = std::stod(f[6]);
        if (r.image_path.empty()) {
            fail(ErrorCode::MissingColumn, "row " + std::to_string(row) + " has empty image_path");
        }
        if (!seen_images.insert(r.image_path).second) {
            fail(ErrorCode::DuplicateImage, r.image_path);
        }
        m.records.push_back(std::move(r));
    }
    return m;
}

inline std::string manifest_to_csv(const DatasetManifest& m) {
    std::string out = "image_path,label_path,genotype,retort_min,replicate,partition,intactness\n";
    for (const auto& r : m.records) {
        out += csv::join_row({r.image_path, r.label_path, r.genotype,
                              std::to_string(r.retort_min), std::to_string(r.replicate),
                              partition_name(r.partition),
                              r.intactness ? std::to_string(*r.intactness) : ""});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dihedral augmentation
// ---------------------------------------------------------------------------

namespace detail {

// Source coordinates for destination pixel (x,y) of dihedral variant k on a
// w x h input. Variants 0..3 rotate clockwise by 90*k degrees; variants 4..7
// mirror horizontally first, then rotate by 90*(k-4).
struct DihedralMap {
    int out_w, out_h;
    int in_w, in_h;
    int variant;

    std::pair<int, int> source(int x, int y) const {
        int sx = x, sy = y;
        const int rot = variant & 3;
        switch (rot) {
            case 0: break;
            case 1:  // dst(x,y) = src(y, H-1-x) for clockwise rotation
                sx = y;
                sy = in_h - 1 - x;
                break;
            case 2:
                sx = in_w - 1 - x;
                sy = in_h - 1 - y;
                break;
            case 3:
                sx = in_w - 1 - y;
                sy = x;
                break;
        }
        if (variant >= 4) sx = in_w - 1 - sx;
        return {sx, sy};
    }
};

inline DihedralMap dihedral_map(int w, int h, int variant) {
    DihedralMap m;
    m.in_w = w;
    m.in_h = h;
    m.variant = variant;
    const bool swap = (variant & 1) != 0;
    m.out_w = swap ? h : w;
    m.out_h = swap ? w : h;
    return m;
}

}  // namespace detail

inline RgbImage dihedral_transform(const RgbImage& im, int variant) {
    const auto map = detail::dihedral_map(im.width, im.height, variant);
    RgbImage out;
    out.width = map.out_w;
    out.height = map.out_h;
    out.pixels.resize(out.size() * 3);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const auto [sx, sy] = map.source(x, y);
            const std::uint8_t* src = im.at(sx, sy);
            std::uint8_t* dst = out.at(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
    return out;
}

inline LabelMask dihedral_transform(const LabelMask& m, int variant) {
    const auto map = detail::dihedral_map(m.width, m.height, variant);
    LabelMask out;
    out.width = map.out_w;
    out.height = map.out_h;
    out.labels.resize(out.size());
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const auto [sx, sy] = map.source(x, y);
            out.at(x, y) = m.at(sx, sy);
        }
    }
    return out;
}

// The 8 dihedral-group transforms applied identically to image and mask.
// Variant 0 is the identity.
inline std::vector<std::pair<RgbImage, LabelMask>> dihedral_variants(const RgbImage& im,
                                                                     const LabelMask& mask) {
    if (im.width != mask.width || im.height != mask.height) {
        fail(ErrorCode::DimensionMismatch, "image and mask dimensions differ");
    }
    std::vector<std::pair<RgbImage, LabelMask>> out;
    out.reserve(8);
    for (int k = 0; k < 8; ++k) {
        out.emplace_back(dihedral_transform(im, k), dihedral_transform(mask, k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Padding
// ---------------------------------------------------------------------------

struct PadOffset {
    int top = 0;
    int left = 0;
};

inline int round_up(int v, int m) { return ((v + m - 1) / m) * m; }

// Pads to the next multiple of m, centering the original raster. New image
// pixels replicate the nearest edge pixel, new mask pixels are Tray.
inline std::pair<RgbImage, PadOffset> pad_to_multiple(const RgbImage& im, int m) {
    const int W = round_up(im.width, m), H = round_up(im.height, m);
    PadOffset off{(H - im.height) / 2, (W - im.width) / 2};
    if (W == im.width && H == im.height) return {im, off};
    RgbImage out;
    out.width = W;
    out.height = H;
    out.pixels.resize(out.size() * 3);
    for (int y = 0; y < H; ++y) {
        const int sy = std::clamp(y - off.top, 0, im.height - 1);
        for (int x = 0; x < W; ++x) {
            const int sx = std::clamp(x - off.left, 0, im.width - 1);
            const std::uint8_t* src = im.at(sx, sy);
            std::uint8_t* dst = out.at(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
    return {std::move(out), off};
}

inline std::pair<LabelMask, PadOffset> pad_to_multiple(const LabelMask& mask, int m) {
    const int W = round_up(mask.width, m), H = round_up(mask.height, m);
    PadOffset off{(H - mask.height) / 2, (W - mask.width) / 2};
    if (W == mask.width && H == mask.height) return {mask, off};
    LabelMask out = LabelMask::filled(W, H, PixelClass::Tray);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            out.at(x + off.left, y + off.top) = mask.at(x, y);
        }
    }
    return {std::move(out), off};
}

inline RgbImage crop(const RgbImage& im, PadOffset off, int w, int h) {
    RgbImage out;
    out.width = w;
    out.height = h;
    out.pixels.resize(out.size() * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t* src = im.at(x + off.left, y + off.top);
            std::uint8_t* dst = out.at(x, y);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }
    return out;
}

inline LabelMask crop(const LabelMask& m, PadOffset off, int w, int h) {
    LabelMask out;
    out.width = w;
    out.height = h;
    out.labels.resize(out.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = m.at(x + off.left, y + off.top);
        }
    }
    return out;
}

}  // namespace beansplit
