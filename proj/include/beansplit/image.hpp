#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <string>
#include <variant>
#include <vector>

#include "beansplit/error.hpp"

namespace beansplit {

// Pixel classes of the annotated dataset and their PGM gray codes.
// Any other gray value in a label file is an error, never a nearest match.
enum class PixelClass : std::uint8_t { Tray = 0, SeedCoat = 1, Split = 2 };

constexpr std::uint8_t kClassCodes[3] = {0, 128, 255};

inline std::uint8_t class_to_code(PixelClass c) { return kClassCodes[static_cast<int>(c)]; }

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major r,g,b triples

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    const std::uint8_t* at(int x, int y) const { return &pixels[3 * (static_cast<std::size_t>(y) * width + x)]; }
    std::uint8_t* at(int x, int y) { return &pixels[3 * (static_cast<std::size_t>(y) * width + x)]; }

    static RgbImage filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        RgbImage im;
        im.width = w;
        im.height = h;
        im.pixels.resize(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < im.size(); ++i) {
            im.pixels[3 * i] = r;
            im.pixels[3 * i + 1] = g;
            im.pixels[3 * i + 2] = b;
        }
        return im;
    }

    bool operator==(const RgbImage&) const = default;
};

struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<PixelClass> labels;  // row-major

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    PixelClass at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    PixelClass& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }

    static LabelMask filled(int w, int h, PixelClass c) {
        LabelMask m;
        m.width = w;
        m.height = h;
        m.labels.assign(static_cast<std::size_t>(w) * h, c);
        return m;
    }

    std::size_t count(PixelClass c) const {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), c));
    }

    bool operator==(const LabelMask&) const = default;
};

struct HsvPixel {
    double hue = 0.0;         // degrees in [0,360); 0 for achromatic pixels
    double saturation = 0.0;  // [0,1]
    double value = 0.0;       // [0,1]
};

// Standard hexcone conversion on channels scaled to [0,1].
inline HsvPixel rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;

    HsvPixel out;
    out.value = mx;
    out.saturation = (mx > 0.0) ? delta / mx : 0.0;
    if (delta > 0.0) {
        double h;
        if (mx == r) {
            h = (g - b) / delta;
            if (h < 0.0) h += 6.0;
        } else if (mx == g) {
            h = (b - r) / delta + 2.0;
        } else {
            h = (r - g) / delta + 4.0;
        }
        out.hue = 60.0 * h;
        if (out.hue >= 360.0) out.hue -= 360.0;
    }
    return out;
}

namespace detail {

struct PnmHeader {
    char magic = 0;  // '5' or '6'
    int width = 0;
    int height = 0;
    std::size_t payload_offset = 0;
};

inline PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        fail(ErrorCode::MalformedHeader, "expected binary PPM (P6) or PGM (P5) magic");
    }
    PnmHeader h;
    h.magic = static_cast<char>(bytes[1]);

    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
        if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
            fail(ErrorCode::MalformedHeader, "missing numeric header field");
        }
        long v = 0;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            if (v > 1000000000L) fail(ErrorCode::MalformedHeader, "header field out of range");
            ++pos;
        }
        return v;
    };

    const long w = next_token();
    const long hgt = next_token();
    const long maxval = next_token();
    if (w < 1 || hgt < 1) fail(ErrorCode::MalformedHeader, "nonpositive dimensions");
    if (maxval != 255) fail(ErrorCode::MalformedHeader, "maxval must be 255");
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        fail(ErrorCode::MalformedHeader, "expected single whitespace before payload");
    }
    ++pos;  // exactly one whitespace byte separates header and payload

    h.width = static_cast<int>(w);
    h.height = static_cast<int>(hgt);
    h.payload_offset = pos;
    return h;
}

}  // namespace detail

inline bool is_ppm(const std::vector<std::uint8_t>& bytes) {
    return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

// Binary PPM P6, maxval 255, row-major from the top-left corner.
inline RgbImage decode_ppm(const std::vector<std::uint8_t>& bytes) {
    const auto h = detail::parse_pnm_header(bytes);
    if (h.magic != '6') fail(ErrorCode::MalformedHeader, "expected P6 for an RGB image");
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
    if (bytes.size() - h.payload_offset < need) {
        fail(ErrorCode::TruncatedPayload, "PPM payload shorter than width*height*3");
    }
    RgbImage im;
    im.width = h.width;
    im.height = h.height;
    im.pixels.assign(bytes.begin() + h.payload_offset, bytes.begin() + h.payload_offset + need);
    return im;
}

// Binary PGM P5 with the {0,128,255} class-code table.
inline LabelMask decode_pgm(const std::vector<std::uint8_t>& bytes) {
    const auto h = detail::parse_pnm_header(bytes);
    if (h.magic != '5') fail(ErrorCode::MalformedHeader, "expected P5 for a label mask");
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height;
    if (bytes.size() - h.payload_offset < need) {
        fail(ErrorCode::TruncatedPayload, "PGM payload shorter than width*height");
    }
    LabelMask m;
    m.width = h.width;
    m.height = h.height;
    m.labels.resize(need);
    for (std::size_t i = 0; i < need; ++i) {
        const std::uint8_t v = bytes[h.payload_offset + i];
        switch (v) {
            case 0: m.labels[i] = PixelClass::Tray; break;
            case 128: m.labels[i] = PixelClass::SeedCoat; break;
            case 255: m.labels[i] = PixelClass::Split; break;
            default:
                fail(ErrorCode::UnknownClassCode,
                     "gray value " + std::to_string(int(v)) + " is not one of {0,128,255}");
        }
    }
    return m;
}

// Magic-dispatched decode: P6 payloads become images, P5 payloads become
// label masks.
struct DecodedRaster {
    std::variant<RgbImage, LabelMask> value;

    bool is_image() const { return std::holds_alternative<RgbImage>(value); }
    const RgbImage& image() const { return std::get<RgbImage>(value); }
    const LabelMask& mask() const { return std::get<LabelMask>(value); }
};

inline DecodedRaster decode_image(const std::vector<std::uint8_t>& bytes) {
    if (is_ppm(bytes)) return {decode_ppm(bytes)};
    return {decode_pgm(bytes)};
}

inline std::vector<std::uint8_t> encode_image(const RgbImage& im) {
    const std::string header =
        "P6 " + std::to_string(im.width) + " " + std::to_string(im.height) + " 255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), im.pixels.begin(), im.pixels.end());
    return out;
}

inline std::vector<std::uint8_t> encode_image(const LabelMask& m) {
    const std::string header =
        "P5 " + std::to_string(m.width) + " " + std::to_string(m.height) + " 255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + m.size());
    for (PixelClass c : m.labels) out.push_back(class_to_code(c));
    return out;
}

}  // namespace beansplit
