#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "beansplit/error.hpp"
#include "beansplit/image.hpp"

namespace beansplit {

// Fraction of bean pixels that are split pixels.
inline double bsr(const LabelMask& mask) {
    const std::size_t split = mask.count(PixelClass::Split);
    const std::size_t coat = mask.count(PixelClass::SeedCoat);
    if (split + coat == 0) fail(ErrorCode::NoBeanPixels, "mask has no bean pixels");
    return static_cast<double>(split) / static_cast<double>(split + coat);
}

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;  // nonzero = foreground

    static BinaryMask of_class(const LabelMask& mask, PixelClass c) {
        BinaryMask b;
        b.width = mask.width;
        b.height = mask.height;
        b.values.resize(mask.size());
        for (std::size_t i = 0; i < mask.size(); ++i) b.values[i] = mask.labels[i] == c;
        return b;
    }

    // bean = anything that is not tray
    static BinaryMask of_bean(const LabelMask& mask) {
        BinaryMask b;
        b.width = mask.width;
        b.height = mask.height;
        b.values.resize(mask.size());
        for (std::size_t i = 0; i < mask.size(); ++i) {
            b.values[i] = mask.labels[i] != PixelClass::Tray;
        }
        return b;
    }
};

struct SplitComponent {
    std::size_t area = 0;
    std::vector<std::pair<int, int>> pixels;  // (x, y)
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

// Two-pass connected component labeling with union-find. Components are
// ordered by their first pixel in scan order.
inline std::vector<SplitComponent> connected_components(const BinaryMask& mask, int connectivity = 8) {
    if (connectivity != 4 && connectivity != 8) {
        fail(ErrorCode::InvalidParameter, "connectivity must be 4 or 8");
    }
    const int w = mask.width, h = mask.height;
    std::vector<std::int32_t> labels(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::int32_t> parent;

    auto find = [&parent](std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.values[idx]) continue;
            std::int32_t lbl = -1;
            auto visit = [&](int nx, int ny) {
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) return;
                const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                if (!mask.values[nidx]) return;
                const std::int32_t nl = labels[nidx];
                if (lbl < 0) {
                    lbl = nl;
                } else if (nl != lbl) {
                    unite(nl, lbl);
                }
            };
            visit(x - 1, y);
            visit(x, y - 1);
            if (connectivity == 8) {
                visit(x - 1, y - 1);
                visit(x + 1, y - 1);
            }
            if (lbl < 0) {
                lbl = static_cast<std::int32_t>(parent.size());
                parent.push_back(lbl);
            }
            labels[idx] = lbl;
        }
    }

    // second pass: resolve roots, number components by first appearance
    std::vector<std::int32_t> component_of(parent.size(), -1);
    std::vector<SplitComponent> components;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (labels[idx] < 0) continue;
            const std::int32_t root = find(labels[idx]);
            std::int32_t ci = component_of[root];
            if (ci < 0) {
                ci = static_cast<std::int32_t>(components.size());
                component_of[root] = ci;
                SplitComponent c;
                c.min_x = c.max_x = x;
                c.min_y = c.max_y = y;
                components.push_back(c);
            }
            SplitComponent& c = components[ci];
            c.pixels.emplace_back(x, y);
            ++c.area;
            c.min_x = std::min(c.min_x, x);
            c.max_x = std::max(c.max_x, x);
            c.min_y = std::min(c.min_y, y);
            c.max_y = std::max(c.max_y, y);
        }
    }
    return components;
}

// N-bin histogram of split area ratios. Bin i (1-based) holds the summed
// A_j/A_B of splits whose A_j/M falls in [(i-1)/N, i/N); ratios >= 1 are
// clamped into bin N so no mass is dropped. Bins sum to the BSR.
struct BshHistogram {
    std::vector<double> bins;
    int bin_count = 0;
    std::size_t max_split_area = 0;  // M
    std::size_t bean_area = 0;       // A_B

    double total() const { return std::accumulate(bins.begin(), bins.end(), 0.0); }
};

inline BshHistogram bsh(const std::vector<std::size_t>& split_areas, std::size_t bean_area,
                        std::size_t max_split_area, int bin_count) {
    if (bean_area < 1 || max_split_area < 1 || bin_count < 1) {
        fail(ErrorCode::InvalidParameter, "bsh requires A_B >= 1, M >= 1, N >= 1");
    }
    BshHistogram hist;
    hist.bin_count = bin_count;
    hist.max_split_area = max_split_area;
    hist.bean_area = bean_area;

    // integer pixel sums per bin, divided once, so each bin is the correctly
    // rounded value of its exact rational mass
    std::vector<std::size_t> pixel_sum(static_cast<std::size_t>(bin_count), 0);
    for (std::size_t area : split_areas) {
        std::size_t bin = (static_cast<std::size_t>(bin_count) * area) / max_split_area;
        if (bin >= static_cast<std::size_t>(bin_count)) bin = bin_count - 1;  // clamp
        pixel_sum[bin] += area;
    }
    hist.bins.resize(bin_count);
    for (int i = 0; i < bin_count; ++i) {
        hist.bins[i] = static_cast<double>(pixel_sum[i]) / static_cast<double>(bean_area);
    }
    return hist;
}

// L1 distance between running cumulative sums of raw bin masses; the final
// term charges any total-mass mismatch.
inline double emd_1d(const BshHistogram& a, const BshHistogram& b) {
    if (a.bin_count != b.bin_count) {
        fail(ErrorCode::BinCountMismatch, "histograms have different bin counts");
    }
    double ca = 0.0, cb = 0.0, dist = 0.0;
    for (int i = 0; i < a.bin_count; ++i) {
        ca += a.bins[i];
        cb += b.bins[i];
        dist += std::abs(ca - cb);
    }
    return dist;
}

// Study constant M estimated as the largest connected bean region over a
// calibration set of images with non-touching beans.
inline std::size_t estimate_max_bean_area(const std::vector<LabelMask>& masks,
                                          int connectivity = 8) {
    std::size_t best = 0;
    for (const auto& m : masks) {
        for (const auto& c : connected_components(BinaryMask::of_bean(m), connectivity)) {
            best = std::max(best, c.area);
        }
    }
    if (best == 0) fail(ErrorCode::NoBeanPixels, "no bean pixels in calibration set");
    return best;
}

}  // namespace beansplit
