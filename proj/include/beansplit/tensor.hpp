#pragma once

#include <cstddef>
#include <vector>

#include "beansplit/error.hpp"

namespace beansplit {

// Dense H x W x C raster of doubles, channel innermost. Reference mode runs
// everything at 64-bit precision; weights are narrowed to 32-bit only on disk.
struct Tensor {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> values;  // index ((y*width)+x)*channels + c

    Tensor() = default;
    Tensor(int h, int w, int c)
        : height(h), width(w), channels(c),
          values(static_cast<std::size_t>(h) * w * c, 0.0) {}

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }

    double* at(int y, int x) {
        return &values[(static_cast<std::size_t>(y) * width + x) * channels];
    }
    const double* at(int y, int x) const {
        return &values[(static_cast<std::size_t>(y) * width + x) * channels];
    }

    bool same_shape(const Tensor& o) const {
        return height == o.height && width == o.width && channels == o.channels;
    }

    bool operator==(const Tensor&) const = default;
};

// Network output scores, one channel per class, same layout as Tensor.
using ScoreMap = Tensor;

}  // namespace beansplit
