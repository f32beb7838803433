#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace asds {

// Single-channel intensity raster, row-major doubles on a nominal [0,255]
// scale. Values are not clipped until file save so that all operators stay
// linear.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Image() = default;
    Image(int w, int h, double fill = 0.0) : width(w), height(h) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("Image: dimensions must be positive");
        data.assign(static_cast<size_t>(w) * h, fill);
    }

    double& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }

    int pixel_count() const { return width * height; }

    bool same_dims(const Image& o) const { return width == o.width && height == o.height; }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

inline void require_same_dims(const Image& a, const Image& b, const char* what) {
    if (!a.same_dims(b))
        throw std::invalid_argument(std::string(what) + ": image dimensions differ");
}

} // namespace asds
