#pragma once

#include <Eigen/Dense>
#include <vector>

#include "asds/image.hpp"

namespace asds {

// Patch extraction layout: anchors at multiples of `stride`, with a final
// anchor clamped to the image edge so the last row/column is always covered.
struct PatchGrid {
    int patch_size = 0;
    int stride = 0;
    int width = 0;
    int height = 0;
    std::vector<int> anchors_x; // top-left x coordinates
    std::vector<int> anchors_y; // top-left y coordinates

    PatchGrid() = default;
    PatchGrid(int patch_size_, int stride_, int width_, int height_);

    int nx() const { return static_cast<int>(anchors_x.size()); }
    int ny() const { return static_cast<int>(anchors_y.size()); }
    int patch_count() const { return nx() * ny(); }
    int patch_area() const { return patch_size * patch_size; }

    // Patches are indexed row-major over (anchor_y, anchor_x).
    int anchor_x(int i) const { return anchors_x[i % nx()]; }
    int anchor_y(int i) const { return anchors_y[i / nx()]; }

    // Linear pixel index of the center of patch i (patch_size/2 offsets).
    int center_pixel(int i) const {
        int half = patch_size / 2;
        return (anchor_y(i) + half) * width + (anchor_x(i) + half);
    }
};

// Pixels of patch i in row-major order (the R_i operator).
Eigen::VectorXd extract_patch(const Image& img, const PatchGrid& grid, int i);

// Pixels of the stride-1 patch anchored at (ax, ay); used by the non-local
// search which scans positions off the grid.
Eigen::VectorXd extract_patch_at(const Image& img, int patch_size, int ax, int ay);

// Per-pixel cover counts, i.e. the diagonal of sum_i R_i^T R_i.
std::vector<int> cover_counts(const PatchGrid& grid);

// Averaging reconstruction: each pixel is the mean of all patch contributions
// covering it.
Image assemble_image(const std::vector<Eigen::VectorXd>& patches, const PatchGrid& grid);

} // namespace asds
