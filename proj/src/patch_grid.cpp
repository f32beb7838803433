#include "asds/patch_grid.hpp"

#include <stdexcept>

namespace asds {

static std::vector<int> make_anchors(int extent, int patch_size, int stride) {
    std::vector<int> anchors;
    int last = extent - patch_size;
    for (int a = 0; a <= last; a += stride)
        anchors.push_back(a);
    if (anchors.back() != last)
        anchors.push_back(last);
    return anchors;
}

PatchGrid::PatchGrid(int patch_size_, int stride_, int width_, int height_)
    : patch_size(patch_size_), stride(stride_), width(width_), height(height_) {
    if (patch_size < 1)
        throw std::invalid_argument("PatchGrid: patch_size must be >= 1");
    if (stride < 1 || stride > patch_size)
        throw std::invalid_argument("PatchGrid: require 1 <= stride <= patch_size");
    if (width < patch_size || height < patch_size)
        throw std::invalid_argument("PatchGrid: image smaller than patch");
    anchors_x = make_anchors(width, patch_size, stride);
    anchors_y = make_anchors(height, patch_size, stride);
}

Eigen::VectorXd extract_patch_at(const Image& img, int patch_size, int ax, int ay) {
    Eigen::VectorXd p(patch_size * patch_size);
    int k = 0;
    for (int dy = 0; dy < patch_size; ++dy)
        for (int dx = 0; dx < patch_size; ++dx)
            p[k++] = img.at(ay + dy, ax + dx);
    return p;
}

Eigen::VectorXd extract_patch(const Image& img, const PatchGrid& grid, int i) {
    if (i < 0 || i >= grid.patch_count())
        throw std::invalid_argument("extract_patch: patch index out of range");
    return extract_patch_at(img, grid.patch_size, grid.anchor_x(i), grid.anchor_y(i));
}

std::vector<int> cover_counts(const PatchGrid& grid) {
    std::vector<int> counts(static_cast<size_t>(grid.width) * grid.height, 0);
    for (int ay : grid.anchors_y)
        for (int ax : grid.anchors_x)
            for (int dy = 0; dy < grid.patch_size; ++dy)
                for (int dx = 0; dx < grid.patch_size; ++dx)
                    counts[static_cast<size_t>(ay + dy) * grid.width + (ax + dx)]++;
    return counts;
}

Image assemble_image(const std::vector<Eigen::VectorXd>& patches, const PatchGrid& grid) {
    if (static_cast<int>(patches.size()) != grid.patch_count())
        throw std::invalid_argument("assemble_image: patch list length mismatch");
    Image out(grid.width, grid.height, 0.0);
    for (int i = 0; i < grid.patch_count(); ++i) {
        const Eigen::VectorXd& p = patches[i];
        int ax = grid.anchor_x(i), ay = grid.anchor_y(i);
        int k = 0;
        for (int dy = 0; dy < grid.patch_size; ++dy)
            for (int dx = 0; dx < grid.patch_size; ++dx)
                out.at(ay + dy, ax + dx) += p[k++];
    }
    std::vector<int> counts = cover_counts(grid);
    for (int j = 0; j < out.pixel_count(); ++j)
        out.data[j] /= counts[j];
    return out;
}

} // namespace asds
