#pragma once

#include <string>
#include <vector>

#include "asds/image.hpp"

namespace asds {

// Square blur kernel with odd side length; taps are normalized to sum 1.
struct Kernel {
    int size = 1;
    std::vector<double> taps{1.0};

    int radius() const { return size / 2; }
    double tap(int dy, int dx) const { return taps[(dy + radius()) * size + (dx + radius())]; }
};

Kernel make_delta_kernel();
Kernel make_uniform_kernel(int size);
Kernel make_gaussian_kernel(double sigma, int size);

// Text forms: "delta", "uniform:9", "gauss:1.6:7".
Kernel parse_kernel_spec(const std::string& spec);

// 180-degree rotation, the adjoint kernel under periodic convolution.
Kernel flip_kernel(const Kernel& k);

// Circular 2-D convolution.
Image convolve_periodic(const Image& img, const Kernel& k);

} // namespace asds
