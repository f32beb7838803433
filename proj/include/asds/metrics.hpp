#pragma once

#include <stdexcept>

#include "asds/image.hpp"

namespace asds {

// Thrown by psnr() when MSE is exactly zero; callers report the condition
// instead of a number.
struct identical_images_error : std::invalid_argument {
    identical_images_error() : std::invalid_argument("psnr: images are identical (infinite PSNR)") {}
};

double mse(const Image& ref, const Image& test);

// 10*log10(255^2 / MSE), in dB.
double psnr(const Image& ref, const Image& test);

// Mean structural similarity over 11x11 Gaussian windows (sigma 1.5),
// K1=0.01, K2=0.03, L=255. Requires both dimensions >= 11.
double ssim(const Image& ref, const Image& test);

} // namespace asds
