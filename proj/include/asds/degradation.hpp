#pragma once

#include <cstdint>

#include "asds/image.hpp"
#include "asds/kernel.hpp"

namespace asds {

// Observation model y = DHx + v: blur by `kernel`, decimate by `scale`
// (anchor at pixel (0,0)), add white Gaussian noise of std `noise_sigma`.
// scale == 1 is plain deblurring.
struct Degradation {
    Kernel kernel;
    int scale = 1;
    double noise_sigma = 0.0;
};

Image decimate(const Image& img, int scale);
Image zero_upsample(const Image& img, int scale);

// Forward operator DH (blur, then keep every scale-th pixel).
Image apply_DH(const Image& img, const Degradation& d);

// Adjoint (DH)^T (zero-insertion upsample, then convolve with the
// 180-degree-rotated kernel). Takes the small image.
Image apply_DH_adjoint(const Image& img, const Degradation& d);

// i.i.d. zero-mean Gaussian noise, deterministic for a fixed seed. No
// clipping: values may leave [0,255].
Image add_noise(const Image& img, double sigma, uint64_t seed);

} // namespace asds
