#pragma once

#include "asds/image.hpp"

namespace asds {

// Integer-factor bicubic upsampling (Keys kernel, a = -0.5). Output pixel
// (X, Y) interpolates the source at (X/scale, Y/scale), so pixels at
// multiples of `scale` reproduce the source exactly; this aligns with the
// (0,0)-anchored decimation used by the degradation operator. Border samples
// clamp to the nearest source pixel.
Image bicubic_upsample(const Image& img, int scale);

} // namespace asds
