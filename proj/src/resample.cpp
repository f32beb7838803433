#include "asds/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace asds {

static double keys(double x) {
    x = std::abs(x);
    if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
    if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
    return 0.0;
}

Image bicubic_upsample(const Image& img, int scale) {
    if (scale < 1)
        throw std::invalid_argument("bicubic_upsample: scale must be >= 1");
    if (scale == 1) return img;

    int ow = img.width * scale, oh = img.height * scale;

    // Per-phase weights; the source offset pattern only depends on X % scale.
    std::vector<std::array<double, 4>> wts(scale);
    for (int ph = 0; ph < scale; ++ph) {
        double t = static_cast<double>(ph) / scale;
        wts[ph] = {keys(1.0 + t), keys(t), keys(1.0 - t), keys(2.0 - t)};
    }
    auto clamp_idx = [](int i, int n) { return std::clamp(i, 0, n - 1); };

    // Horizontal pass.
    Image tmp(ow, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int X = 0; X < ow; ++X) {
            int i0 = X / scale, ph = X % scale;
            const std::array<double, 4>& w = wts[ph];
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * img.at(y, clamp_idx(i0 - 1 + k, img.width));
            tmp.at(y, X) = acc;
        }

    // Vertical pass.
    Image out(ow, oh);
    for (int Y = 0; Y < oh; ++Y) {
        int j0 = Y / scale, ph = Y % scale;
        const std::array<double, 4>& w = wts[ph];
        for (int X = 0; X < ow; ++X) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k)
                acc += w[k] * tmp.at(clamp_idx(j0 - 1 + k, img.height), X);
            out.at(Y, X) = acc;
        }
    }
    return out;
}

} // namespace asds
