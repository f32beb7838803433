#include "asds/degradation.hpp"

#include <random>
#include <stdexcept>

namespace asds {

Image decimate(const Image& img, int scale) {
    if (scale < 1)
        throw std::invalid_argument("decimate: scale must be >= 1");
    if (scale == 1) return img;
    if (img.width % scale != 0 || img.height % scale != 0)
        throw std::invalid_argument("decimate: dimensions not divisible by scale");
    Image out(img.width / scale, img.height / scale);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.at(y, x) = img.at(y * scale, x * scale);
    return out;
}

Image zero_upsample(const Image& img, int scale) {
    if (scale < 1)
        throw std::invalid_argument("zero_upsample: scale must be >= 1");
    if (scale == 1) return img;
    Image out(img.width * scale, img.height * scale, 0.0);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(y * scale, x * scale) = img.at(y, x);
    return out;
}

Image apply_DH(const Image& img, const Degradation& d) {
    if (img.width % d.scale != 0 || img.height % d.scale != 0)
        throw std::invalid_argument("apply_DH: dimensions not divisible by scale");
    return decimate(convolve_periodic(img, d.kernel), d.scale);
}

Image apply_DH_adjoint(const Image& img, const Degradation& d) {
    return convolve_periodic(zero_upsample(img, d.scale), flip_kernel(d.kernel));
}

Image add_noise(const Image& img, double sigma, uint64_t seed) {
    if (sigma < 0.0)
        throw std::invalid_argument("add_noise: sigma must be >= 0");
    if (sigma == 0.0) return img;
    Image out = img;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : out.data)
        v += gauss(rng);
    return out;
}

} // namespace asds
