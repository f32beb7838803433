#include "texture_gen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

asds::Image synth_texture(int width, int height, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    asds::Image img(width, height, 128.0);

    // Smooth background: a few low-frequency waves.
    for (int w = 0; w < 4; ++w) {
        double fx = (uni(rng) - 0.5) * 0.06, fy = (uni(rng) - 0.5) * 0.06;
        double phase = uni(rng) * 6.283185307179586;
        double amp = 10.0 + 15.0 * uni(rng);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                img.at(y, x) += amp * std::sin(fx * x + fy * y + phase);
    }

    // Flat discs and rectangles with sharp boundaries.
    int shapes = 10 + static_cast<int>(uni(rng) * 8);
    for (int s = 0; s < shapes; ++s) {
        double level = (uni(rng) - 0.5) * 130.0;
        if (uni(rng) < 0.5) {
            int cx = static_cast<int>(uni(rng) * width), cy = static_cast<int>(uni(rng) * height);
            int r = 4 + static_cast<int>(uni(rng) * (std::min(width, height) / 5));
            for (int y = std::max(0, cy - r); y < std::min(height, cy + r + 1); ++y)
                for (int x = std::max(0, cx - r); x < std::min(width, cx + r + 1); ++x)
                    if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r)
                        img.at(y, x) += level;
        } else {
            int x0 = static_cast<int>(uni(rng) * width), y0 = static_cast<int>(uni(rng) * height);
            int w = 6 + static_cast<int>(uni(rng) * (width / 4));
            int h = 6 + static_cast<int>(uni(rng) * (height / 4));
            for (int y = y0; y < std::min(height, y0 + h); ++y)
                for (int x = x0; x < std::min(width, x0 + w); ++x)
                    img.at(y, x) += level;
        }
    }

    // Oriented gratings: repetitive stripes the non-local search can exploit.
    int gratings = 6 + static_cast<int>(uni(rng) * 4);
    for (int g = 0; g < gratings; ++g) {
        int x0 = static_cast<int>(uni(rng) * width), y0 = static_cast<int>(uni(rng) * height);
        int w = width / 4 + static_cast<int>(uni(rng) * (width / 3));
        int h = height / 4 + static_cast<int>(uni(rng) * (height / 3));
        double theta = uni(rng) * 3.141592653589793;
        double freq = 0.25 + uni(rng) * 1.0;
        double amp = 25.0 + uni(rng) * 35.0;
        double cx = std::cos(theta) * freq, cy = std::sin(theta) * freq;
        for (int y = y0; y < std::min(height, y0 + h); ++y)
            for (int x = x0; x < std::min(width, x0 + w); ++x)
                img.at(y, x) += amp * std::sin(cx * x + cy * y);
    }

    // A couple of fine checkers.
    for (int c = 0; c < 3; ++c) {
        int x0 = static_cast<int>(uni(rng) * width), y0 = static_cast<int>(uni(rng) * height);
        int w = width / 6 + static_cast<int>(uni(rng) * (width / 6));
        int h = height / 6 + static_cast<int>(uni(rng) * (height / 6));
        int cell = 2 + static_cast<int>(uni(rng) * 3);
        double amp = 20.0 + uni(rng) * 25.0;
        for (int y = y0; y < std::min(height, y0 + h); ++y)
            for (int x = x0; x < std::min(width, x0 + w); ++x)
                img.at(y, x) += (((x / cell) + (y / cell)) % 2 == 0 ? amp : -amp);
    }

    for (double& v : img.data)
        v = std::clamp(v, 2.0, 253.0);
    return img;
}
