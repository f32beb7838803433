#include "asds/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace asds {

static void check_odd(int size) {
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("kernel size must be odd and positive");
}

Kernel make_delta_kernel() { return Kernel{1, {1.0}}; }

Kernel make_uniform_kernel(int size) {
    check_odd(size);
    Kernel k;
    k.size = size;
    k.taps.assign(static_cast<size_t>(size) * size, 1.0 / (size * size));
    return k;
}

Kernel make_gaussian_kernel(double sigma, int size) {
    check_odd(size);
    if (sigma <= 0.0)
        throw std::invalid_argument("gaussian kernel sigma must be positive");
    Kernel k;
    k.size = size;
    k.taps.resize(static_cast<size_t>(size) * size);
    int r = size / 2;
    double sum = 0.0;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k.taps[(dy + r) * size + (dx + r)] = v;
            sum += v;
        }
    for (double& t : k.taps)
        t /= sum;
    return k;
}

Kernel parse_kernel_spec(const std::string& spec) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        size_t pos = 0;
        while (true) {
            size_t col = s.find(':', pos);
            if (col == std::string::npos) {
                parts.push_back(s.substr(pos));
                break;
            }
            parts.push_back(s.substr(pos, col - pos));
            pos = col + 1;
        }
        return parts;
    };
    std::vector<std::string> parts = split(spec);
    try {
        if (parts[0] == "delta" && parts.size() == 1)
            return make_delta_kernel();
        if (parts[0] == "uniform" && parts.size() == 2)
            return make_uniform_kernel(std::stoi(parts[1]));
        if (parts[0] == "gauss" && parts.size() == 3)
            return make_gaussian_kernel(std::stod(parts[1]), std::stoi(parts[2]));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad kernel spec: " + spec);
    }
    throw std::invalid_argument("bad kernel spec: " + spec +
                                " (expected delta | uniform:<size> | gauss:<sigma>:<size>)");
}

Kernel flip_kernel(const Kernel& k) {
    Kernel f = k;
    std::reverse(f.taps.begin(), f.taps.end());
    return f;
}

Image convolve_periodic(const Image& img, const Kernel& k) {
    int w = img.width, h = img.height, r = k.radius();
    if (k.size > std::min(w, h))
        throw std::invalid_argument("convolve_periodic: kernel larger than image");

    // Wrapped source indices per offset, hoisted out of the pixel loop.
    std::vector<int> wrap_y(static_cast<size_t>(k.size) * h), wrap_x(static_cast<size_t>(k.size) * w);
    for (int dy = -r; dy <= r; ++dy)
        for (int y = 0; y < h; ++y)
            wrap_y[(dy + r) * h + y] = ((y - dy) % h + h) % h;
    for (int dx = -r; dx <= r; ++dx)
        for (int x = 0; x < w; ++x)
            wrap_x[(dx + r) * w + x] = ((x - dx) % w + w) % w;

    Image out(w, h, 0.0);
    for (int dy = -r; dy <= r; ++dy) {
        const int* wy = &wrap_y[(dy + r) * h];
        for (int dx = -r; dx <= r; ++dx) {
            double t = k.tap(dy, dx);
            if (t == 0.0) continue;
            const int* wx = &wrap_x[(dx + r) * w];
            for (int y = 0; y < h; ++y) {
                const double* src = &img.data[static_cast<size_t>(wy[y]) * w];
                double* dst = &out.data[static_cast<size_t>(y) * w];
                for (int x = 0; x < w; ++x)
                    dst[x] += t * src[wx[x]];
            }
        }
    }
    return out;
}

} // namespace asds
