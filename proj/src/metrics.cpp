#include "asds/metrics.hpp"

#include <cmath>
#include <vector>

namespace asds {

double mse(const Image& ref, const Image& test) {
    require_same_dims(ref, test, "mse");
    double acc = 0.0;
    for (size_t i = 0; i < ref.data.size(); ++i) {
        double d = ref.data[i] - test.data[i];
        acc += d * d;
    }
    return acc / ref.pixel_count();
}

double psnr(const Image& ref, const Image& test) {
    double m = mse(ref, test);
    if (m == 0.0)
        throw identical_images_error();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

// 'valid' correlation with an 11x11 Gaussian window, no padding.
static std::vector<double> window_filter(const Image& img, const std::vector<double>& win, int wsize) {
    int ow = img.width - wsize + 1, oh = img.height - wsize + 1;
    std::vector<double> out(static_cast<size_t>(ow) * oh, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int dy = 0; dy < wsize; ++dy)
                for (int dx = 0; dx < wsize; ++dx)
                    acc += win[dy * wsize + dx] * img.at(y + dy, x + dx);
            out[static_cast<size_t>(y) * ow + x] = acc;
        }
    return out;
}

double ssim(const Image& ref, const Image& test) {
    require_same_dims(ref, test, "ssim");
    constexpr int wsize = 11;
    constexpr double win_sigma = 1.5;
    constexpr double C1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double C2 = (0.03 * 255.0) * (0.03 * 255.0);
    if (ref.width < wsize || ref.height < wsize)
        throw std::invalid_argument("ssim: image smaller than 11x11 window");

    std::vector<double> win(wsize * wsize);
    double sum = 0.0;
    for (int dy = 0; dy < wsize; ++dy)
        for (int dx = 0; dx < wsize; ++dx) {
            double ry = dy - wsize / 2, rx = dx - wsize / 2;
            double v = std::exp(-(rx * rx + ry * ry) / (2.0 * win_sigma * win_sigma));
            win[dy * wsize + dx] = v;
            sum += v;
        }
    for (double& v : win)
        v /= sum;

    Image ref2(ref.width, ref.height), test2(ref.width, ref.height), cross(ref.width, ref.height);
    for (size_t i = 0; i < ref.data.size(); ++i) {
        ref2.data[i] = ref.data[i] * ref.data[i];
        test2.data[i] = test.data[i] * test.data[i];
        cross.data[i] = ref.data[i] * test.data[i];
    }

    std::vector<double> mu1 = window_filter(ref, win, wsize);
    std::vector<double> mu2 = window_filter(test, win, wsize);
    std::vector<double> e11 = window_filter(ref2, win, wsize);
    std::vector<double> e22 = window_filter(test2, win, wsize);
    std::vector<double> e12 = window_filter(cross, win, wsize);

    double acc = 0.0;
    for (size_t i = 0; i < mu1.size(); ++i) {
        double m1 = mu1[i], m2 = mu2[i];
        double s1 = e11[i] - m1 * m1;
        double s2 = e22[i] - m2 * m2;
        double s12 = e12[i] - m1 * m2;
        double num = (2.0 * m1 * m2 + C1) * (2.0 * s12 + C2);
        double den = (m1 * m1 + m2 * m2 + C1) * (s1 + s2 + C2);
        acc += num / den;
    }
    return acc / static_cast<double>(mu1.size());
}

} // namespace asds
