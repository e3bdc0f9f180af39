#include <cmath>
#include <stdexcept>
#include <vector>

#include "fcit/baselines.hpp"
#include "fcit/errors.hpp"

namespace fcit {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255) * (0.01 * 255);
constexpr double kC2 = (0.03 * 255) * (0.03 * 255);

std::vector<double> gaussian_window() {
    std::vector<double> w(kWindow);
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        double d = i - (kWindow - 1) / 2.0;
        w[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        sum += w[static_cast<std::size_t>(i)];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Valid-mode separable filtering: rows then columns, output
// (h - 10) x (w - 10).
std::vector<double> filter_valid(const std::vector<double>& img, int w, int h,
                                 const std::vector<double>& win) {
    int mw = w - kWindow + 1;
    std::vector<double> mid(static_cast<std::size_t>(h) * mw);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < mw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += win[static_cast<std::size_t>(k)] *
                       img[static_cast<std::size_t>(y) * w + x + k];
            }
            mid[static_cast<std::size_t>(y) * mw + x] = acc;
        }
    }
    int mh = h - kWindow + 1;
    std::vector<double> out(static_cast<std::size_t>(mh) * mw);
    for (int y = 0; y < mh; ++y) {
        for (int x = 0; x < mw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) {
                acc += win[static_cast<std::size_t>(k)] *
                       mid[static_cast<std::size_t>(y + k) * mw + x];
            }
            out[static_cast<std::size_t>(y) * mw + x] = acc;
        }
    }
    return out;
}

}  // namespace

double ssim(const LdrImage& a, const LdrImage& b) {
    if (a.channels != 1 || b.channels != 1) {
        throw std::invalid_argument("ssim expects grayscale images");
    }
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("ssim extent mismatch: " + std::to_string(a.width) + "x" +
                                    std::to_string(a.height) + " vs " + std::to_string(b.width) +
                                    "x" + std::to_string(b.height));
    }
    if (a.width < kWindow || a.height < kWindow) {
        throw std::invalid_argument("ssim needs images of at least 11x11");
    }

    std::size_t count = a.samples.size();
    std::vector<double> va(count), vb(count), vaa(count), vbb(count), vab(count);
    for (std::size_t i = 0; i < count; ++i) {
        va[i] = a.samples[i];
        vb[i] = b.samples[i];
        vaa[i] = va[i] * va[i];
        vbb[i] = vb[i] * vb[i];
        vab[i] = va[i] * vb[i];
    }
    std::vector<double> win = gaussian_window();
    std::vector<double> mu_a = filter_valid(va, a.width, a.height, win);
    std::vector<double> mu_b = filter_valid(vb, a.width, a.height, win);
    std::vector<double> e_aa = filter_valid(vaa, a.width, a.height, win);
    std::vector<double> e_bb = filter_valid(vbb, a.width, a.height, win);
    std::vector<double> e_ab = filter_valid(vab, a.width, a.height, win);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        double var_a = e_aa[i] - mu_a[i] * mu_a[i];
        double var_b = e_bb[i] - mu_b[i] * mu_b[i];
        double cov = e_ab[i] - mu_a[i] * mu_b[i];
        double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
        double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2);
        total += num / den;
    }
    return total / static_cast<double>(mu_a.size());
}

}  // namespace fcit
