#include "fcit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fcit/errors.hpp"

namespace fcit {

std::string to_string(DownscaleKind kind) {
    switch (kind) {
        case DownscaleKind::Subsample: return "subsample";
        case DownscaleKind::Box: return "box";
        case DownscaleKind::Bilinear: return "bilinear";
        case DownscaleKind::Bicubic: return "bicubic";
        case DownscaleKind::Lanczos3: return "lanczos3";
    }
    return "?";
}

DownscaleKind downscale_kind_from_string(const std::string& name) {
    if (name == "subsample") return DownscaleKind::Subsample;
    if (name == "box") return DownscaleKind::Box;
    if (name == "bilinear") return DownscaleKind::Bilinear;
    if (name == "bicubic") return DownscaleKind::Bicubic;
    if (name == "lanczos3") return DownscaleKind::Lanczos3;
    throw UsageError("unknown downscale method '" + name +
                     "' (subsample|box|bilinear|bicubic|lanczos3)");
}

namespace detail {

double kernel_radius(DownscaleKind kind) {
    switch (kind) {
        case DownscaleKind::Box: return 0.5;
        case DownscaleKind::Bilinear: return 1.0;
        case DownscaleKind::Bicubic: return 2.0;
        case DownscaleKind::Lanczos3: return 3.0;
        case DownscaleKind::Subsample: return 0.0;
    }
    return 0.0;
}

namespace {
double sinc(double x) {
    if (x == 0.0) return 1.0;
    double px = std::numbers::pi * x;
    return std::sin(px) / px;
}
}  // namespace

double kernel_value(DownscaleKind kind, double x) {
    double a = std::abs(x);
    switch (kind) {
        case DownscaleKind::Box:
            return a <= 0.5 ? 1.0 : 0.0;
        case DownscaleKind::Bilinear:
            return a < 1.0 ? 1.0 - a : 0.0;
        case DownscaleKind::Bicubic: {
            // Keys cubic with a = -0.5.
            constexpr double B = -0.5;
            if (a < 1.0) return (B + 2.0) * a * a * a - (B + 3.0) * a * a + 1.0;
            if (a < 2.0) return B * a * a * a - 5.0 * B * a * a + 8.0 * B * a - 4.0 * B;
            return 0.0;
        }
        case DownscaleKind::Lanczos3:
            return a < 3.0 ? sinc(a) * sinc(a / 3.0) : 0.0;
        case DownscaleKind::Subsample:
            return 0.0;
    }
    return 0.0;
}

}  // namespace detail

namespace {

struct TapSet {
    int first = 0;                 // first input index (clamped later)
    std::vector<double> weights;   // normalized to sum 1
};

// Taps for output index i along one axis: kernel scaled by the factor and
// centered at (i + 0.5)*factor - 0.5.
TapSet make_taps(DownscaleKind kind, int factor, int out_index) {
    double center = (out_index + 0.5) * factor - 0.5;
    double radius = detail::kernel_radius(kind) * factor;
    int lo = static_cast<int>(std::ceil(center - radius));
    int hi = static_cast<int>(std::floor(center + radius));
    TapSet taps;
    taps.first = lo;
    taps.weights.resize(static_cast<std::size_t>(hi - lo + 1));
    double sum = 0.0;
    for (int j = lo; j <= hi; ++j) {
        double w = detail::kernel_value(kind, (j - center) / factor);
        taps.weights[static_cast<std::size_t>(j - lo)] = w;
        sum += w;
    }
    for (double& w : taps.weights) w /= sum;
    return taps;
}

}  // namespace

LdrImage downscale_baseline(const LdrImage& image, const DownscaleMethod& method) {
    if (method.factor < 2) {
        throw std::invalid_argument("downscale factor must be >= 2, got " +
                                    std::to_string(method.factor));
    }
    if (image.width % method.factor != 0 || image.height % method.factor != 0) {
        throw std::invalid_argument("image extent " + std::to_string(image.width) + "x" +
                                    std::to_string(image.height) + " not divisible by factor " +
                                    std::to_string(method.factor));
    }
    int out_w = image.width / method.factor;
    int out_h = image.height / method.factor;
    LdrImage out = LdrImage::create(out_w, out_h, image.channels);

    if (method.kind == DownscaleKind::Subsample) {
        for (int y = 0; y < out_h; ++y)
            for (int x = 0; x < out_w; ++x)
                for (int c = 0; c < image.channels; ++c)
                    out.at(y, x, c) = image.at(y * method.factor, x * method.factor, c);
        return out;
    }

    // Horizontal pass into a double buffer, then vertical pass.
    std::vector<TapSet> htaps(static_cast<std::size_t>(out_w));
    for (int x = 0; x < out_w; ++x) htaps[static_cast<std::size_t>(x)] = make_taps(method.kind, method.factor, x);
    std::vector<TapSet> vtaps(static_cast<std::size_t>(out_h));
    for (int y = 0; y < out_h; ++y) vtaps[static_cast<std::size_t>(y)] = make_taps(method.kind, method.factor, y);

    std::vector<double> mid(static_cast<std::size_t>(image.height) * out_w * image.channels);
    auto mid_at = [&](int y, int x, int c) -> double& {
        return mid[(static_cast<std::size_t>(y) * out_w + x) * image.channels + c];
    };
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const TapSet& taps = htaps[static_cast<std::size_t>(x)];
            for (int c = 0; c < image.channels; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < taps.weights.size(); ++k) {
                    int j = std::clamp(taps.first + static_cast<int>(k), 0, image.width - 1);
                    acc += taps.weights[k] * image.at(y, j, c);
                }
                mid_at(y, x, c) = acc;
            }
        }
    }
    for (int y = 0; y < out_h; ++y) {
        const TapSet& taps = vtaps[static_cast<std::size_t>(y)];
        for (int x = 0; x < out_w; ++x) {
            for (int c = 0; c < image.channels; ++c) {
                double acc = 0.0;
                for (std::size_t k = 0; k < taps.weights.size(); ++k) {
                    int j = std::clamp(taps.first + static_cast<int>(k), 0, image.height - 1);
                    acc += taps.weights[k] * mid_at(j, x, c);
                }
                out.at(y, x, c) = quantize_sample(static_cast<float>(acc));
            }
        }
    }
    return out;
}

LdrImage decolorize_baseline(const LdrImage& image) {
    if (image.channels != 3) {
        throw std::invalid_argument("decolorize baseline expects a 3-channel image");
    }
    LdrImage out = LdrImage::create(image.width, image.height, 1);
    for (int y = 0; y < image.height; ++y)
        for (int x = 0; x < image.width; ++x)
            out.at(y, x, 0) = quantize_sample(
                luminance(image.at(y, x, 0), image.at(y, x, 1), image.at(y, x, 2)));
    return out;
}

}  // namespace fcit
