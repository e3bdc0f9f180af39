#pragma once

#include <string>
#include <vector>

#include "fcit/image.hpp"

namespace fcit {

enum class DownscaleKind { Subsample, Box, Bilinear, Bicubic, Lanczos3 };

std::string to_string(DownscaleKind kind);
DownscaleKind downscale_kind_from_string(const std::string& name);

struct DownscaleMethod {
    DownscaleKind kind = DownscaleKind::Bicubic;
    int factor = 4;
};

// Classical reference operators. Subsample picks the top-left pixel of each
// factor x factor block; the filter kinds apply their standard separable
// kernels (DC gain 1, edge replication at the boundary) and decimate.
LdrImage downscale_baseline(const LdrImage& image, const DownscaleMethod& method);

// Rec. 601 luminance, quantized.
LdrImage decolorize_baseline(const LdrImage& image);

// Mean local SSIM over an 11x11 Gaussian window (sigma 1.5), stabilizers
// C1 = (0.01*255)^2 and C2 = (0.03*255)^2, on grayscale images >= 11x11.
double ssim(const LdrImage& a, const LdrImage& b);

namespace detail {
// Continuous kernel profile evaluated at x (kernel units); radius in the
// same units. Exposed for the kernel-sum checks.
double kernel_value(DownscaleKind kind, double x);
double kernel_radius(DownscaleKind kind);
}  // namespace detail

}  // namespace fcit
