#pragma once

// Independent oracles for the DERIVED expectations. Everything here is
// deliberately written as direct nested loops, separate from the library's
// im2col/graph code paths.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fcit/baselines.hpp"
#include "fcit/graph.hpp"
#include "fcit/image.hpp"
#include "fcit/weights.hpp"

namespace fcit::testing {

// Six-nested-loop convolution.
Tensor conv2d_reference(const Tensor& in, const Tensor& w, const Tensor& bias,
                        const Conv2dSpec& spec);

// Quadruple-nested sum of squared differences over (batch, channel, row,
// column), normalized by the element count.
double nsd_reference(const Tensor& a, const Tensor& b);

// Runs a loss-network archive (mean subtraction, conv/relu/maxpool stack)
// with nested loops and returns the pre-ReLU conv outputs at the taps.
std::map<std::string, Tensor> lossnet_features_reference(const WeightArchive& archive,
                                                         const Tensor& image,
                                                         const std::set<std::string>& taps);

// Per-tap normalized distance summed over taps, all by hand.
double perceptual_loss_reference(const WeightArchive& archive, const Tensor& x,
                                 const Tensor& x_hat, const std::set<std::string>& taps);

// Central finite differences against the analytic backward pass.
struct GradCheck {
    double max_rel = 0.0;
    double mean_rel = 0.0;
};
using GraphBuilder = std::function<Value(Graph&, const std::vector<Value>&)>;
GradCheck grad_check(const std::vector<Tensor>& inputs, const GraphBuilder& build,
                     double h = 1e-3);

// Direct (non-separable) 2-D kernel-sum downscale.
LdrImage downscale_reference(const LdrImage& image, DownscaleKind kind, int factor);

// Direct per-window SSIM with explicit 11x11 Gaussian sums.
double ssim_reference(const LdrImage& a, const LdrImage& b);

// Minimal independent RGBE decoder (flat and adaptive-RLE scanlines).
HdrImage rgbe_decode_reference(const std::vector<std::uint8_t>& bytes);

}  // namespace fcit::testing
