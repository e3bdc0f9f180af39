#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fcit/graph.hpp"
#include "fcit/weights.hpp"

namespace fcit {

using FeatureMaps = std::map<std::string, Tensor>;

// Fixed feature extractor with named convolutional tap points. Parameters
// are immutable after load; a loaded network is safe to share across
// concurrent sessions. Taps address the convolution outputs before ReLU.
class LossNetwork {
public:
    static LossNetwork load(const std::filesystem::path& path);
    static LossNetwork from_archive(const WeightArchive& archive);

    const std::vector<std::string>& tap_names() const { return tap_names_; }
    bool has_tap(const std::string& name) const;
    const std::vector<float>& means() const { return means_; }

    // Spatial/channel extent a tap would have for a (batch,3,h,w) input,
    // from the layer descriptors alone.
    Shape tap_shape(const std::string& tap, int batch, int h, int w) const;

    // Runs the stack on a 3-channel [0,255]-domain image node and returns
    // the pre-ReLU conv outputs of the requested taps. Stops after the
    // deepest requested tap.
    std::map<std::string, Value> extract(Graph& graph, Value image,
                                         const std::set<std::string>& taps) const;

    FeatureMaps extract_features(const Tensor& image, const std::set<std::string>& taps) const;

    // Sum over taps of the normalized squared feature distance.
    Value perceptual_loss(Graph& graph, Value x, Value x_hat,
                          const std::set<std::string>& taps) const;
    float perceptual_loss(const Tensor& x, const Tensor& x_hat,
                          const std::set<std::string>& taps) const;

    std::uint64_t parameter_checksum() const;

    // Archive skeleton (layer stack, tensor shapes, canonical means) of the
    // 19-layer configuration up to conv5_1, with zero-filled payload.
    static WeightArchive vgg19_template();

private:
    struct ConvParams {
        std::shared_ptr<const Tensor> weight;
        std::shared_ptr<const Tensor> bias;
    };

    std::vector<LayerDesc> layers_;
    std::vector<ConvParams> conv_params_;  // parallel to conv layers, in order
    std::vector<std::string> tap_names_;
    std::vector<float> means_;
    std::string arch_;
};

}  // namespace fcit
