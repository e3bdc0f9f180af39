#include "fcit/lossnet.hpp"

#include <algorithm>
#include <stdexcept>

#include "fcit/errors.hpp"

namespace fcit {

namespace {

// Out-channel progression of the 19-layer reference configuration up to
// conv5_1, with a 2x2/stride-2 pool closing each of the first four blocks.
struct Vgg19Conv {
    const char* name;
    int out_channels;
    bool pool_after;
};

constexpr Vgg19Conv kVgg19[] = {
    {"conv1_1", 64, false},  {"conv1_2", 64, true},   {"conv2_1", 128, false},
    {"conv2_2", 128, true},  {"conv3_1", 256, false}, {"conv3_2", 256, false},
    {"conv3_3", 256, false}, {"conv3_4", 256, true},  {"conv4_1", 512, false},
    {"conv4_2", 512, false}, {"conv4_3", 512, false}, {"conv4_4", 512, true},
    {"conv5_1", 512, false},
};

constexpr const char* kVgg19Arch = "vgg19-conv5_1";

bool is_tap_name(const std::string& name) {
    return name.size() >= 7 && name.rfind("_1") == name.size() - 2;
}

}  // namespace

LossNetwork LossNetwork::load(const std::filesystem::path& path) {
    return from_archive(read_weight_archive(path));
}

LossNetwork LossNetwork::from_archive(const WeightArchive& archive) {
    LossNetwork net;
    net.arch_ = archive.arch;
    net.means_ = archive.means;
    if (net.means_.size() != 3) {
        throw IoError("loss network archive must carry 3 preprocessing means, found " +
                      std::to_string(net.means_.size()));
    }
    if (archive.layers.empty()) {
        throw IoError("loss network archive describes no layers");
    }

    int channels = 3;
    for (const LayerDesc& layer : archive.layers) {
        switch (layer.kind) {
            case LayerDesc::Kind::Conv: {
                if (layer.kh != 3 || layer.kw != 3 || layer.conv.stride_h != 1 ||
                    layer.conv.stride_w != 1 || layer.conv.pad_kind != PadKind::Zero ||
                    layer.conv.pad != 1) {
                    throw IoError("loss network conv layers must be 3x3, stride 1, zero-pad 1; "
                                  "layer " + layer.name + " is not");
                }
                const ArchiveTensor* w = archive.find(layer.name + ".weight");
                if (!w) throw IoError("missing tensor " + layer.name + ".weight");
                const ArchiveTensor* b = archive.find(layer.name + ".bias");
                if (!b) throw IoError("missing tensor " + layer.name + ".bias");
                if (w->dims.size() != 4 || w->dims[1] != channels || w->dims[2] != 3 ||
                    w->dims[3] != 3) {
                    throw IoError("shape mismatch for tensor " + layer.name +
                                  ".weight: expected (n," + std::to_string(channels) +
                                  ",3,3)");
                }
                if (b->dims.size() != 1 || b->dims[0] != w->dims[0]) {
                    throw IoError("shape mismatch for tensor " + layer.name + ".bias: expected (" +
                                  std::to_string(w->dims[0]) + ")");
                }
                ConvParams params;
                params.weight = std::make_shared<const Tensor>(
                    Tensor::from({w->dims[0], w->dims[1], 3, 3}, w->data));
                params.bias = std::make_shared<const Tensor>(
                    Tensor::from({1, b->dims[0], 1, 1}, b->data));
                net.conv_params_.push_back(std::move(params));
                if (net.has_tap(layer.name)) {
                    throw IoError("duplicate conv layer name " + layer.name);
                }
                channels = w->dims[0];
                net.layers_.push_back(layer);
                if (is_tap_name(layer.name)) {
                    net.tap_names_.push_back(layer.name);
                }
                break;
            }
            case LayerDesc::Kind::Relu:
            case LayerDesc::Kind::MaxPool:
                net.layers_.push_back(layer);
                break;
            case LayerDesc::Kind::ScaledTanh:
                throw IoError("loss network archives cannot contain scaled_tanh layers");
        }
    }
    if (net.tap_names_.empty()) {
        throw IoError("loss network archive has no conv*_1 tap layers");
    }

    if (archive.arch == kVgg19Arch) {
        // Strict check against the reference descriptor.
        std::size_t conv_idx = 0;
        for (const LayerDesc& layer : net.layers_) {
            if (layer.kind != LayerDesc::Kind::Conv) continue;
            if (conv_idx >= std::size(kVgg19) || layer.name != kVgg19[conv_idx].name) {
                throw IoError("shape mismatch vs " + std::string(kVgg19Arch) +
                              " descriptor at conv layer " + layer.name);
            }
            if (net.conv_params_[conv_idx].weight->n() != kVgg19[conv_idx].out_channels) {
                throw IoError("shape mismatch for tensor " + layer.name + ".weight: expected " +
                              std::to_string(kVgg19[conv_idx].out_channels) + " filters");
            }
            ++conv_idx;
        }
        if (conv_idx != std::size(kVgg19)) {
            throw IoError("archive declares arch " + std::string(kVgg19Arch) + " but has " +
                          std::to_string(conv_idx) + " of " +
                          std::to_string(std::size(kVgg19)) + " conv layers");
        }
    }
    return net;
}

bool LossNetwork::has_tap(const std::string& name) const {
    for (const LayerDesc& layer : layers_) {
        if (layer.kind == LayerDesc::Kind::Conv && layer.name == name) return true;
    }
    return false;
}

Shape LossNetwork::tap_shape(const std::string& tap, int batch, int h, int w) const {
    std::size_t conv_idx = 0;
    for (const LayerDesc& layer : layers_) {
        switch (layer.kind) {
            case LayerDesc::Kind::Conv:
                // 3x3 stride-1 zero-pad-1 convs preserve the spatial extent.
                if (layer.name == tap) {
                    return Shape{batch, conv_params_[conv_idx].weight->n(), h, w};
                }
                ++conv_idx;
                break;
            case LayerDesc::Kind::MaxPool:
                h /= 2;
                w /= 2;
                break;
            default:
                break;
        }
    }
    throw std::invalid_argument("unknown tap name " + tap);
}

std::map<std::string, Value> LossNetwork::extract(Graph& graph, Value image,
                                                  const std::set<std::string>& taps) const {
    if (graph.value(image).c() != 3) {
        throw std::invalid_argument("loss network input must have 3 channels, got " +
                                    to_string(graph.value(image).shape()));
    }
    for (const std::string& tap : taps) {
        if (!has_tap(tap)) throw std::invalid_argument("unknown tap name " + tap);
    }
    std::map<std::string, Value> out;
    Value cur = graph.sub_channel_mean(image, means_);
    std::size_t conv_idx = 0;
    for (const LayerDesc& layer : layers_) {
        if (out.size() == taps.size()) break;
        switch (layer.kind) {
            case LayerDesc::Kind::Conv: {
                const ConvParams& p = conv_params_[conv_idx++];
                Value w = graph.leaf(p.weight);
                Value b = graph.leaf(p.bias);
                cur = graph.conv2d(cur, w, b, layer.conv);
                if (taps.count(layer.name)) {
                    out.emplace(layer.name, cur);
                }
                break;
            }
            case LayerDesc::Kind::Relu:
                cur = graph.relu(cur);
                break;
            case LayerDesc::Kind::MaxPool:
                cur = graph.maxpool2x2(cur);
                break;
            default:
                break;
        }
    }
    return out;
}

FeatureMaps LossNetwork::extract_features(const Tensor& image,
                                          const std::set<std::string>& taps) const {
    Graph graph;
    Value img = graph.leaf(image, false);
    auto values = extract(graph, img, taps);
    FeatureMaps maps;
    for (const auto& [name, value] : values) {
        maps.emplace(name, graph.value(value));
    }
    return maps;
}

Value LossNetwork::perceptual_loss(Graph& graph, Value x, Value x_hat,
                                   const std::set<std::string>& taps) const {
    if (taps.empty()) {
        throw std::invalid_argument("perceptual loss requires a non-empty tap set");
    }
    const Tensor& tx = graph.value(x);
    const Tensor& txh = graph.value(x_hat);
    if (!(tx.shape() == txh.shape())) {
        throw std::invalid_argument("perceptual loss inputs must share a shape, got " +
                                    to_string(tx.shape()) + " vs " + to_string(txh.shape()));
    }
    auto fx = extract(graph, x, taps);
    auto fxh = extract(graph, x_hat, taps);
    Value total;
    bool first = true;
    for (const std::string& tap : taps) {
        Value term = graph.normalized_sq_distance(fx.at(tap), fxh.at(tap));
        total = first ? term : graph.add(total, term);
        first = false;
    }
    return total;
}

float LossNetwork::perceptual_loss(const Tensor& x, const Tensor& x_hat,
                                   const std::set<std::string>& taps) const {
    Graph graph;
    Value vx = graph.leaf(x, false);
    Value vxh = graph.leaf(x_hat, false);
    Value loss = perceptual_loss(graph, vx, vxh, taps);
    return graph.value(loss).at(0, 0, 0, 0);
}

std::uint64_t LossNetwork::parameter_checksum() const {
    std::vector<Tensor> all;
    all.reserve(conv_params_.size() * 2);
    for (const ConvParams& p : conv_params_) {
        all.push_back(*p.weight);
        all.push_back(*p.bias);
    }
    return checksum(all);
}

WeightArchive LossNetwork::vgg19_template() {
    WeightArchive archive;
    archive.arch = kVgg19Arch;
    archive.means = {123.68f, 116.779f, 103.939f};
    int in_channels = 3;
    for (const Vgg19Conv& conv : kVgg19) {
        LayerDesc layer;
        layer.kind = LayerDesc::Kind::Conv;
        layer.name = conv.name;
        layer.kh = layer.kw = 3;
        layer.conv = Conv2dSpec{1, 1, PadKind::Zero, 1};
        archive.layers.push_back(layer);
        archive.layers.push_back(LayerDesc{LayerDesc::Kind::Relu});
        if (conv.pool_after) {
            archive.layers.push_back(LayerDesc{LayerDesc::Kind::MaxPool});
        }

        ArchiveTensor w;
        w.name = std::string(conv.name) + ".weight";
        w.dims = {conv.out_channels, in_channels, 3, 3};
        w.data.assign(static_cast<std::size_t>(w.count()), 0.0f);
        archive.tensors.push_back(std::move(w));
        ArchiveTensor b;
        b.name = std::string(conv.name) + ".bias";
        b.dims = {conv.out_channels};
        b.data.assign(static_cast<std::size_t>(conv.out_channels), 0.0f);
        archive.tensors.push_back(std::move(b));
        in_channels = conv.out_channels;
    }
    // The stack ends at conv5_1; drop its trailing relu for clarity.
    archive.layers.pop_back();
    return archive;
}

}  // namespace fcit
