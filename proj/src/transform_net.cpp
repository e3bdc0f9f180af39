#include "fcit/transform_net.hpp"

#include <cmath>
#include <stdexcept>

#include "fcit/errors.hpp"
#include "fcit/rng.hpp"

namespace fcit {

std::string to_string(Task task) {
    switch (task) {
        case Task::Downscale: return "downscale";
        case Task::Decolorize: return "decolorize";
        case Task::Tonemap: return "tonemap";
    }
    return "?";
}

Task task_from_string(const std::string& name) {
    if (name == "downscale") return Task::Downscale;
    if (name == "decolorize") return Task::Decolorize;
    if (name == "tonemap") return Task::Tonemap;
    throw UsageError("unknown task '" + name + "' (downscale|decolorize|tonemap)");
}

namespace {

Tensor he_init(Shape shape, Rng& rng) {
    Tensor t(shape);
    float fan_in = static_cast<float>(shape.c) * shape.h * shape.w;
    float stddev = std::sqrt(2.0f / fan_in);
    for (float& v : t.values()) v = rng.normal(0.0f, stddev);
    return t;
}

}  // namespace

TransformNet TransformNet::build(Task task, std::uint64_t seed, TransformNetOptions opts) {
    if (opts.hidden < 1 || opts.depth < 1) {
        throw UsageError("transform net needs hidden >= 1 and depth >= 1");
    }
    TransformNet net;
    net.task_ = task;
    net.opts_ = opts;
    Rng rng(seed);

    const bool strided = task == Task::Downscale;
    const int last_out = task == Task::Decolorize ? 1 : 3;
    const int k = strided ? 4 : 3;
    Conv2dSpec spec;
    spec.stride_h = spec.stride_w = strided ? 2 : 1;
    spec.pad_kind = strided ? PadKind::Zero : PadKind::Replicate;
    spec.pad = 1;

    int in_channels = 3;
    for (int i = 0; i < opts.depth; ++i) {
        const bool last = i == opts.depth - 1;
        int out_channels = last ? last_out : opts.hidden;
        LayerDesc layer;
        layer.kind = LayerDesc::Kind::Conv;
        layer.name = "conv" + std::to_string(i + 1);
        layer.kh = layer.kw = k;
        layer.conv = spec;
        net.layers_.push_back(layer);
        net.params_.push_back(he_init({out_channels, in_channels, k, k}, rng));
        net.params_.push_back(Tensor::zeros({1, out_channels, 1, 1}));
        if (!last) {
            net.layers_.push_back(LayerDesc{LayerDesc::Kind::Relu});
        }
        in_channels = out_channels;
    }
    if (task == Task::Tonemap) {
        LayerDesc tanh;
        tanh.kind = LayerDesc::Kind::ScaledTanh;
        tanh.lo = 0.0f;
        tanh.hi = 255.0f;
        net.layers_.push_back(tanh);
    }
    return net;
}

int TransformNet::scale_factor() const {
    return task_ == Task::Downscale ? 1 << opts_.depth : 1;
}

int TransformNet::output_channels() const {
    return task_ == Task::Decolorize ? 1 : 3;
}

Value TransformNet::forward(Graph& graph, Value input,
                            std::vector<Value>* param_leaves) const {
    const Tensor& in = graph.value(input);
    if (in.c() != 3) {
        throw std::invalid_argument(to_string(task_) + " net expects a 3-channel input, got " +
                                    to_string(in.shape()));
    }
    if (task_ == Task::Downscale) {
        int f = scale_factor();
        if (in.h() % f != 0 || in.w() % f != 0) {
            throw std::invalid_argument("downscale input extent " + std::to_string(in.h()) +
                                        "x" + std::to_string(in.w()) +
                                        " must be divisible by " + std::to_string(f));
        }
    }

    const bool track = param_leaves != nullptr;
    if (track) param_leaves->clear();
    Value cur = input;
    std::size_t param_idx = 0;
    for (const LayerDesc& layer : layers_) {
        switch (layer.kind) {
            case LayerDesc::Kind::Conv: {
                Value w = graph.leaf(params_[param_idx], track);
                Value b = graph.leaf(params_[param_idx + 1], track);
                if (track) {
                    param_leaves->push_back(w);
                    param_leaves->push_back(b);
                }
                param_idx += 2;
                cur = graph.conv2d(cur, w, b, layer.conv);
                break;
            }
            case LayerDesc::Kind::Relu:
                cur = graph.relu(cur);
                break;
            case LayerDesc::Kind::ScaledTanh:
                cur = graph.scaled_tanh(cur, layer.lo, layer.hi);
                break;
            case LayerDesc::Kind::MaxPool:
                throw std::logic_error("transform nets have no pooling layers");
        }
    }
    return cur;
}

Tensor TransformNet::forward(const Tensor& input) const {
    Graph graph;
    Value in = graph.leaf(input, false);
    Value out = forward(graph, in);
    return graph.value(out);
}

std::uint64_t TransformNet::params_checksum() const {
    return checksum(params_);
}

WeightArchive TransformNet::to_archive() const {
    WeightArchive archive;
    archive.arch = "transform";
    archive.task = to_string(task_);
    archive.layers = layers_;
    std::size_t param_idx = 0;
    for (const LayerDesc& layer : layers_) {
        if (layer.kind != LayerDesc::Kind::Conv) continue;
        const Tensor& w = params_[param_idx];
        const Tensor& b = params_[param_idx + 1];
        param_idx += 2;
        ArchiveTensor wt;
        wt.name = layer.name + ".weight";
        wt.dims = {w.n(), w.c(), w.h(), w.w()};
        wt.data.assign(w.values().begin(), w.values().end());
        archive.tensors.push_back(std::move(wt));
        ArchiveTensor bt;
        bt.name = layer.name + ".bias";
        bt.dims = {b.c()};
        bt.data.assign(b.values().begin(), b.values().end());
        archive.tensors.push_back(std::move(bt));
    }
    return archive;
}

void TransformNet::save(const std::filesystem::path& path) const {
    write_weight_archive(to_archive(), path);
}

TransformNet TransformNet::load(const std::filesystem::path& path) {
    return from_archive(read_weight_archive(path));
}

TransformNet TransformNet::from_archive(const WeightArchive& archive) {
    if (archive.arch != "transform") {
        throw IoError("archive arch '" + archive.arch + "' is not a transform net");
    }
    TransformNet net;
    net.task_ = task_from_string(archive.task);
    net.layers_ = archive.layers;

    int in_channels = 3;
    int convs = 0;
    for (const LayerDesc& layer : net.layers_) {
        if (layer.kind != LayerDesc::Kind::Conv) continue;
        ++convs;
        const ArchiveTensor* w = archive.find(layer.name + ".weight");
        if (!w) throw IoError("missing tensor " + layer.name + ".weight");
        const ArchiveTensor* b = archive.find(layer.name + ".bias");
        if (!b) throw IoError("missing tensor " + layer.name + ".bias");
        if (w->dims.size() != 4 || w->dims[1] != in_channels || w->dims[2] != layer.kh ||
            w->dims[3] != layer.kw) {
            throw IoError("shape mismatch for tensor " + layer.name + ".weight");
        }
        if (b->dims.size() != 1 || b->dims[0] != w->dims[0]) {
            throw IoError("shape mismatch for tensor " + layer.name + ".bias");
        }
        net.params_.push_back(Tensor::from({w->dims[0], w->dims[1], w->dims[2], w->dims[3]},
                                           w->data));
        net.params_.push_back(Tensor::from({1, b->dims[0], 1, 1}, b->data));
        if (convs == 1) net.opts_.hidden = w->dims[0];  // refined below for depth-1 nets
        in_channels = w->dims[0];
    }
    if (convs == 0) throw IoError("transform net archive has no conv layers");
    net.opts_.depth = convs;
    if (convs == 1) net.opts_.hidden = TransformNetOptions{}.hidden;
    int expected_out = net.task_ == Task::Decolorize ? 1 : 3;
    if (in_channels != expected_out) {
        throw IoError("transform net for task " + archive.task + " must end with " +
                      std::to_string(expected_out) + " filters, found " +
                      std::to_string(in_channels));
    }
    return net;
}

}  // namespace fcit
