#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fcit/graph.hpp"
#include "fcit/weights.hpp"

namespace fcit {

enum class Task { Downscale, Decolorize, Tonemap };

std::string to_string(Task task);
Task task_from_string(const std::string& name);

struct TransformNetOptions {
    int hidden = 32;  // hidden channel width
    int depth = 2;    // conv layers; for Downscale each conv halves the extent
};

// The trainable mapper: an ordered conv stack with task-specific shape.
//   Downscale:  4x4 kernels, stride 2x2, zero-pad 1, ReLU between convs,
//               3 output channels, no output nonlinearity.
//   Decolorize: 3x3 kernels, stride 1, replication-pad 1, ReLU between
//               convs, single-filter final conv.
//   Tonemap:    as Decolorize but 3 final filters followed by a scaled Tanh
//               onto [0, 255].
// Fully convolutional: a net built (or trained) at one size evaluates on
// any admissible size.
class TransformNet {
public:
    static TransformNet build(Task task, std::uint64_t seed, TransformNetOptions opts = {});
    static TransformNet load(const std::filesystem::path& path);
    static TransformNet from_archive(const WeightArchive& archive);
    void save(const std::filesystem::path& path) const;
    WeightArchive to_archive() const;

    Task task() const { return task_; }
    const TransformNetOptions& options() const { return opts_; }
    int scale_factor() const;  // spatial shrink: 2^depth for Downscale, else 1
    int output_channels() const;

    // Forward pass. When param_leaves is given, the parameters enter the
    // graph as gradient-tracked leaves (one Value per tensor in params()
    // order) for a subsequent backward pass.
    Value forward(Graph& graph, Value input, std::vector<Value>* param_leaves = nullptr) const;
    Tensor forward(const Tensor& input) const;

    // Conv weights and biases interleaved: w0, b0, w1, b1, ...
    std::vector<Tensor>& params() { return params_; }
    const std::vector<Tensor>& params() const { return params_; }
    std::uint64_t params_checksum() const;

private:
    Task task_ = Task::Downscale;
    TransformNetOptions opts_;
    std::vector<LayerDesc> layers_;
    std::vector<Tensor> params_;
};

}  // namespace fcit
