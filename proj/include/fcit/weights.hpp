#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fcit/graph.hpp"

namespace fcit {

// One entry of the layer stack recorded in a weight-archive header.
struct LayerDesc {
    enum class Kind { Conv, Relu, MaxPool, ScaledTanh };
    Kind kind = Kind::Relu;
    std::string name;  // conv layers only
    int kh = 0, kw = 0;
    Conv2dSpec conv;   // stride and padding for conv layers
    float lo = 0.0f, hi = 0.0f;  // scaled_tanh bounds
};

struct ArchiveTensor {
    std::string name;
    std::vector<int> dims;  // rank 1..4
    std::vector<float> data;

    std::int64_t count() const;
};

// Weight archive: a length-prefixed structured-text header (architecture
// name, layer stack, preprocessing means, ordered {tensor name, shape, byte
// offset} list) followed by a raw payload of little-endian float32 values in
// row-major order.
struct WeightArchive {
    std::string arch;
    std::string task;           // transform nets only
    std::vector<float> means;   // loss networks only (3 per-channel means)
    std::vector<LayerDesc> layers;
    std::vector<ArchiveTensor> tensors;

    const ArchiveTensor* find(const std::string& name) const;
};

WeightArchive read_weight_archive(const std::filesystem::path& path);
void write_weight_archive(const WeightArchive& archive, const std::filesystem::path& path);

// Canonical header text with byte offsets computed from the tensor dims.
std::string archive_header_text(const WeightArchive& archive);

std::string to_string(LayerDesc::Kind kind);

}  // namespace fcit
