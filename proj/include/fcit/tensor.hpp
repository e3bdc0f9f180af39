#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fcit {

// Dense 4-D extent in (batch, channels, height, width) order.
struct Shape {
    int n = 0;
    int c = 0;
    int h = 0;
    int w = 0;

    std::int64_t numel() const {
        return std::int64_t(n) * c * h * w;
    }
    bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

// Dense 4-D float32 array in row-major (batch, channel, row, column) order.
// The carrier for images, feature maps, weights and gradients.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape s);  // zero-filled; throws on non-positive extents

    static Tensor zeros(Shape s) { return Tensor(s); }
    static Tensor full(Shape s, float value);
    static Tensor from(Shape s, std::vector<float> values);

    const Shape& shape() const { return shape_; }
    int n() const { return shape_.n; }
    int c() const { return shape_.c; }
    int h() const { return shape_.h; }
    int w() const { return shape_.w; }
    std::int64_t numel() const { return shape_.numel(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::span<float> values() { return data_; }
    std::span<const float> values() const { return data_; }

    float& at(int n, int c, int y, int x) {
        return data_[index(n, c, y, x)];
    }
    float at(int n, int c, int y, int x) const {
        return data_[index(n, c, y, x)];
    }

    std::int64_t index(int n, int c, int y, int x) const {
        return ((std::int64_t(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
    }

    bool all_finite() const;
    float min() const;
    float max() const;

    bool same_values(const Tensor& other) const;  // bitwise equality of shape and data

private:
    Shape shape_;
    std::vector<float> data_;
};

// Replication-pads the spatial extent (clamp-to-edge on all four sides).
Tensor pad_replicate(const Tensor& t, int top, int bottom, int left, int right);

// Crops rows [y0, y0+h) and columns [x0, x0+w).
Tensor crop(const Tensor& t, int y0, int x0, int h, int w);

// FNV-1a over the raw bytes of one or more tensors, in order.
std::uint64_t checksum(std::span<const Tensor> tensors);
std::uint64_t checksum(const Tensor& t);

}  // namespace fcit
