#include "fcit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace fcit {

std::string to_string(const Shape& s) {
    return "(" + std::to_string(s.n) + "," + std::to_string(s.c) + "," +
           std::to_string(s.h) + "," + std::to_string(s.w) + ")";
}

Tensor::Tensor(Shape s) : shape_(s) {
    if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1) {
        throw std::invalid_argument("tensor extents must all be >= 1, got " + to_string(s));
    }
    data_.assign(static_cast<std::size_t>(s.numel()), 0.0f);
}

Tensor Tensor::full(Shape s, float value) {
    Tensor t(s);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

Tensor Tensor::from(Shape s, std::vector<float> values) {
    Tensor t(s);
    if (static_cast<std::int64_t>(values.size()) != s.numel()) {
        throw std::invalid_argument("value count " + std::to_string(values.size()) +
                                    " does not fill shape " + to_string(s));
    }
    t.data_ = std::move(values);
    return t;
}

bool Tensor::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

float Tensor::min() const {
    return *std::min_element(data_.begin(), data_.end());
}

float Tensor::max() const {
    return *std::max_element(data_.begin(), data_.end());
}

bool Tensor::same_values(const Tensor& other) const {
    if (!(shape_ == other.shape_)) return false;
    return std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0;
}

Tensor pad_replicate(const Tensor& t, int top, int bottom, int left, int right) {
    Tensor out({t.n(), t.c(), t.h() + top + bottom, t.w() + left + right});
    for (int n = 0; n < t.n(); ++n) {
        for (int c = 0; c < t.c(); ++c) {
            for (int y = 0; y < out.h(); ++y) {
                int sy = std::clamp(y - top, 0, t.h() - 1);
                for (int x = 0; x < out.w(); ++x) {
                    int sx = std::clamp(x - left, 0, t.w() - 1);
                    out.at(n, c, y, x) = t.at(n, c, sy, sx);
                }
            }
        }
    }
    return out;
}

Tensor crop(const Tensor& t, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || y0 + h > t.h() || x0 + w > t.w()) {
        throw std::invalid_argument("crop window exceeds tensor extent " + to_string(t.shape()));
    }
    Tensor out({t.n(), t.c(), h, w});
    for (int n = 0; n < t.n(); ++n)
        for (int c = 0; c < t.c(); ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    out.at(n, c, y, x) = t.at(n, c, y0 + y, x0 + x);
    return out;
}

namespace {
std::uint64_t fnv1a(std::uint64_t hash, const void* bytes, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(bytes);
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ull;
    }
    return hash;
}
}  // namespace

std::uint64_t checksum(std::span<const Tensor> tensors) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const Tensor& t : tensors) {
        hash = fnv1a(hash, t.data(), static_cast<std::size_t>(t.numel()) * sizeof(float));
    }
    return hash;
}

std::uint64_t checksum(const Tensor& t) {
    return checksum(std::span<const Tensor>(&t, 1));
}

}  // namespace fcit
