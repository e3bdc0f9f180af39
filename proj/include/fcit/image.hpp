#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fcit/tensor.hpp"

namespace fcit {

// 8-bit display-range image, row-major interleaved samples, 1 or 3 channels.
struct LdrImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;

    static LdrImage create(int width, int height, int channels);
    std::uint8_t& at(int y, int x, int c) {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int y, int x, int c) const {
        return samples[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool operator==(const LdrImage&) const = default;
};

// Linear radiance map, 3 interleaved float channels, finite and >= 0.
struct HdrImage {
    int width = 0;
    int height = 0;
    std::vector<float> radiance;

    static HdrImage create(int width, int height);
    float& at(int y, int x, int c) {
        return radiance[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    float at(int y, int x, int c) const {
        return radiance[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

// PNG (8-bit gray/RGB) and binary PPM/PGM (P6/P5, maxval 255). The loader
// dispatches on magic bytes, the saver on the file extension.
LdrImage load_image(const std::filesystem::path& path);
void save_image(const LdrImage& image, const std::filesystem::path& path);

LdrImage decode_ppm(const std::vector<std::uint8_t>& bytes, const std::string& origin);
std::vector<std::uint8_t> encode_ppm(const LdrImage& image);

// Radiance RGBE (.hdr/.pic), flat or adaptive-RLE scanlines, -Y +X
// orientation. Component m with shared exponent e decodes to
// (m + 0.5)/256 * 2^(e-128), and e = 0 denotes a zero pixel.
HdrImage load_hdr(const std::filesystem::path& path);
HdrImage decode_hdr(const std::vector<std::uint8_t>& bytes, const std::string& origin);

// Rec. 601 luma; the single luminance definition used throughout.
inline constexpr float kLumaR = 0.299f;
inline constexpr float kLumaG = 0.587f;
inline constexpr float kLumaB = 0.114f;

// (n,3,h,w) -> (n,1,h,w)
Tensor luminance(const Tensor& rgb);
float luminance(float r, float g, float b);

// Samples map to reals in [0,255]; the way back clamps and rounds half away
// from zero. Tensors carry a single batch item.
Tensor to_tensor(const LdrImage& image);
Tensor to_tensor(const HdrImage& image);
LdrImage from_tensor(const Tensor& t);
std::uint8_t quantize_sample(float v);

LdrImage center_crop_square(const LdrImage& image);
LdrImage resize_bilinear(const LdrImage& image, int width, int height);

}  // namespace fcit
