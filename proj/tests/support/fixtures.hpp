#pragma once

// Deterministic fixtures shared by the unit and acceptance suites.

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fcit/image.hpp"
#include "fcit/weights.hpp"

namespace fcit::testing {

Tensor random_tensor(Shape shape, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f);

// Loss-network archive with `blocks` conv*_1 layers (relu + maxpool between
// blocks), `width` filters each, seeded He-scaled weights.
WeightArchive fixture_lossnet_archive(int blocks, int width, std::uint64_t seed);

// 2-block, 4-filter variant used by most unit tests.
WeightArchive tiny_lossnet_archive(std::uint64_t seed = 7);

// Textured color images (smooth gradients plus random rectangles),
// values spanning [0, 255].
std::vector<Tensor> synthetic_corpus(int count, int size, std::uint64_t seed);
LdrImage synthetic_image(int width, int height, std::uint64_t seed);

// Two-region image whose halves share the exact Rec.601 luminance
// (299R + 587G + 114B identical in integers) but differ in hue.
LdrImage iso_luminant_probe(int size);
// The two probe colors.
extern const std::uint8_t kProbeLeft[3];
extern const std::uint8_t kProbeRight[3];

// Radiance map with luminance spanning [base, base*range] and an achromatic
// gray band in the lower quarter.
HdrImage synthetic_hdr(int size, double range, std::uint64_t seed);

// Radiance RGBE encoders for decoder fixtures.
std::vector<std::uint8_t> rgbe_encode_flat(const HdrImage& img);
std::vector<std::uint8_t> rgbe_encode_rle(const HdrImage& img);

// Unique per-call scratch directory under the system temp root.
std::filesystem::path scratch_dir(const std::string& label);

}  // namespace fcit::testing
