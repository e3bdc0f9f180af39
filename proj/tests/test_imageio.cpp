#include <doctest.h>

#include <cmath>
#include <fstream>

#include "fcit/errors.hpp"
#include "fcit/image.hpp"
#include "fcit/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fcit;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

LdrImage random_gray(int w, int h, std::uint64_t seed) {
    LdrImage img = LdrImage::create(w, h, 1);
    Rng rng(seed);
    for (auto& s : img.samples) s = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

}  // namespace

TEST_CASE("2x2 P6 fixture decodes to known samples") {
    std::vector<std::uint8_t> bytes = bytes_of("P6\n2 2\n255\n");
    const std::uint8_t pixels[12] = {255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};
    bytes.insert(bytes.end(), pixels, pixels + 12);
    LdrImage img = decode_ppm(bytes, "fixture");
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    CHECK(img.channels == 3);
    CHECK(img.at(0, 0, 0) == 255);
    CHECK(img.at(0, 1, 1) == 255);
    CHECK(img.at(1, 0, 2) == 255);
    CHECK(img.at(1, 1, 0) == 10);
    CHECK(img.at(1, 1, 2) == 30);
}

TEST_CASE("PPM maxval other than 255 is an unsupported depth") {
    std::vector<std::uint8_t> bytes = bytes_of("P6\n1 1\n65535\n");
    bytes.insert(bytes.end(), {0, 0, 0, 0, 0, 0});
    CHECK_THROWS_WITH_AS(decode_ppm(bytes, "fixture"),
                         doctest::Contains("unsupported bit depth"), IoError);
}

TEST_CASE("truncated and malformed PPM payloads are rejected") {
    std::vector<std::uint8_t> bytes = bytes_of("P6\n4 4\n255\n");
    bytes.insert(bytes.end(), 10, 0);
    CHECK_THROWS_WITH_AS(decode_ppm(bytes, "fixture"), doctest::Contains("truncated"), IoError);
    CHECK_THROWS_AS(decode_ppm(bytes_of("P6\nx y\n255\n"), "fixture"), IoError);
}

TEST_CASE("PPM and PNG save/load round-trips are bitwise") {
    auto dir = testing::scratch_dir("imageio");
    LdrImage color = testing::synthetic_image(13, 9, 3);
    LdrImage gray = random_gray(13, 9, 4);

    for (const char* ext : {".ppm", ".png"}) {
        auto path = dir / (std::string("color") + ext);
        save_image(color, path);
        CHECK(load_image(path) == color);
    }
    for (const char* ext : {".pgm", ".png"}) {
        auto path = dir / (std::string("gray") + ext);
        save_image(gray, path);
        CHECK(load_image(path) == gray);
    }
}

TEST_CASE("unknown formats and extensions are rejected") {
    auto dir = testing::scratch_dir("imageio");
    auto path = dir / "junk.img";
    write_bytes(path, bytes_of("JUNKJUNKJUNK"));
    CHECK_THROWS_AS(load_image(path), IoError);
    CHECK_THROWS_AS(save_image(testing::synthetic_image(4, 4, 5), dir / "out.bmp"), UsageError);
}

TEST_CASE("luminance of a gray pixel is the pixel") {
    for (float v : {0.0f, 17.0f, 100.0f, 255.0f}) {
        CHECK(luminance(v, v, v) == doctest::Approx(v).epsilon(1e-6));
    }
}

TEST_CASE("luminance of pure red follows the coefficients") {
    CHECK(luminance(255.0f, 0.0f, 0.0f) == doctest::Approx(76.245).epsilon(1e-5));
}

TEST_CASE("analytically iso-luminant colors agree exactly after quantization") {
    using testing::kProbeLeft;
    using testing::kProbeRight;
    // 299R + 587G + 114B match in exact integers.
    long lhs = 299l * kProbeLeft[0] + 587l * kProbeLeft[1] + 114l * kProbeLeft[2];
    long rhs = 299l * kProbeRight[0] + 587l * kProbeRight[1] + 114l * kProbeRight[2];
    CHECK(lhs == rhs);
    float la = luminance(kProbeLeft[0], kProbeLeft[1], kProbeLeft[2]);
    float lb = luminance(kProbeRight[0], kProbeRight[1], kProbeRight[2]);
    CHECK(quantize_sample(la) == quantize_sample(lb));
}

TEST_CASE("luminance is linear") {
    Rng rng(6);
    for (int i = 0; i < 20; ++i) {
        float x[3], y[3];
        for (int c = 0; c < 3; ++c) {
            x[c] = 255.0f * static_cast<float>(rng.uniform());
            y[c] = 255.0f * static_cast<float>(rng.uniform());
        }
        float a = static_cast<float>(rng.uniform()) * 2.0f;
        float b = static_cast<float>(rng.uniform()) * 2.0f;
        float mixed = luminance(a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]);
        float split = a * luminance(x[0], x[1], x[2]) + b * luminance(y[0], y[1], y[2]);
        CHECK(mixed == doctest::Approx(split).epsilon(1e-5));
    }
}

TEST_CASE("tensor round-trip and quantization rules") {
    LdrImage img = testing::synthetic_image(7, 5, 8);
    CHECK(from_tensor(to_tensor(img)) == img);

    CHECK(quantize_sample(255.7f) == 255);
    CHECK(quantize_sample(127.5f) == 128);
    CHECK(quantize_sample(-3.0f) == 0);
    CHECK(quantize_sample(254.5f) == 255);

    CHECK_THROWS_AS(from_tensor(Tensor::zeros({1, 2, 4, 4})), std::invalid_argument);
    CHECK_THROWS_AS(from_tensor(Tensor::zeros({2, 3, 4, 4})), std::invalid_argument);
}

TEST_CASE("RGBE pixel rule: zero exponent and the (m+0.5) formula") {
    std::vector<std::uint8_t> bytes = bytes_of("#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 1 +X 2\n");
    bytes.insert(bytes.end(), {0, 0, 0, 0});          // e=0 pixel -> zeros
    bytes.insert(bytes.end(), {128, 128, 128, 136});  // each channel (128.5/256)*2^8 = 128.5
    HdrImage img = decode_hdr(bytes, "fixture");
    CHECK(img.at(0, 0, 0) == 0.0f);
    CHECK(img.at(0, 0, 1) == 0.0f);
    CHECK(img.at(0, 0, 2) == 0.0f);
    for (int c = 0; c < 3; ++c) {
        CHECK(img.at(0, 1, c) == doctest::Approx(128.5).epsilon(1e-7));
    }
}

TEST_CASE("flat and RLE fixtures decode like the reference decoder") {
    HdrImage source = testing::synthetic_hdr(32, 1e4, 9);
    for (bool rle : {false, true}) {
        std::vector<std::uint8_t> bytes =
            rle ? testing::rgbe_encode_rle(source) : testing::rgbe_encode_flat(source);
        HdrImage lib = decode_hdr(bytes, rle ? "rle" : "flat");
        HdrImage ref = testing::rgbe_decode_reference(bytes);
        REQUIRE(lib.width == source.width);
        REQUIRE(lib.height == source.height);
        double worst = 0.0;
        for (std::size_t i = 0; i < lib.radiance.size(); ++i) {
            worst = std::max(worst,
                             static_cast<double>(std::abs(lib.radiance[i] - ref.radiance[i])));
        }
        CHECK(worst == 0.0);  // same formula, independent decoders

        // Round-trip against the source stays within one mantissa quantum.
        for (int y = 0; y < source.height; ++y) {
            for (int x = 0; x < source.width; ++x) {
                float m = std::max({source.at(y, x, 0), source.at(y, x, 1), source.at(y, x, 2)});
                int e = 0;
                std::frexp(m, &e);
                float quantum = std::ldexp(1.0f, e - 8);  // 2^e/256
                for (int c = 0; c < 3; ++c) {
                    CHECK(std::abs(lib.at(y, x, c) - source.at(y, x, c)) <= quantum);
                }
            }
        }
    }
}

TEST_CASE("RLE scanlines decode identically to flat scanlines") {
    HdrImage source = testing::synthetic_hdr(24, 1e3, 10);
    HdrImage flat = decode_hdr(testing::rgbe_encode_flat(source), "flat");
    HdrImage rle = decode_hdr(testing::rgbe_encode_rle(source), "rle");
    CHECK(flat.radiance == rle.radiance);
}

TEST_CASE("RGBE header errors") {
    CHECK_THROWS_WITH_AS(decode_hdr(bytes_of("BOGUS\n\n-Y 1 +X 1\n"), "f"),
                         doctest::Contains("bad signature"), IoError);
    CHECK_THROWS_WITH_AS(
        decode_hdr(bytes_of("#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n+X 1 -Y 1\n"), "f"),
        doctest::Contains("orientation"), IoError);
    CHECK_THROWS_WITH_AS(
        decode_hdr(bytes_of("#?RADIANCE\nFORMAT=32-bit_rle_xyze\n\n-Y 1 +X 1\n"), "f"),
        doctest::Contains("XYZE"), IoError);
    CHECK_THROWS_WITH_AS(decode_hdr(bytes_of("#?RADIANCE\n\n-Y 1 +X 1\n"), "f"),
                         doctest::Contains("FORMAT"), IoError);
}

TEST_CASE("RLE desync and truncation are rejected") {
    HdrImage source = testing::synthetic_hdr(16, 100, 11);
    std::vector<std::uint8_t> bytes = testing::rgbe_encode_rle(source);
    std::vector<std::uint8_t> truncated(bytes.begin(), bytes.end() - 8);
    CHECK_THROWS_WITH_AS(decode_hdr(truncated, "f"), doctest::Contains("truncated"), IoError);

    // Corrupt the first run/literal count after the scanline marker.
    std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y 16 +X 16\n";
    std::vector<std::uint8_t> corrupt = bytes;
    corrupt[header.size() + 4] = 200;  // promises a 72-pixel run on a 16-pixel line
    CHECK_THROWS_WITH_AS(decode_hdr(corrupt, "f"), doctest::Contains("desync"), IoError);
}

TEST_CASE("synthetic radiance fixture spans at least four orders of magnitude") {
    HdrImage hdr = testing::synthetic_hdr(64, 1e4, 12);
    float lo = std::numeric_limits<float>::max();
    float hi = 0.0f;
    for (int y = 0; y < hdr.height; ++y) {
        for (int x = 0; x < hdr.width; ++x) {
            float l = luminance(hdr.at(y, x, 0), hdr.at(y, x, 1), hdr.at(y, x, 2));
            if (l > 0.0f) {
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
        }
    }
    CHECK(hi / lo >= 1e4f);
}

TEST_CASE("center crop and bilinear resize behave on constants") {
    LdrImage img = LdrImage::create(10, 6, 3);
    for (auto& s : img.samples) s = 77;
    LdrImage cropped = center_crop_square(img);
    CHECK(cropped.width == 6);
    CHECK(cropped.height == 6);
    LdrImage resized = resize_bilinear(cropped, 4, 4);
    for (auto s : resized.samples) CHECK(s == 77);
}
