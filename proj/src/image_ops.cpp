#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fcit/errors.hpp"
#include "fcit/image.hpp"

namespace fcit {

// image_png.cpp
LdrImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& origin);
void encode_png_file(const LdrImage& image, const std::filesystem::path& path);

LdrImage LdrImage::create(int width, int height, int channels) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3)) {
        throw std::invalid_argument("image extents must be positive with 1 or 3 channels");
    }
    LdrImage img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.samples.assign(static_cast<std::size_t>(width) * height * channels, 0);
    return img;
}

HdrImage HdrImage::create(int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("image extents must be positive");
    }
    HdrImage img;
    img.width = width;
    img.height = height;
    img.radiance.assign(static_cast<std::size_t>(width) * height * 3, 0.0f);
    return img;
}

float luminance(float r, float g, float b) {
    return kLumaR * r + kLumaG * g + kLumaB * b;
}

Tensor luminance(const Tensor& rgb) {
    if (rgb.c() != 3) {
        throw std::invalid_argument("luminance expects 3 channels, got " +
                                    to_string(rgb.shape()));
    }
    Tensor out({rgb.n(), 1, rgb.h(), rgb.w()});
    for (int n = 0; n < rgb.n(); ++n)
        for (int y = 0; y < rgb.h(); ++y)
            for (int x = 0; x < rgb.w(); ++x)
                out.at(n, 0, y, x) =
                    luminance(rgb.at(n, 0, y, x), rgb.at(n, 1, y, x), rgb.at(n, 2, y, x));
    return out;
}

Tensor to_tensor(const LdrImage& image) {
    Tensor t({1, image.channels, image.height, image.width});
    for (int c = 0; c < image.channels; ++c)
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                t.at(0, c, y, x) = static_cast<float>(image.at(y, x, c));
    return t;
}

Tensor to_tensor(const HdrImage& image) {
    Tensor t({1, 3, image.height, image.width});
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x)
                t.at(0, c, y, x) = image.at(y, x, c);
    return t;
}

std::uint8_t quantize_sample(float v) {
    v = std::clamp(v, 0.0f, 255.0f);
    long r = std::lround(v);  // rounds half away from zero
    return static_cast<std::uint8_t>(std::min(r, 255l));
}

LdrImage from_tensor(const Tensor& t) {
    if (t.n() != 1) {
        throw std::invalid_argument("from_tensor expects a single batch item, got " +
                                    to_string(t.shape()));
    }
    if (t.c() != 1 && t.c() != 3) {
        throw std::invalid_argument("from_tensor expects 1 or 3 channels, got " +
                                    to_string(t.shape()));
    }
    LdrImage img = LdrImage::create(t.w(), t.h(), t.c());
    for (int c = 0; c < t.c(); ++c)
        for (int y = 0; y < t.h(); ++y)
            for (int x = 0; x < t.w(); ++x)
                img.at(y, x, c) = quantize_sample(t.at(0, c, y, x));
    return img;
}

LdrImage center_crop_square(const LdrImage& image) {
    int side = std::min(image.width, image.height);
    int x0 = (image.width - side) / 2;
    int y0 = (image.height - side) / 2;
    LdrImage out = LdrImage::create(side, side, image.channels);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            for (int c = 0; c < image.channels; ++c)
                out.at(y, x, c) = image.at(y0 + y, x0 + x, c);
    return out;
}

LdrImage resize_bilinear(const LdrImage& image, int width, int height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("resize target extents must be positive");
    }
    if (width == image.width && height == image.height) return image;
    LdrImage out = LdrImage::create(width, height, image.channels);
    double sx = static_cast<double>(image.width) / width;
    double sy = static_cast<double>(image.height) / height;
    for (int y = 0; y < height; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        int y1 = std::clamp(y0 + 1, 0, image.height - 1);
        y0 = std::clamp(y0, 0, image.height - 1);
        for (int x = 0; x < width; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            int x1 = std::clamp(x0 + 1, 0, image.width - 1);
            x0 = std::clamp(x0, 0, image.width - 1);
            for (int c = 0; c < image.channels; ++c) {
                double top = (1.0 - wx) * image.at(y0, x0, c) + wx * image.at(y0, x1, c);
                double bot = (1.0 - wx) * image.at(y1, x0, c) + wx * image.at(y1, x1, c);
                double v = (1.0 - wy) * top + wy * bot;
                out.at(y, x, c) = quantize_sample(static_cast<float>(v));
            }
        }
    }
    return out;
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

LdrImage load_image(const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes = read_file(path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_ppm(bytes, path.string());
    }
    static const std::uint8_t png_magic[4] = {0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::equal(png_magic, png_magic + 4, bytes.begin())) {
        return decode_png(bytes, path.string());
    }
    throw IoError(path.string() + ": unsupported image format (expect PNG or binary PPM/PGM)");
}

void save_image(const LdrImage& image, const std::filesystem::path& path) {
    if (image.channels != 1 && image.channels != 3) {
        throw std::invalid_argument("images must have 1 or 3 channels");
    }
    std::string ext = path.extension().string();
    for (char& ch : ext) ch = static_cast<char>(std::tolower(ch));
    if (ext == ".png") {
        encode_png_file(image, path);
        return;
    }
    if (ext == ".ppm" || ext == ".pgm") {
        std::vector<std::uint8_t> bytes = encode_ppm(image);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + path.string());
        return;
    }
    throw UsageError("unsupported output extension '" + ext + "' (use .png, .ppm or .pgm)");
}

HdrImage load_hdr(const std::filesystem::path& path) {
    return decode_hdr(read_file(path), path.string());
}

}  // namespace fcit
