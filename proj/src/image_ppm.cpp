#include <cctype>
#include <cstring>
#include <string>

#include "fcit/errors.hpp"
#include "fcit/image.hpp"

namespace fcit {

namespace {

// Advances past whitespace and '#' comment lines between header tokens.
std::size_t skip_separators(const std::vector<std::uint8_t>& bytes, std::size_t pos,
                            const std::string& origin) {
    while (pos < bytes.size()) {
        if (std::isspace(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            return pos;
        }
    }
    throw IoError(origin + ": malformed PPM header (unexpected end of file)");
}

int read_header_int(const std::vector<std::uint8_t>& bytes, std::size_t& pos,
                    const std::string& origin) {
    pos = skip_separators(bytes, pos, origin);
    if (!std::isdigit(bytes[pos])) {
        throw IoError(origin + ": malformed PPM header (expected a number)");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        v = v * 10 + (bytes[pos] - '0');
        if (v > 1'000'000'000) throw IoError(origin + ": malformed PPM header (huge number)");
        ++pos;
    }
    return static_cast<int>(v);
}

}  // namespace

LdrImage decode_ppm(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        throw IoError(origin + ": not a binary PPM/PGM file");
    }
    int channels = bytes[1] == '6' ? 3 : 1;
    std::size_t pos = 2;
    int width = read_header_int(bytes, pos, origin);
    int height = read_header_int(bytes, pos, origin);
    int maxval = read_header_int(bytes, pos, origin);
    if (width < 1 || height < 1) {
        throw IoError(origin + ": malformed PPM header (non-positive extents)");
    }
    if (maxval != 255) {
        throw IoError(origin + ": unsupported bit depth (maxval " + std::to_string(maxval) +
                      ", only 255 supported)");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw IoError(origin + ": malformed PPM header (missing separator)");
    }
    ++pos;  // single whitespace byte before the payload
    std::size_t need = static_cast<std::size_t>(width) * height * channels;
    if (bytes.size() - pos < need) {
        throw IoError(origin + ": truncated PPM payload (" +
                      std::to_string(bytes.size() - pos) + " of " + std::to_string(need) +
                      " bytes)");
    }
    LdrImage img = LdrImage::create(width, height, channels);
    std::memcpy(img.samples.data(), bytes.data() + pos, need);
    return img;
}

std::vector<std::uint8_t> encode_ppm(const LdrImage& image) {
    std::string header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" +
                         std::to_string(image.width) + " " + std::to_string(image.height) +
                         "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.samples.begin(), image.samples.end());
    return out;
}

}  // namespace fcit
