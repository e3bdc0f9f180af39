#include <cmath>
#include <cstdio>
#include <string>

#include "fcit/errors.hpp"
#include "fcit/image.hpp"

namespace fcit {

namespace {

struct Cursor {
    const std::vector<std::uint8_t>* bytes;
    std::size_t pos = 0;
    const std::string* origin;

    std::uint8_t next() {
        if (pos >= bytes->size()) {
            throw IoError(*origin + ": truncated RGBE data");
        }
        return (*bytes)[pos++];
    }

    std::string line() {
        std::string out;
        while (true) {
            if (pos >= bytes->size()) {
                throw IoError(*origin + ": truncated RGBE header");
            }
            char ch = static_cast<char>((*bytes)[pos++]);
            if (ch == '\n') return out;
            out.push_back(ch);
        }
    }
};

void decode_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b, std::uint8_t e, float* out) {
    if (e == 0) {
        out[0] = out[1] = out[2] = 0.0f;
        return;
    }
    // component = (mantissa + 0.5)/256 * 2^(e-128)
    float scale = std::ldexp(1.0f, static_cast<int>(e) - 136);  // 2^(e-128)/256
    out[0] = (static_cast<float>(r) + 0.5f) * scale;
    out[1] = (static_cast<float>(g) + 0.5f) * scale;
    out[2] = (static_cast<float>(b) + 0.5f) * scale;
}

}  // namespace

HdrImage decode_hdr(const std::vector<std::uint8_t>& bytes, const std::string& origin) {
    Cursor cur{&bytes, 0, &origin};

    std::string signature = cur.line();
    if (signature.rfind("#?RADIANCE", 0) != 0 && signature.rfind("#?RGBE", 0) != 0) {
        throw IoError(origin + ": bad signature (not a Radiance RGBE file)");
    }
    bool format_seen = false;
    while (true) {
        std::string line = cur.line();
        if (line.empty()) break;  // header ends at the blank line
        if (line[0] == '#') continue;
        if (line.rfind("FORMAT=", 0) == 0) {
            std::string fmt = line.substr(7);
            if (fmt == "32-bit_rle_xyze") {
                throw IoError(origin + ": XYZE variant unsupported (RGBE only)");
            }
            if (fmt != "32-bit_rle_rgbe") {
                throw IoError(origin + ": unsupported FORMAT '" + fmt + "'");
            }
            format_seen = true;
        }
        // EXPOSURE/GAMMA and other variables do not affect decoding here.
    }
    if (!format_seen) {
        throw IoError(origin + ": header missing FORMAT=32-bit_rle_rgbe");
    }

    std::string resolution = cur.line();
    int height = 0, width = 0;
    if (std::sscanf(resolution.c_str(), "-Y %d +X %d", &height, &width) != 2 || height < 1 ||
        width < 1) {
        throw IoError(origin + ": unsupported orientation '" + resolution +
                      "' (only -Y <h> +X <w>)");
    }

    HdrImage img = HdrImage::create(width, height);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 4);
    for (int y = 0; y < height; ++y) {
        std::uint8_t b0 = cur.next(), b1 = cur.next(), b2 = cur.next(), b3 = cur.next();
        bool rle = width >= 8 && width <= 0x7fff && b0 == 2 && b1 == 2 && (b2 & 0x80) == 0;
        if (rle) {
            int scan_width = (static_cast<int>(b2) << 8) | b3;
            if (scan_width != width) {
                throw IoError(origin + ": RLE desync (scanline width " +
                              std::to_string(scan_width) + " vs " + std::to_string(width) + ")");
            }
            // Four component streams of runs and literal spans.
            for (int c = 0; c < 4; ++c) {
                int x = 0;
                while (x < width) {
                    int code = cur.next();
                    if (code > 128) {
                        int run = code - 128;
                        if (x + run > width) {
                            throw IoError(origin + ": RLE desync (run past scanline end)");
                        }
                        std::uint8_t v = cur.next();
                        for (int i = 0; i < run; ++i, ++x) {
                            row[static_cast<std::size_t>(x) * 4 + c] = v;
                        }
                    } else {
                        if (code == 0 || x + code > width) {
                            throw IoError(origin + ": RLE desync (bad literal count)");
                        }
                        for (int i = 0; i < code; ++i, ++x) {
                            row[static_cast<std::size_t>(x) * 4 + c] = cur.next();
                        }
                    }
                }
            }
        } else {
            row[0] = b0;
            row[1] = b1;
            row[2] = b2;
            row[3] = b3;
            for (std::size_t i = 4; i < row.size(); ++i) {
                row[i] = cur.next();
            }
        }
        for (int x = 0; x < width; ++x) {
            decode_pixel(row[x * 4 + 0], row[x * 4 + 1], row[x * 4 + 2], row[x * 4 + 3],
                         &img.at(y, x, 0));
        }
    }
    return img;
}

}  // namespace fcit
