#include "support/fixtures.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "fcit/rng.hpp"

namespace fcit::testing {

Tensor random_tensor(Shape shape, std::uint64_t seed, float lo, float hi) {
    Rng rng(seed);
    Tensor t(shape);
    for (float& v : t.values()) {
        v = lo + (hi - lo) * static_cast<float>(rng.uniform());
    }
    return t;
}

WeightArchive fixture_lossnet_archive(int blocks, int width, std::uint64_t seed) {
    Rng rng(seed);
    WeightArchive archive;
    archive.arch = "fixture-" + std::to_string(blocks) + "x" + std::to_string(width);
    archive.means = {120.0f, 114.0f, 104.0f};
    int in_channels = 3;
    for (int b = 1; b <= blocks; ++b) {
        std::string name = "conv" + std::to_string(b) + "_1";
        LayerDesc conv;
        conv.kind = LayerDesc::Kind::Conv;
        conv.name = name;
        conv.kh = conv.kw = 3;
        conv.conv = Conv2dSpec{1, 1, PadKind::Zero, 1};
        archive.layers.push_back(conv);
        archive.layers.push_back(LayerDesc{LayerDesc::Kind::Relu});
        if (b != blocks) archive.layers.push_back(LayerDesc{LayerDesc::Kind::MaxPool});

        ArchiveTensor w;
        w.name = name + ".weight";
        w.dims = {width, in_channels, 3, 3};
        float stddev = std::sqrt(2.0f / (static_cast<float>(in_channels) * 9.0f));
        w.data.resize(static_cast<std::size_t>(w.count()));
        for (float& v : w.data) v = rng.normal(0.0f, stddev);
        archive.tensors.push_back(std::move(w));

        ArchiveTensor bias;
        bias.name = name + ".bias";
        bias.dims = {width};
        bias.data.assign(static_cast<std::size_t>(width), 0.0f);
        archive.tensors.push_back(std::move(bias));
        in_channels = width;
    }
    return archive;
}

WeightArchive tiny_lossnet_archive(std::uint64_t seed) {
    return fixture_lossnet_archive(2, 4, seed);
}

namespace {

void fill_gradient(Tensor& t, Rng& rng) {
    float c0[3], c1[3];
    for (int c = 0; c < 3; ++c) {
        c0[c] = 255.0f * static_cast<float>(rng.uniform());
        c1[c] = 255.0f * static_cast<float>(rng.uniform());
    }
    double angle = 2.0 * std::numbers::pi * rng.uniform();
    double dx = std::cos(angle), dy = std::sin(angle);
    for (int y = 0; y < t.h(); ++y) {
        for (int x = 0; x < t.w(); ++x) {
            double u = (dx * x / t.w() + dy * y / t.h() + 1.0) / 2.0;
            u = std::clamp(u, 0.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                t.at(0, c, y, x) = static_cast<float>((1.0 - u) * c0[c] + u * c1[c]);
            }
        }
    }
}

}  // namespace

std::vector<Tensor> synthetic_corpus(int count, int size, std::uint64_t seed) {
    std::vector<Tensor> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        Tensor img({1, 3, size, size});
        fill_gradient(img, rng);
        int rects = 3 + static_cast<int>(rng.uniform_int(0, 3));
        for (int r = 0; r < rects; ++r) {
            int x0 = static_cast<int>(rng.uniform_int(0, size - 2));
            int y0 = static_cast<int>(rng.uniform_int(0, size - 2));
            int x1 = static_cast<int>(rng.uniform_int(x0 + 1, size - 1));
            int y1 = static_cast<int>(rng.uniform_int(y0 + 1, size - 1));
            float color[3];
            for (float& c : color) c = 255.0f * static_cast<float>(rng.uniform());
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    for (int c = 0; c < 3; ++c) {
                        img.at(0, c, y, x) = 0.3f * img.at(0, c, y, x) + 0.7f * color[c];
                    }
                }
            }
        }
        for (float& v : img.values()) {
            v = std::clamp(v + 8.0f * (static_cast<float>(rng.uniform()) - 0.5f), 0.0f, 255.0f);
        }
        corpus.push_back(std::move(img));
    }
    return corpus;
}

LdrImage synthetic_image(int width, int height, std::uint64_t seed) {
    int size = std::max(width, height);
    Tensor t = synthetic_corpus(1, size, seed)[0];
    LdrImage full = from_tensor(t);
    if (width == height) return full;
    LdrImage out = LdrImage::create(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = full.at(y, x, c);
    return out;
}

// 299*100 + 587*160 + 114*40 == 299*157 + 587*103 + 114*184 == 128380
const std::uint8_t kProbeLeft[3] = {100, 160, 40};
const std::uint8_t kProbeRight[3] = {157, 103, 184};

LdrImage iso_luminant_probe(int size) {
    LdrImage img = LdrImage::create(size, size, 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const std::uint8_t* color = x < size / 2 ? kProbeLeft : kProbeRight;
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = color[c];
        }
    }
    return img;
}

HdrImage synthetic_hdr(int size, double range, std::uint64_t seed) {
    Rng rng(seed);
    HdrImage img = HdrImage::create(size, size);
    double base = 0.01;
    int gray_rows = size / 4;
    for (int y = 0; y < size; ++y) {
        // Per-row hue weights normalized to unit luminance.
        double wr = 1.0, wg = 1.0, wb = 1.0;
        if (y >= gray_rows) {
            wr = 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * y / size);
            wb = 0.55 + 0.45 * std::cos(2.0 * std::numbers::pi * y / size);
        }
        double luma = 0.299 * wr + 0.587 * wg + 0.114 * wb;
        wr /= luma;
        wg /= luma;
        wb /= luma;
        for (int x = 0; x < size; ++x) {
            double level = base * std::pow(range, static_cast<double>(x) / (size - 1));
            double texture = 1.0 + 0.35 * std::sin(8.0 * std::numbers::pi * x / size) *
                                       std::sin(6.0 * std::numbers::pi * y / size) +
                             0.02 * rng.uniform();
            double l = level * texture;
            if (y < gray_rows) {
                // Achromatic band: identical channels by construction.
                float v = static_cast<float>(l);
                img.at(y, x, 0) = v;
                img.at(y, x, 1) = v;
                img.at(y, x, 2) = v;
            } else {
                img.at(y, x, 0) = static_cast<float>(l * wr);
                img.at(y, x, 1) = static_cast<float>(l * wg);
                img.at(y, x, 2) = static_cast<float>(l * wb);
            }
        }
    }
    return img;
}

namespace {

void float_to_rgbe(float r, float g, float b, std::uint8_t* out) {
    float v = std::max({r, g, b});
    if (v < 1e-32f) {
        out[0] = out[1] = out[2] = out[3] = 0;
        return;
    }
    int e = 0;
    float m = std::frexp(v, &e);        // v = m * 2^e, m in [0.5, 1)
    float scale = m * 256.0f / v;       // 256 / 2^e
    out[0] = static_cast<std::uint8_t>(std::min(255.0f, r * scale));
    out[1] = static_cast<std::uint8_t>(std::min(255.0f, g * scale));
    out[2] = static_cast<std::uint8_t>(std::min(255.0f, b * scale));
    out[3] = static_cast<std::uint8_t>(e + 128);
}

std::vector<std::uint8_t> rgbe_header(const HdrImage& img) {
    std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                         std::to_string(img.height) + " +X " + std::to_string(img.width) + "\n";
    return {header.begin(), header.end()};
}

std::vector<std::uint8_t> row_rgbe(const HdrImage& img, int y) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 4);
    for (int x = 0; x < img.width; ++x) {
        float_to_rgbe(img.at(y, x, 0), img.at(y, x, 1), img.at(y, x, 2), &row[4 * x]);
    }
    return row;
}

}  // namespace

std::vector<std::uint8_t> rgbe_encode_flat(const HdrImage& img) {
    std::vector<std::uint8_t> out = rgbe_header(img);
    for (int y = 0; y < img.height; ++y) {
        std::vector<std::uint8_t> row = row_rgbe(img, y);
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::vector<std::uint8_t> rgbe_encode_rle(const HdrImage& img) {
    std::vector<std::uint8_t> out = rgbe_header(img);
    for (int y = 0; y < img.height; ++y) {
        std::vector<std::uint8_t> row = row_rgbe(img, y);
        out.push_back(2);
        out.push_back(2);
        out.push_back(static_cast<std::uint8_t>(img.width >> 8));
        out.push_back(static_cast<std::uint8_t>(img.width & 0xff));
        for (int c = 0; c < 4; ++c) {
            int x = 0;
            while (x < img.width) {
                // Measure the run of identical bytes at x.
                int run = 1;
                while (x + run < img.width && run < 127 &&
                       row[4 * (x + run) + c] == row[4 * x + c]) {
                    ++run;
                }
                if (run >= 3) {
                    out.push_back(static_cast<std::uint8_t>(128 + run));
                    out.push_back(row[4 * x + c]);
                    x += run;
                } else {
                    // Literal span up to the next run of >= 3 (cap 128).
                    int start = x;
                    int count = 0;
                    while (x < img.width && count < 128) {
                        int ahead = 1;
                        while (x + ahead < img.width && ahead < 3 &&
                               row[4 * (x + ahead) + c] == row[4 * x + c]) {
                            ++ahead;
                        }
                        if (ahead >= 3) break;
                        ++x;
                        ++count;
                    }
                    out.push_back(static_cast<std::uint8_t>(count));
                    for (int i = 0; i < count; ++i) {
                        out.push_back(row[4 * (start + i) + c]);
                    }
                }
            }
        }
    }
    return out;
}

std::filesystem::path scratch_dir(const std::string& label) {
    static std::atomic<int> counter{0};
    std::filesystem::path dir = std::filesystem::temp_directory_path() / "fcit-tests" /
                                (label + "-" + std::to_string(counter++));
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fcit::testing
