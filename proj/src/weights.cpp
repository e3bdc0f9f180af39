#include "fcit/weights.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fcit/errors.hpp"

namespace fcit {

namespace {

constexpr const char* kFormatTag = "fcit-weights-v1";

std::string format_float(float v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

float parse_float(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        float v = std::stof(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("weight archive: bad number '" + tok + "' in " + where);
    }
}

std::int64_t parse_int(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw IoError("weight archive: bad integer '" + tok + "' in " + where);
    }
}

// "k=3x3" -> (3,3); "stride=2x2" -> (2,2)
std::pair<int, int> parse_pair_attr(const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) {
        throw IoError("weight archive: expected '" + key + "=' attribute, got '" + tok + "'");
    }
    std::string v = tok.substr(key.size() + 1);
    std::size_t x = v.find('x');
    if (x == std::string::npos) {
        throw IoError("weight archive: bad '" + key + "' attribute '" + tok + "'");
    }
    return {static_cast<int>(parse_int(v.substr(0, x), tok)),
            static_cast<int>(parse_int(v.substr(x + 1), tok))};
}

LayerDesc parse_layer(const std::string& value) {
    auto toks = split_ws(value);
    if (toks.empty()) throw IoError("weight archive: empty layer line");
    LayerDesc layer;
    if (toks[0] == "relu") {
        layer.kind = LayerDesc::Kind::Relu;
    } else if (toks[0] == "maxpool") {
        layer.kind = LayerDesc::Kind::MaxPool;
    } else if (toks[0] == "scaled_tanh") {
        layer.kind = LayerDesc::Kind::ScaledTanh;
        if (toks.size() != 3 || toks[1].rfind("lo=", 0) != 0 || toks[2].rfind("hi=", 0) != 0) {
            throw IoError("weight archive: bad scaled_tanh layer '" + value + "'");
        }
        layer.lo = parse_float(toks[1].substr(3), value);
        layer.hi = parse_float(toks[2].substr(3), value);
    } else if (toks[0] == "conv") {
        layer.kind = LayerDesc::Kind::Conv;
        if (toks.size() != 5) {
            throw IoError("weight archive: bad conv layer '" + value + "'");
        }
        layer.name = toks[1];
        std::tie(layer.kh, layer.kw) = parse_pair_attr(toks[2], "k");
        std::tie(layer.conv.stride_h, layer.conv.stride_w) = parse_pair_attr(toks[3], "stride");
        const std::string& pad = toks[4];
        if (pad.rfind("pad=zero:", 0) == 0) {
            layer.conv.pad_kind = PadKind::Zero;
            layer.conv.pad = static_cast<int>(parse_int(pad.substr(9), value));
        } else if (pad.rfind("pad=replicate:", 0) == 0) {
            layer.conv.pad_kind = PadKind::Replicate;
            layer.conv.pad = static_cast<int>(parse_int(pad.substr(14), value));
        } else {
            throw IoError("weight archive: bad pad attribute in '" + value + "'");
        }
    } else {
        throw IoError("weight archive: unknown layer kind '" + toks[0] + "'");
    }
    return layer;
}

std::string layer_line(const LayerDesc& layer) {
    switch (layer.kind) {
        case LayerDesc::Kind::Relu:
            return "relu";
        case LayerDesc::Kind::MaxPool:
            return "maxpool";
        case LayerDesc::Kind::ScaledTanh:
            return "scaled_tanh lo=" + format_float(layer.lo) + " hi=" + format_float(layer.hi);
        case LayerDesc::Kind::Conv: {
            std::string pad = layer.conv.pad_kind == PadKind::Zero ? "zero" : "replicate";
            return "conv " + layer.name + " k=" + std::to_string(layer.kh) + "x" +
                   std::to_string(layer.kw) + " stride=" + std::to_string(layer.conv.stride_h) +
                   "x" + std::to_string(layer.conv.stride_w) + " pad=" + pad + ":" +
                   std::to_string(layer.conv.pad);
        }
    }
    return "";
}

// "name (d0,d1,...) @ offset"
void parse_tensor_line(const std::string& value, std::string& name, std::vector<int>& dims,
                       std::uint64_t& offset) {
    auto toks = split_ws(value);
    if (toks.size() != 4 || toks[2] != "@") {
        throw IoError("weight archive: bad tensor line '" + value + "'");
    }
    name = toks[0];
    const std::string& shape = toks[1];
    if (shape.size() < 3 || shape.front() != '(' || shape.back() != ')') {
        throw IoError("weight archive: bad tensor shape in '" + value + "'");
    }
    dims.clear();
    std::string body = shape.substr(1, shape.size() - 2);
    std::size_t start = 0;
    while (start <= body.size()) {
        std::size_t comma = body.find(',', start);
        std::string piece = comma == std::string::npos ? body.substr(start)
                                                       : body.substr(start, comma - start);
        std::int64_t d = parse_int(piece, value);
        if (d < 1) throw IoError("weight archive: non-positive extent in '" + value + "'");
        dims.push_back(static_cast<int>(d));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (dims.empty() || dims.size() > 4) {
        throw IoError("weight archive: tensor rank must be 1..4 in '" + value + "'");
    }
    offset = static_cast<std::uint64_t>(parse_int(toks[3], value));
}

}  // namespace

std::int64_t ArchiveTensor::count() const {
    std::int64_t n = 1;
    for (int d : dims) n *= d;
    return n;
}

const ArchiveTensor* WeightArchive::find(const std::string& name) const {
    for (const ArchiveTensor& t : tensors) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::string archive_header_text(const WeightArchive& archive) {
    std::ostringstream out;
    out << kFormatTag << "\n";
    out << "arch = " << archive.arch << "\n";
    if (!archive.task.empty()) {
        out << "task = " << archive.task << "\n";
    }
    if (!archive.means.empty()) {
        out << "mean =";
        for (float m : archive.means) out << " " << format_float(m);
        out << "\n";
    }
    for (const LayerDesc& layer : archive.layers) {
        out << "layer = " << layer_line(layer) << "\n";
    }
    std::uint64_t offset = 0;
    for (const ArchiveTensor& t : archive.tensors) {
        out << "tensor = " << t.name << " (";
        for (std::size_t i = 0; i < t.dims.size(); ++i) {
            if (i) out << ",";
            out << t.dims[i];
        }
        out << ") @ " << offset << "\n";
        offset += static_cast<std::uint64_t>(t.count()) * sizeof(float);
    }
    return out.str();
}

void write_weight_archive(const WeightArchive& archive, const std::filesystem::path& path) {
    for (const ArchiveTensor& t : archive.tensors) {
        if (static_cast<std::int64_t>(t.data.size()) != t.count()) {
            throw std::invalid_argument("weight archive: tensor " + t.name + " holds " +
                                        std::to_string(t.data.size()) + " values for " +
                                        std::to_string(t.count()) + " extents");
        }
    }
    std::string header = archive_header_text(archive);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    std::uint64_t len = header.size();
    unsigned char prefix[8];
    for (int i = 0; i < 8; ++i) prefix[i] = static_cast<unsigned char>((len >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(prefix), 8);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    for (const ArchiveTensor& t : archive.tensors) {
        out.write(reinterpret_cast<const char*>(t.data.data()),
                  static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    }
    if (!out) throw IoError("short write to " + path.string());
}

WeightArchive read_weight_archive(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    unsigned char prefix[8];
    if (!in.read(reinterpret_cast<char*>(prefix), 8)) {
        throw IoError(path.string() + ": not a weight archive (missing header length)");
    }
    std::uint64_t len = 0;
    for (int i = 7; i >= 0; --i) len = (len << 8) | prefix[i];
    if (len == 0 || len > (16u << 20)) {
        throw IoError(path.string() + ": not a weight archive (implausible header length)");
    }
    std::string header(len, '\0');
    if (!in.read(header.data(), static_cast<std::streamsize>(len))) {
        throw IoError(path.string() + ": truncated header");
    }
    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    WeightArchive archive;
    struct PendingTensor {
        std::string name;
        std::vector<int> dims;
        std::uint64_t offset;
    };
    std::vector<PendingTensor> pending;

    std::istringstream lines(header);
    std::string line;
    bool saw_tag = false;
    while (std::getline(lines, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (!saw_tag) {
            if (line != kFormatTag) {
                throw IoError(path.string() + ": not a weight archive (bad format tag '" +
                              line + "')");
            }
            saw_tag = true;
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError(path.string() + ": bad header line '" + line + "'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "arch") {
            archive.arch = value;
        } else if (key == "task") {
            archive.task = value;
        } else if (key == "mean") {
            for (const std::string& tok : split_ws(value)) {
                archive.means.push_back(parse_float(tok, "mean"));
            }
        } else if (key == "layer") {
            archive.layers.push_back(parse_layer(value));
        } else if (key == "tensor") {
            PendingTensor t;
            parse_tensor_line(value, t.name, t.dims, t.offset);
            pending.push_back(std::move(t));
        } else {
            throw IoError(path.string() + ": unknown header key '" + key + "'");
        }
    }
    if (!saw_tag) throw IoError(path.string() + ": not a weight archive (empty header)");
    if (archive.arch.empty()) throw IoError(path.string() + ": header missing arch");

    for (PendingTensor& p : pending) {
        if (archive.find(p.name) != nullptr) {
            throw IoError(path.string() + ": duplicate tensor " + p.name);
        }
        ArchiveTensor t;
        t.name = std::move(p.name);
        t.dims = std::move(p.dims);
        std::uint64_t bytes = static_cast<std::uint64_t>(t.count()) * sizeof(float);
        if (p.offset + bytes > payload.size()) {
            throw IoError(path.string() + ": truncated payload for tensor " + t.name);
        }
        t.data.resize(static_cast<std::size_t>(t.count()));
        std::memcpy(t.data.data(), payload.data() + p.offset, bytes);
        archive.tensors.push_back(std::move(t));
    }
    return archive;
}

std::string to_string(LayerDesc::Kind kind) {
    switch (kind) {
        case LayerDesc::Kind::Conv: return "conv";
        case LayerDesc::Kind::Relu: return "relu";
        case LayerDesc::Kind::MaxPool: return "maxpool";
        case LayerDesc::Kind::ScaledTanh: return "scaled_tanh";
    }
    return "?";
}

}  // namespace fcit
