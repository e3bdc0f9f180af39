#include <doctest.h>

#include <fstream>

#include "fcit/errors.hpp"
#include "fcit/weights.hpp"
#include "support/fixtures.hpp"

using namespace fcit;

namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("weight archive round-trips bitwise") {
    auto dir = testing::scratch_dir("weights");
    WeightArchive archive = testing::tiny_lossnet_archive(3);
    auto first = dir / "a.net";
    write_weight_archive(archive, first);

    WeightArchive loaded = read_weight_archive(first);
    CHECK(loaded.arch == archive.arch);
    CHECK(loaded.means == archive.means);
    REQUIRE(loaded.tensors.size() == archive.tensors.size());
    for (std::size_t i = 0; i < archive.tensors.size(); ++i) {
        CHECK(loaded.tensors[i].name == archive.tensors[i].name);
        CHECK(loaded.tensors[i].dims == archive.tensors[i].dims);
        CHECK(loaded.tensors[i].data == archive.tensors[i].data);  // bitwise for floats
    }

    auto second = dir / "b.net";
    write_weight_archive(loaded, second);
    CHECK(slurp(first) == slurp(second));
}

TEST_CASE("layer descriptors survive the header") {
    WeightArchive archive;
    archive.arch = "transform";
    archive.task = "tonemap";
    LayerDesc conv;
    conv.kind = LayerDesc::Kind::Conv;
    conv.name = "conv1";
    conv.kh = conv.kw = 3;
    conv.conv = Conv2dSpec{1, 1, PadKind::Replicate, 1};
    archive.layers.push_back(conv);
    LayerDesc tanh;
    tanh.kind = LayerDesc::Kind::ScaledTanh;
    tanh.lo = 0.0f;
    tanh.hi = 255.0f;
    archive.layers.push_back(tanh);
    ArchiveTensor w;
    w.name = "conv1.weight";
    w.dims = {3, 3, 3, 3};
    w.data.assign(81, 0.25f);
    archive.tensors.push_back(w);
    ArchiveTensor b;
    b.name = "conv1.bias";
    b.dims = {3};
    b.data.assign(3, 0.0f);
    archive.tensors.push_back(b);

    auto path = testing::scratch_dir("weights") / "t.net";
    write_weight_archive(archive, path);
    WeightArchive loaded = read_weight_archive(path);
    REQUIRE(loaded.layers.size() == 2);
    CHECK(loaded.layers[0].kind == LayerDesc::Kind::Conv);
    CHECK(loaded.layers[0].conv.pad_kind == PadKind::Replicate);
    CHECK(loaded.layers[1].kind == LayerDesc::Kind::ScaledTanh);
    CHECK(loaded.layers[1].hi == 255.0f);
    CHECK(loaded.task == "tonemap");
}

TEST_CASE("truncated payloads are reported with the tensor name") {
    auto dir = testing::scratch_dir("weights");
    auto path = dir / "trunc.net";
    write_weight_archive(testing::tiny_lossnet_archive(4), path);
    auto bytes = slurp(path);
    bytes.resize(bytes.size() - 64);
    auto cut = dir / "cut.net";
    std::ofstream(cut, std::ios::binary).write(bytes.data(),
                                               static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_WITH_AS(read_weight_archive(cut), doctest::Contains("truncated"), IoError);
    CHECK_THROWS_WITH_AS(read_weight_archive(cut), doctest::Contains("conv2_1"), IoError);
}

TEST_CASE("non-archives are rejected") {
    auto dir = testing::scratch_dir("weights");
    auto path = dir / "junk.net";
    std::ofstream(path) << "this is not an archive, definitely not one of ours";
    CHECK_THROWS_AS(read_weight_archive(path), IoError);
    CHECK_THROWS_AS(read_weight_archive(dir / "missing.net"), IoError);
}
