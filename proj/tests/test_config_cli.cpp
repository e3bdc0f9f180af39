#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fcit/cli.hpp"
#include "fcit/config.hpp"
#include "fcit/errors.hpp"
#include "support/fixtures.hpp"

using namespace fcit;

namespace {

int run(std::vector<std::string> args) {
    std::vector<const char*> argv{"fcit"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("an empty config file keeps every documented default") {
    auto dir = testing::scratch_dir("config");
    std::ofstream(dir / "empty.cfg") << "# nothing here\n\n";
    TaskConfig cfg = TaskConfig::defaults(Task::Downscale);
    load_config_file(cfg, dir / "empty.cfg");
    CHECK(cfg.learning_rate == 2e-4f);
    CHECK(cfg.batch == 16);
    CHECK(cfg.epochs == 10);
    CHECK(cfg.train_size == 256);
}

TEST_CASE("out-of-range gamma cites the admissible interval") {
    TaskConfig cfg = TaskConfig::defaults(Task::Tonemap);
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "gamma", "1.5"),
                         doctest::Contains("(0.2, 1]"), UsageError);
}

TEST_CASE("unknown keys are rejected, not ignored") {
    TaskConfig cfg = TaskConfig::defaults(Task::Downscale);
    CHECK_THROWS_WITH_AS(apply_config_entry(cfg, "momentum", "0.9"),
                         doctest::Contains("unknown config key"), UsageError);
    auto dir = testing::scratch_dir("config");
    std::ofstream(dir / "bad.cfg") << "momentum = 0.9\n";
    CHECK_THROWS_AS(load_config_file(cfg, dir / "bad.cfg"), UsageError);
}

TEST_CASE("config entries parse and validate") {
    TaskConfig cfg = TaskConfig::defaults(Task::Downscale);
    apply_config_entry(cfg, "taps", "conv2_1, conv1_1");
    CHECK(cfg.taps == std::set<std::string>{"conv1_1", "conv2_1"});
    apply_config_entry(cfg, "epochs", "3");
    CHECK(cfg.epochs == 3);
    CHECK_THROWS_AS(apply_config_entry(cfg, "epochs", "three"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "batch", "0"), UsageError);
}

TEST_CASE("cli: usage and I/O failures map to exit codes 1 and 2") {
    CHECK(run({"no-such-verb"}) == 1);
    CHECK(run({"eval", "--a", "/nonexistent/a.png", "--b", "/nonexistent/b.png"}) == 2);
    CHECK(run({"baseline", "--method", "warp", "--in", "x.png", "--out", "y.png"}) == 1);
    CHECK(run({"tonemap", "--in", "x.hdr", "--out", "y.png", "--gamma", "1.7"}) == 1);
}

TEST_CASE("cli: eval prints an SSIM of 1 for identical images") {
    auto dir = testing::scratch_dir("cli-eval");
    LdrImage img = testing::synthetic_image(24, 24, 60);
    save_image(img, dir / "x.png");
    CHECK(run({"eval", "--a", (dir / "x.png").string(), "--b", (dir / "x.png").string(),
               "--metric", "ssim"}) == 0);
}

TEST_CASE("cli: baseline and apply round out the flow") {
    auto dir = testing::scratch_dir("cli-flow");
    save_image(testing::synthetic_image(32, 32, 61), dir / "in.png");
    CHECK(run({"baseline", "--method", "bicubic", "--factor", "4",
               "--in", (dir / "in.png").string(), "--out", (dir / "small.png").string()}) == 0);
    LdrImage small = load_image(dir / "small.png");
    CHECK(small.width == 8);

    TransformNet net = TransformNet::build(Task::Decolorize, 62, {8, 2});
    net.save(dir / "decol.net");
    CHECK(run({"apply", "--net", (dir / "decol.net").string(),
               "--in", (dir / "in.png").string(),
               "--out", (dir / "gray.png").string()}) == 0);
    CHECK(load_image(dir / "gray.png").channels == 1);

    TransformNet tone = TransformNet::build(Task::Tonemap, 63, {8, 2});
    tone.save(dir / "tone.net");
    CHECK(run({"apply", "--net", (dir / "tone.net").string(),
               "--in", (dir / "in.png").string(),
               "--out", (dir / "boom.png").string()}) == 1);
}

TEST_CASE("cli: flags override config files and reports reproduce the trace") {
    auto dir = testing::scratch_dir("cli-train");
    auto corpus_dir = dir / "corpus";
    std::filesystem::create_directories(corpus_dir);
    for (int i = 0; i < 3; ++i) {
        save_image(testing::synthetic_image(16, 16, 70 + i),
                   corpus_dir / ("img" + std::to_string(i) + ".png"));
    }
    write_weight_archive(testing::tiny_lossnet_archive(), dir / "loss.net");
    std::ofstream(dir / "train.cfg") << "epochs = 10\nbatch = 2\nsize = 16\n"
                                     << "taps = conv1_1\nhidden = 4\nthreads = 1\n";

    auto train = [&](const std::filesystem::path& out) {
        return run({"train-decolorize", "--config", (dir / "train.cfg").string(),
                    "--epochs", "1", "--seed", "3",
                    "--corpus", corpus_dir.string(),
                    "--lossnet", (dir / "loss.net").string(),
                    "--out", out.string()});
    };
    CHECK(train(dir / "a.net") == 0);
    CHECK(train(dir / "b.net") == 0);

    std::string report_a = slurp(dir / "a.net.report");
    CHECK(report_a.find("epochs = 1") != std::string::npos);  // flag beat the file
    CHECK(report_a.find("trace =") != std::string::npos);

    // Same seed, serial mode: the whole trace line repeats verbatim.
    std::string report_b = slurp(dir / "b.net.report");
    auto trace_of = [](const std::string& text) {
        auto pos = text.find("trace =");
        return text.substr(pos);
    };
    CHECK(trace_of(report_a) == trace_of(report_b));

    TransformNet net = TransformNet::load(dir / "a.net");
    CHECK(net.task() == Task::Decolorize);
}

TEST_CASE("cli: export-weights-template emits the header skeleton") {
    auto dir = testing::scratch_dir("cli-template");
    auto path = dir / "template.txt";
    CHECK(run({"export-weights-template", "--out", path.string()}) == 0);
    std::string text = slurp(path);
    CHECK(text.find("arch = vgg19-conv5_1") != std::string::npos);
    CHECK(text.find("conv5_1.weight") != std::string::npos);
    CHECK(text.find("mean =") != std::string::npos);
}
