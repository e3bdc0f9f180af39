#include "fcit/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "fcit/baselines.hpp"
#include "fcit/config.hpp"
#include "fcit/errors.hpp"
#include "fcit/parallel.hpp"
#include "fcit/pipelines.hpp"

namespace fcit {

namespace {

constexpr const char* kLossnetEnv = "DFC_DIT_LOSSNET";

struct Flags {
    std::string config_path;
    std::string corpus, out, lossnet, taps, input, net_path, save_net;
    float learning_rate = 0, alpha = 0, gamma = 0, eps_log = 0;
    int batch = 0, epochs = 0, size = 0, hidden = 0, depth = 0, threads = 0;
    std::uint64_t seed = 0;
};

void add_common_training_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config_path, "key = value config file");
    cmd->add_option("--taps", flags.taps, "comma-separated loss-network taps");
    cmd->add_option("--lr,--learning-rate", flags.learning_rate, "Adam learning rate");
    cmd->add_option("--batch", flags.batch, "batch size");
    cmd->add_option("--epochs", flags.epochs, "training epochs");
    cmd->add_option("--seed", flags.seed, "RNG seed");
    cmd->add_option("--hidden", flags.hidden, "hidden channel width");
    cmd->add_option("--depth", flags.depth, "conv layer count");
    cmd->add_option("--threads", flags.threads, "worker threads (0 auto, 1 serial)");
    cmd->add_option("--lossnet", flags.lossnet,
                    std::string("loss-network weight archive (default $") + kLossnetEnv + ")");
}

// Flags override config-file values, which override the task defaults.
TaskConfig resolve_config(Task task, const CLI::App* cmd, const Flags& flags) {
    TaskConfig cfg = TaskConfig::defaults(task);
    if (cmd->count("--config")) {
        load_config_file(cfg, flags.config_path);
    }
    if (cmd->count("--taps")) cfg.taps = parse_taps(flags.taps);
    if (cmd->count("--lr")) {
        apply_config_entry(cfg, "learning_rate", std::to_string(flags.learning_rate));
    }
    if (cmd->count("--batch")) apply_config_entry(cfg, "batch", std::to_string(flags.batch));
    if (cmd->count("--epochs")) apply_config_entry(cfg, "epochs", std::to_string(flags.epochs));
    if (cmd->count("--size")) apply_config_entry(cfg, "size", std::to_string(flags.size));
    if (cmd->count("--alpha")) apply_config_entry(cfg, "alpha", std::to_string(flags.alpha));
    if (cmd->count("--gamma")) apply_config_entry(cfg, "gamma", std::to_string(flags.gamma));
    if (cmd->count("--eps-log")) {
        apply_config_entry(cfg, "eps_log", std::to_string(flags.eps_log));
    }
    if (cmd->count("--seed")) cfg.seed = flags.seed;
    if (cmd->count("--hidden")) apply_config_entry(cfg, "hidden", std::to_string(flags.hidden));
    if (cmd->count("--depth")) apply_config_entry(cfg, "depth", std::to_string(flags.depth));
    if (cmd->count("--threads")) {
        apply_config_entry(cfg, "threads", std::to_string(flags.threads));
    }
    if (cmd->count("--corpus")) cfg.corpus_dir = flags.corpus;
    if (cmd->count("--out")) cfg.out_path = flags.out;
    if (cmd->count("--lossnet")) {
        cfg.lossnet_path = flags.lossnet;
    } else if (cfg.lossnet_path.empty()) {
        if (const char* env = std::getenv(kLossnetEnv)) cfg.lossnet_path = env;
    }
    cfg.validate();
    return cfg;
}

std::string format_float(float v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
    return buf;
}

void write_report(const std::filesystem::path& out_path, const std::string& verb,
                  const TaskConfig& cfg, const TrainReport* report, double wall_seconds) {
    std::filesystem::path path = out_path;
    path += ".report";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report " + path.string());
    out << "verb = " << verb << "\n";
    out << "task = " << to_string(cfg.task) << "\n";
    out << "seed = " << cfg.seed << "\n";
    std::string taps;
    for (const std::string& tap : cfg.taps) {
        if (!taps.empty()) taps += ",";
        taps += tap;
    }
    out << "taps = " << taps << "\n";
    out << "learning_rate = " << format_float(cfg.learning_rate) << "\n";
    out << "batch = " << cfg.batch << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "size = " << cfg.train_size << "\n";
    out << "alpha = " << format_float(cfg.alpha) << "\n";
    out << "gamma = " << format_float(cfg.gamma) << "\n";
    out << "eps_log = " << format_float(cfg.eps_log) << "\n";
    out << "hidden = " << cfg.hidden << "\n";
    out << "depth = " << cfg.depth << "\n";
    out << "threads = " << cfg.threads << "\n";
    out << "corpus = " << cfg.corpus_dir.string() << "\n";
    out << "lossnet = " << cfg.lossnet_path.string() << "\n";
    out << "out = " << out_path.string() << "\n";
    out << "wall_seconds = " << wall_seconds << "\n";
    if (report) {
        out << "checksum = " << std::hex << report->final_checksum << std::dec << "\n";
        if (cfg.task == Task::Tonemap) {
            out << "rescale_min = " << format_float(report->rescale_min) << "\n";
            out << "rescale_max = " << format_float(report->rescale_max) << "\n";
        }
        out << "epoch_seconds =";
        for (double s : report->epoch_seconds) out << " " << s;
        out << "\n";
        out << "trace =";
        for (float v : report->loss_trace) out << " " << format_float(v);
        out << "\n";
    }
    if (!out) throw IoError("short write to report " + path.string());
}

LossNetwork load_lossnet(const TaskConfig& cfg) {
    if (cfg.lossnet_path.empty()) {
        throw UsageError(std::string("no loss network: pass --lossnet or set $") + kLossnetEnv);
    }
    return LossNetwork::load(cfg.lossnet_path);
}

int run_train(Task task, const CLI::App* cmd, const Flags& flags) {
    TaskConfig cfg = resolve_config(task, cmd, flags);
    if (cfg.corpus_dir.empty()) throw UsageError("missing --corpus");
    if (cfg.out_path.empty()) throw UsageError("missing --out");
    LossNetwork lossnet = load_lossnet(cfg);
    auto t0 = std::chrono::steady_clock::now();
    std::vector<Tensor> corpus = load_corpus(cfg.corpus_dir, cfg.train_size);
    TrainResult result = task == Task::Downscale ? train_downscaler(corpus, lossnet, cfg)
                                                 : train_decolorizer(corpus, lossnet, cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.net.save(cfg.out_path);
    write_report(cfg.out_path, "train-" + to_string(task), cfg, &result.report, wall);
    std::cout << "trained " << to_string(task) << " net -> " << cfg.out_path.string() << " ("
              << result.report.loss_trace.size() << " steps)\n";
    return 0;
}

int run_tonemap(const CLI::App* cmd, const Flags& flags) {
    TaskConfig cfg = resolve_config(Task::Tonemap, cmd, flags);
    if (flags.input.empty()) throw UsageError("missing --in");
    if (cfg.out_path.empty()) throw UsageError("missing --out");
    LossNetwork lossnet = load_lossnet(cfg);
    auto t0 = std::chrono::steady_clock::now();
    HdrImage hdr = load_hdr(flags.input);
    TonemapResult result = tonemap_online(hdr, lossnet, cfg);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    save_image(result.image, cfg.out_path);
    if (!flags.save_net.empty()) result.net.save(flags.save_net);
    write_report(cfg.out_path, "tonemap", cfg, &result.report, wall);
    std::cout << "tone mapped " << flags.input << " -> " << cfg.out_path.string() << "\n";
    return 0;
}

int run_apply(const Flags& flags, int threads) {
    set_num_threads(threads);
    TransformNet net = TransformNet::load(flags.net_path);
    LdrImage input = load_image(flags.input);
    LdrImage output = apply(net, input);
    save_image(output, flags.out);
    std::cout << "applied " << to_string(net.task()) << " net -> " << flags.out << "\n";
    return 0;
}

int run_baseline(const Flags& flags, const std::string& method, int factor, int threads) {
    set_num_threads(threads);
    LdrImage input = load_image(flags.input);
    LdrImage output;
    if (method == "luminance") {
        output = decolorize_baseline(input);
    } else {
        output = downscale_baseline(input, {downscale_kind_from_string(method), factor});
    }
    save_image(output, flags.out);
    std::cout << method << " baseline -> " << flags.out << "\n";
    return 0;
}

int run_eval(const std::string& a_path, const std::string& b_path, const std::string& metric,
             const Flags& flags, const CLI::App* cmd) {
    LdrImage a = load_image(a_path);
    LdrImage b = load_image(b_path);
    if (metric == "ssim") {
        if (a.channels == 3) a = decolorize_baseline(a);
        if (b.channels == 3) b = decolorize_baseline(b);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", ssim(a, b));
        std::cout << buf << "\n";
        return 0;
    }
    if (metric == "perceptual") {
        TaskConfig cfg = resolve_config(Task::Downscale, cmd, flags);
        LossNetwork lossnet = load_lossnet(cfg);
        if (a.channels != 3 || b.channels != 3) {
            throw UsageError("perceptual metric expects color images");
        }
        std::cout << format_float(lossnet.perceptual_loss(to_tensor(a), to_tensor(b), cfg.taps))
                  << "\n";
        return 0;
    }
    throw UsageError("unknown metric '" + metric + "' (ssim|perceptual)");
}

int run_export_template(const std::string& out_path) {
    std::string header = archive_header_text(LossNetwork::vgg19_template());
    if (out_path.empty()) {
        std::cout << header;
    } else {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        out << header;
        if (!out) throw IoError("short write to " + out_path);
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"trainable image downscaling, decolorization and HDR tone mapping "
                 "driven by a feature-consistency loss"};
    app.require_subcommand(1);
    Flags flags;

    auto* train_down = app.add_subcommand("train-downscale",
                                          "train a downscaler on an image corpus");
    add_common_training_flags(train_down, flags);
    train_down->add_option("--corpus", flags.corpus, "directory of training images");
    train_down->add_option("--out", flags.out, "output net path");
    train_down->add_option("--size", flags.size, "training crop size");

    auto* train_decol = app.add_subcommand("train-decolorize",
                                           "train a decolorizer on an image corpus");
    add_common_training_flags(train_decol, flags);
    train_decol->add_option("--corpus", flags.corpus, "directory of training images");
    train_decol->add_option("--out", flags.out, "output net path");
    train_decol->add_option("--size", flags.size, "training crop size");

    auto* tonemap = app.add_subcommand("tonemap", "tone map one HDR radiance map (online)");
    add_common_training_flags(tonemap, flags);
    tonemap->add_option("--in", flags.input, "input .hdr/.pic radiance map")->required();
    tonemap->add_option("--out", flags.out, "output image path")->required();
    tonemap->add_option("--alpha", flags.alpha, "log compression factor");
    tonemap->add_option("--gamma", flags.gamma, "display rendering exponent");
    tonemap->add_option("--eps-log", flags.eps_log, "log offset guard");
    tonemap->add_option("--save-net", flags.save_net, "also save the adapted net");

    auto* apply_cmd = app.add_subcommand("apply", "run a trained net on an image");
    apply_cmd->add_option("--net", flags.net_path, "trained net archive")->required();
    apply_cmd->add_option("--in", flags.input, "input image")->required();
    apply_cmd->add_option("--out", flags.out, "output image")->required();
    apply_cmd->add_option("--threads", flags.threads, "worker threads");

    auto* baseline = app.add_subcommand("baseline", "classical reference operators");
    std::string method = "bicubic";
    int factor = 4;
    baseline->add_option("--method", method,
                         "subsample|box|bilinear|bicubic|lanczos3|luminance");
    baseline->add_option("--factor", factor, "downscale factor");
    baseline->add_option("--in", flags.input, "input image")->required();
    baseline->add_option("--out", flags.out, "output image")->required();
    baseline->add_option("--threads", flags.threads, "worker threads");

    auto* eval = app.add_subcommand("eval", "compare two images, print one number");
    std::string a_path, b_path, metric = "ssim";
    eval->add_option("--a", a_path, "first image")->required();
    eval->add_option("--b", b_path, "second image")->required();
    eval->add_option("--metric", metric, "ssim|perceptual");
    eval->add_option("--taps", flags.taps, "taps for the perceptual metric");
    eval->add_option("--lossnet", flags.lossnet, "loss network for the perceptual metric");

    auto* export_tpl = app.add_subcommand("export-weights-template",
                                          "print the loss-network archive header skeleton");
    std::string template_out;
    export_tpl->add_option("--out", template_out, "write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (train_down->parsed()) return run_train(Task::Downscale, train_down, flags);
        if (train_decol->parsed()) return run_train(Task::Decolorize, train_decol, flags);
        if (tonemap->parsed()) return run_tonemap(tonemap, flags);
        if (apply_cmd->parsed()) return run_apply(flags, flags.threads);
        if (baseline->parsed()) return run_baseline(flags, method, factor, flags.threads);
        if (eval->parsed()) return run_eval(a_path, b_path, metric, flags, eval);
        if (export_tpl->parsed()) return run_export_template(template_out);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace fcit
