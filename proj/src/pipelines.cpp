#include "fcit/pipelines.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "fcit/adam.hpp"
#include "fcit/errors.hpp"
#include "fcit/parallel.hpp"
#include "fcit/rng.hpp"

namespace fcit {

TaskConfig TaskConfig::defaults(Task task) {
    TaskConfig cfg;
    cfg.task = task;
    cfg.taps = task == Task::Decolorize
                   ? std::set<std::string>{"conv4_1"}
                   : std::set<std::string>{"conv1_1", "conv2_1", "conv3_1"};
    return cfg;
}

void TaskConfig::validate() const {
    if (taps.empty()) throw UsageError("taps must be non-empty");
    if (!(learning_rate > 0.0f)) throw UsageError("learning_rate must be > 0");
    if (batch < 1) throw UsageError("batch must be >= 1");
    if (epochs < 0) throw UsageError("epochs must be >= 0");
    if (train_size < 8) throw UsageError("size must be >= 8");
    if (!(alpha > 0.0f)) {
        throw UsageError("alpha must be > 0, got " + std::to_string(alpha));
    }
    if (!(gamma > 0.2f && gamma <= 1.0f)) {
        throw UsageError("gamma must be in (0.2, 1], got " + std::to_string(gamma));
    }
    if (!(eps_log > 0.0f)) throw UsageError("eps_log must be > 0");
    if (hidden < 1) throw UsageError("hidden must be >= 1");
    if (depth < 1) throw UsageError("depth must be >= 1");
    if (threads < 0) throw UsageError("threads must be >= 0");
}

Tensor stack_batch(const std::vector<Tensor>& items, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("empty batch");
    const Shape& first = items[static_cast<std::size_t>(indices[0])].shape();
    Tensor out({static_cast<int>(indices.size()), first.c, first.h, first.w});
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Tensor& item = items[static_cast<std::size_t>(indices[i])];
        if (!(item.shape() == first)) {
            throw std::invalid_argument("batch items disagree in shape: " +
                                        to_string(item.shape()) + " vs " + to_string(first));
        }
        std::copy(item.values().begin(), item.values().end(),
                  out.values().begin() + static_cast<std::ptrdiff_t>(i * first.numel()));
    }
    return out;
}

std::vector<Tensor> load_corpus(const std::filesystem::path& dir, int size) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) {
        throw IoError("corpus directory " + dir.string() + " does not exist");
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char& ch : ext) ch = static_cast<char>(std::tolower(ch));
        if (ext == ".png" || ext == ".ppm" || ext == ".pgm") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw UsageError("empty corpus: no PNG/PPM/PGM images under " + dir.string());
    }
    std::sort(files.begin(), files.end());
    std::vector<Tensor> corpus;
    corpus.reserve(files.size());
    for (const auto& file : files) {
        LdrImage img = load_image(file);
        if (img.channels != 3) {
            throw UsageError("corpus image " + file.string() + " is not a color image");
        }
        img = resize_bilinear(center_crop_square(img), size, size);
        corpus.push_back(to_tensor(img));
    }
    return corpus;
}

namespace {

float scalar_loss(const Graph& graph, Value loss, std::size_t iteration) {
    float v = graph.value(loss).at(0, 0, 0, 0);
    if (!std::isfinite(v)) {
        throw NumericError("loss is not finite at iteration " + std::to_string(iteration));
    }
    return v;
}

TrainResult train_offline(const std::vector<Tensor>& corpus, const LossNetwork& lossnet,
                          const TaskConfig& config) {
    config.validate();
    if (corpus.empty()) throw UsageError("empty corpus");
    set_num_threads(config.threads);

    TransformNet net = TransformNet::build(config.task, config.seed,
                                           {config.hidden, config.depth});
    AdamState adam(net.params(), AdamConfig{.learning_rate = config.learning_rate});
    TrainResult result{std::move(net), {}};

    std::vector<int> order(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) order[i] = static_cast<int>(i);
    Rng shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        auto t0 = std::chrono::steady_clock::now();
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += config.batch) {
            std::vector<int> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(std::min(
                                       start + config.batch, order.size())));
            Graph graph;
            Value x = graph.leaf(stack_batch(corpus, batch), false);
            std::vector<Value> param_leaves;
            Value y = result.net.forward(graph, x, &param_leaves);
            Value x_hat = config.task == Task::Downscale
                              ? graph.nn_upsample(y, result.net.scale_factor())
                              : graph.replicate3(y);
            Value loss = lossnet.perceptual_loss(graph, x, x_hat, config.taps);
            result.report.loss_trace.push_back(
                scalar_loss(graph, loss, result.report.loss_trace.size()));
            graph.backward(loss);
            std::vector<Tensor> grads;
            grads.reserve(param_leaves.size());
            for (Value p : param_leaves) grads.push_back(graph.grad(p));
            adam.step(result.net.params(), grads);
        }
        auto t1 = std::chrono::steady_clock::now();
        result.report.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    result.report.final_checksum = result.net.params_checksum();
    return result;
}

}  // namespace

TrainResult train_downscaler(const std::vector<Tensor>& corpus, const LossNetwork& lossnet,
                             const TaskConfig& config) {
    if (config.task != Task::Downscale) {
        throw UsageError("train_downscaler requires a downscale config");
    }
    for (const Tensor& t : corpus) {
        if (t.h() % (1 << config.depth) != 0 || t.w() % (1 << config.depth) != 0) {
            throw UsageError("corpus extents must be divisible by " +
                             std::to_string(1 << config.depth));
        }
    }
    return train_offline(corpus, lossnet, config);
}

TrainResult train_decolorizer(const std::vector<Tensor>& corpus, const LossNetwork& lossnet,
                              const TaskConfig& config) {
    if (config.task != Task::Decolorize) {
        throw UsageError("train_decolorizer requires a decolorize config");
    }
    return train_offline(corpus, lossnet, config);
}

Tensor log_compress(const HdrImage& hdr, float alpha, float eps_log) {
    if (!(alpha > 0.0f)) throw std::invalid_argument("alpha must be > 0");
    if (!(eps_log > 0.0f)) throw std::invalid_argument("eps_log must be > 0");
    Tensor t = to_tensor(hdr);
    for (float& v : t.values()) {
        if (v < 0.0f || !std::isfinite(v)) {
            throw std::invalid_argument("negative or non-finite radiance (corrupt input)");
        }
        v = alpha * std::log(v + eps_log);
    }
    return t;
}

Tensor rescale_for_loss(const Tensor& t, float* lo, float* hi) {
    float mn = t.min();
    float mx = t.max();
    if (lo) *lo = mn;
    if (hi) *hi = mx;
    Tensor out(t.shape());
    float span = mx - mn;
    if (!(span > 0.0f)) {
        return out;  // constant map: dynamic range 1 collapses to zero
    }
    float scale = 255.0f / span;
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        out.data()[i] = (t.data()[i] - mn) * scale;
    }
    return out;
}

Tensor render_display_values(const HdrImage& hdr, const Tensor& net_output, float gamma) {
    if (!(gamma > 0.0f && gamma <= 1.0f)) {
        throw std::invalid_argument("gamma must be in (0, 1], got " + std::to_string(gamma));
    }
    if (!(net_output.shape() == Shape{1, 3, hdr.height, hdr.width})) {
        throw std::invalid_argument("net output " + to_string(net_output.shape()) +
                                    " does not match radiance map " +
                                    std::to_string(hdr.width) + "x" + std::to_string(hdr.height));
    }
    Tensor out({1, 3, hdr.height, hdr.width});
    for (int y = 0; y < hdr.height; ++y) {
        for (int x = 0; x < hdr.width; ++x) {
            float l_in = luminance(hdr.at(y, x, 0), hdr.at(y, x, 1), hdr.at(y, x, 2));
            float l_out = luminance(net_output.at(0, 0, y, x), net_output.at(0, 1, y, x),
                                    net_output.at(0, 2, y, x));
            for (int c = 0; c < 3; ++c) {
                float v = 0.0f;
                if (l_in > 0.0f) {
                    v = std::pow(hdr.at(y, x, c) / l_in, gamma) * l_out;
                }
                out.at(0, c, y, x) = v;
            }
        }
    }
    return out;
}

LdrImage render_display(const HdrImage& hdr, const Tensor& net_output, float gamma) {
    return from_tensor(render_display_values(hdr, net_output, gamma));
}

TonemapResult tonemap_online(const HdrImage& hdr, const LossNetwork& lossnet,
                             const TaskConfig& config) {
    config.validate();
    if (config.task != Task::Tonemap) {
        throw UsageError("tonemap_online requires a tonemap config");
    }
    set_num_threads(config.threads);

    Tensor compressed = log_compress(hdr, config.alpha, config.eps_log);
    TrainReport report;
    Tensor z = rescale_for_loss(compressed, &report.rescale_min, &report.rescale_max);

    TransformNet net = TransformNet::build(Task::Tonemap, config.seed,
                                           {config.hidden, config.depth});
    AdamState adam(net.params(), AdamConfig{.learning_rate = config.learning_rate});

    // Online training: each epoch is one step on the single image.
    for (int iter = 0; iter < config.epochs; ++iter) {
        auto t0 = std::chrono::steady_clock::now();
        Graph graph;
        Value vz = graph.leaf(z, false);
        std::vector<Value> param_leaves;
        Value y = net.forward(graph, vz, &param_leaves);
        Value loss = lossnet.perceptual_loss(graph, vz, y, config.taps);
        report.loss_trace.push_back(scalar_loss(graph, loss, report.loss_trace.size()));
        graph.backward(loss);
        std::vector<Tensor> grads;
        grads.reserve(param_leaves.size());
        for (Value p : param_leaves) grads.push_back(graph.grad(p));
        adam.step(net.params(), grads);
        auto t1 = std::chrono::steady_clock::now();
        report.epoch_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
    }

    Tensor mapped = net.forward(z);
    report.final_checksum = net.params_checksum();
    TonemapResult result{render_display(hdr, mapped, config.gamma), std::move(net),
                         std::move(report)};
    return result;
}

LdrImage apply(const TransformNet& net, const LdrImage& image) {
    if (net.task() == Task::Tonemap) {
        throw UsageError("tonemap nets are adapted per radiance map; use the tonemap "
                         "pipeline instead of apply");
    }
    if (image.channels != 3) {
        throw UsageError("task " + to_string(net.task()) + " expects a 3-channel input image");
    }
    Tensor input = to_tensor(image);
    if (net.task() == Task::Downscale) {
        int f = net.scale_factor();
        int out_h = (image.height + f - 1) / f;
        int out_w = (image.width + f - 1) / f;
        if (image.height % f != 0 || image.width % f != 0) {
            input = pad_replicate(input, 0, out_h * f - image.height, 0,
                                  out_w * f - image.width);
        }
        Tensor out = net.forward(input);
        if (out.h() != out_h || out.w() != out_w) {
            out = crop(out, 0, 0, out_h, out_w);
        }
        return from_tensor(out);
    }
    return from_tensor(net.forward(input));
}

float corpus_loss(const TransformNet& net, const LossNetwork& lossnet,
                  const std::vector<Tensor>& corpus, const std::set<std::string>& taps) {
    if (corpus.empty()) throw UsageError("empty corpus");
    double total = 0.0;
    for (const Tensor& x : corpus) {
        Graph graph;
        Value vx = graph.leaf(x, false);
        Value y = net.forward(graph, vx);
        Value x_hat = y;
        if (net.task() == Task::Downscale) {
            x_hat = graph.nn_upsample(y, net.scale_factor());
        } else if (net.task() == Task::Decolorize) {
            x_hat = graph.replicate3(y);
        }
        Value loss = lossnet.perceptual_loss(graph, vx, x_hat, taps);
        total += graph.value(loss).at(0, 0, 0, 0);
    }
    return static_cast<float>(total / static_cast<double>(corpus.size()));
}

}  // namespace fcit
