#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "fcit/image.hpp"
#include "fcit/lossnet.hpp"
#include "fcit/transform_net.hpp"

namespace fcit {

struct TaskConfig {
    Task task = Task::Downscale;
    std::set<std::string> taps;  // layers of the loss network entering the loss
    float learning_rate = 2e-4f;
    int batch = 16;
    int epochs = 10;
    int train_size = 256;  // corpus images are center-cropped then resized to this square
    float alpha = 0.5f;    // log compression factor (tonemap)
    float gamma = 0.5f;    // display rendering exponent (tonemap)
    float eps_log = 1e-6f;
    std::uint64_t seed = 0;
    int hidden = 32;
    int depth = 2;
    int threads = 0;  // 0 = auto, 1 = fully serial
    std::filesystem::path corpus_dir;
    std::filesystem::path out_path;
    std::filesystem::path lossnet_path;

    static TaskConfig defaults(Task task);
    void validate() const;  // throws UsageError with the admissible range
};

struct TrainReport {
    std::vector<float> loss_trace;       // one entry per optimizer step
    std::vector<double> epoch_seconds;
    std::uint64_t final_checksum = 0;
    float rescale_min = 0.0f;  // tonemap: bounds used by the loss-domain rescale
    float rescale_max = 0.0f;
};

struct TrainResult {
    TransformNet net;
    TrainReport report;
};

struct TonemapResult {
    LdrImage image;
    TransformNet net;
    TrainReport report;
};

// Offline training. Each step minimizes the feature distance between the
// batch and its shape-restored transform: nearest-neighbor upsampling for
// the downscaler, channel replication for the decolorizer.
TrainResult train_downscaler(const std::vector<Tensor>& corpus, const LossNetwork& lossnet,
                             const TaskConfig& config);
TrainResult train_decolorizer(const std::vector<Tensor>& corpus, const LossNetwork& lossnet,
                              const TaskConfig& config);

// Online procedure: adapts a fresh tonemapper to one radiance map by
// self-reconstruction of the rescaled log-compressed signal, then renders
// the display image.
TonemapResult tonemap_online(const HdrImage& hdr, const LossNetwork& lossnet,
                             const TaskConfig& config);

// alpha * ln(radiance + eps_log), per channel; finite everywhere.
Tensor log_compress(const HdrImage& hdr, float alpha, float eps_log);

// Affine min-max rescale onto [0,255]; constant maps go to zero.
Tensor rescale_for_loss(const Tensor& t, float* lo = nullptr, float* hi = nullptr);

// Eq. C_out = (C_in/L_in)^gamma * L_out per channel; zero-luminance input
// pixels render black; the image form clamps to [0,255] and quantizes.
Tensor render_display_values(const HdrImage& hdr, const Tensor& net_output, float gamma);
LdrImage render_display(const HdrImage& hdr, const Tensor& net_output, float gamma);

// Inference with task-specific postprocessing. Downscale inputs with
// extents not divisible by the scale factor are replication-padded to the
// next multiple and the output cropped to the ceiling extent.
LdrImage apply(const TransformNet& net, const LdrImage& image);

// Loads, center-crops and resizes every PNG/PPM/PGM under dir (sorted by
// filename) to size x size training tensors.
std::vector<Tensor> load_corpus(const std::filesystem::path& dir, int size);

// Stacks single-item tensors along the batch dimension.
Tensor stack_batch(const std::vector<Tensor>& items, const std::vector<int>& indices);

// Mean perceptual loss of the shape-restored transform across a corpus;
// the figure of merit used when comparing against baselines.
float corpus_loss(const TransformNet& net, const LossNetwork& lossnet,
                  const std::vector<Tensor>& corpus, const std::set<std::string>& taps);

}  // namespace fcit
