#pragma once

#include <span>
#include <vector>

#include "fcit/tensor.hpp"

namespace fcit {

struct AdamConfig {
    float learning_rate = 2e-4f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float epsilon = 1e-8f;
};

// Adam with bias correction. Moment tensors mirror the parameter shapes and
// the step count increases by one per update.
class AdamState {
public:
    AdamState(std::span<const Tensor> params, AdamConfig config = {});

    void step(std::span<Tensor> params, std::span<const Tensor> grads);

    int steps_taken() const { return step_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    int step_ = 0;
};

}  // namespace fcit
