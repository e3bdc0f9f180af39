#include "fcit/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fcit {

AdamState::AdamState(std::span<const Tensor> params, AdamConfig config) : config_(config) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor& p : params) {
        m_.emplace_back(Tensor::zeros(p.shape()));
        v_.emplace_back(Tensor::zeros(p.shape()));
    }
}

void AdamState::step(std::span<Tensor> params, std::span<const Tensor> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw std::invalid_argument("adam step: expected " + std::to_string(m_.size()) +
                                    " parameter/gradient tensors");
    }
    ++step_;
    float bias1 = 1.0f - std::pow(config_.beta1, static_cast<float>(step_));
    float bias2 = 1.0f - std::pow(config_.beta2, static_cast<float>(step_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = params[i];
        const Tensor& g = grads[i];
        if (!(p.shape() == m_[i].shape()) || !(g.shape() == m_[i].shape())) {
            throw std::invalid_argument("adam step: shape mismatch at parameter " +
                                        std::to_string(i) + ": " + to_string(p.shape()) +
                                        " / " + to_string(g.shape()) + " vs moments " +
                                        to_string(m_[i].shape()));
        }
        float* pv = p.data();
        const float* gv = g.data();
        float* mv = m_[i].data();
        float* vv = v_[i].data();
        for (std::int64_t j = 0; j < p.numel(); ++j) {
            mv[j] = config_.beta1 * mv[j] + (1.0f - config_.beta1) * gv[j];
            vv[j] = config_.beta2 * vv[j] + (1.0f - config_.beta2) * gv[j] * gv[j];
            float m_hat = mv[j] / bias1;
            float v_hat = vv[j] / bias2;
            pv[j] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

}  // namespace fcit
