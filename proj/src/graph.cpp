#include "fcit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace fcit {

Value Graph::leaf(Tensor value, bool requires_grad) {
    return leaf(std::make_shared<const Tensor>(std::move(value)), requires_grad);
}

Value Graph::leaf(std::shared_ptr<const Tensor> value, bool requires_grad) {
    if (!value || value->empty()) {
        throw std::invalid_argument("graph leaf requires a non-empty tensor");
    }
    Node nd;
    nd.kind = "leaf";
    nd.value = std::move(value);
    nd.requires_grad = requires_grad;
    nodes_.push_back(std::move(nd));
    return Value{static_cast<int>(nodes_.size()) - 1};
}

const Graph::Node& Graph::node(Value v) const {
    if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) {
        throw std::logic_error("value handle does not belong to this graph");
    }
    return nodes_[static_cast<std::size_t>(v.id)];
}

Graph::Node& Graph::node(Value v) {
    return const_cast<Node&>(static_cast<const Graph*>(this)->node(v));
}

const Tensor& Graph::value(Value v) const {
    return *node(v).value;
}

bool Graph::requires_grad(Value v) const {
    return node(v).requires_grad;
}

bool Graph::has_grad(Value v) const {
    return !node(v).grad.empty();
}

const Tensor& Graph::grad(Value v) const {
    const Node& nd = node(v);
    if (nd.grad.empty()) {
        throw std::logic_error("node has no gradient (unreachable from the loss or "
                               "backward not run)");
    }
    return nd.grad;
}

Value Graph::add_node(const char* kind, std::vector<int> inputs, Tensor out,
                      std::function<void(Graph&, int)> backward_fn) {
    Node nd;
    nd.kind = kind;
    nd.value = std::make_shared<const Tensor>(std::move(out));
    nd.inputs = std::move(inputs);
    for (int id : nd.inputs) {
        nd.requires_grad = nd.requires_grad || nodes_[static_cast<std::size_t>(id)].requires_grad;
    }
    nd.backward_fn = std::move(backward_fn);
    nodes_.push_back(std::move(nd));
    return Value{static_cast<int>(nodes_.size()) - 1};
}

Tensor& Graph::grad_slot(int id) {
    Node& nd = nodes_[static_cast<std::size_t>(id)];
    if (nd.grad.empty()) {
        nd.grad = Tensor::zeros(nd.value->shape());
    }
    return nd.grad;
}

void Graph::backward(Value loss) {
    const Node& loss_node = node(loss);
    if (!(loss_node.value->shape() == Shape{1, 1, 1, 1})) {
        throw std::invalid_argument("backward requires a scalar (1,1,1,1) loss node, got " +
                                    to_string(loss_node.value->shape()));
    }
    for (Node& nd : nodes_) {
        nd.grad = Tensor();
    }
    grad_slot(loss.id).at(0, 0, 0, 0) = 1.0f;
    for (int id = loss.id; id >= 0; --id) {
        Node& nd = nodes_[static_cast<std::size_t>(id)];
        if (!nd.grad.empty() && nd.requires_grad && nd.backward_fn) {
            nd.backward_fn(*this, id);
        }
    }
}

// ---- operators ----

Value Graph::conv2d(Value input, Value weight, Value bias, const Conv2dSpec& spec) {
    const Tensor& in = value(input);
    const Tensor& w = value(weight);
    const Tensor& b = value(bias);
    Tensor out = detail::conv2d_forward(in, w, b, spec);
    return add_node("conv2d", {input.id, weight.id, bias.id}, std::move(out),
                    [spec](Graph& g, int id) {
                        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
                        int in_id = nd.inputs[0], w_id = nd.inputs[1], b_id = nd.inputs[2];
                        const Tensor& in = *g.nodes_[static_cast<std::size_t>(in_id)].value;
                        const Tensor& w = *g.nodes_[static_cast<std::size_t>(w_id)].value;
                        Tensor* gin = g.wants_grad(in_id) ? &g.grad_slot(in_id) : nullptr;
                        Tensor* gw = g.wants_grad(w_id) ? &g.grad_slot(w_id) : nullptr;
                        Tensor* gb = g.wants_grad(b_id) ? &g.grad_slot(b_id) : nullptr;
                        detail::conv2d_backward(in, w, spec, nd.grad, gin, gw, gb);
                    });
}

Value Graph::relu(Value x) {
    const Tensor& in = value(x);
    Tensor out(in.shape());
    const float* src = in.data();
    float* dst = out.data();
    for (std::int64_t i = 0; i < in.numel(); ++i) {
        dst[i] = src[i] > 0.0f ? src[i] : 0.0f;
    }
    return add_node("relu", {x.id}, std::move(out), [](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        int in_id = nd.inputs[0];
        if (!g.wants_grad(in_id)) return;
        const Tensor& in = *g.nodes_[static_cast<std::size_t>(in_id)].value;
        Tensor& gin = g.grad_slot(in_id);
        const float* src = in.data();
        const float* gout = nd.grad.data();
        float* dst = gin.data();
        for (std::int64_t i = 0; i < in.numel(); ++i) {
            if (src[i] > 0.0f) dst[i] += gout[i];
        }
    });
}

Value Graph::scaled_tanh(Value x, float lo, float hi) {
    if (!(hi > lo)) {
        throw std::invalid_argument("scaled_tanh requires hi > lo, got lo=" +
                                    std::to_string(lo) + " hi=" + std::to_string(hi));
    }
    const Tensor& in = value(x);
    Tensor out(in.shape());
    const float* src = in.data();
    float* dst = out.data();
    float half_span = 0.5f * (hi - lo);
    for (std::int64_t i = 0; i < in.numel(); ++i) {
        dst[i] = lo + half_span * (std::tanh(src[i]) + 1.0f);
    }
    return add_node("scaled_tanh", {x.id}, std::move(out), [lo, half_span](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        int in_id = nd.inputs[0];
        if (!g.wants_grad(in_id)) return;
        Tensor& gin = g.grad_slot(in_id);
        const float* out = nd.value->data();
        const float* gout = nd.grad.data();
        float* dst = gin.data();
        for (std::int64_t i = 0; i < nd.value->numel(); ++i) {
            float t = (out[i] - lo) / half_span - 1.0f;  // tanh of the pre-activation
            dst[i] += gout[i] * half_span * (1.0f - t * t);
        }
    });
}

Value Graph::nn_upsample(Value x, int factor) {
    if (factor < 1) {
        throw std::invalid_argument("nn_upsample factor must be >= 1, got " +
                                    std::to_string(factor));
    }
    const Tensor& in = value(x);
    Tensor out({in.n(), in.c(), in.h() * factor, in.w() * factor});
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < out.h(); ++y)
                for (int xx = 0; xx < out.w(); ++xx)
                    out.at(n, c, y, xx) = in.at(n, c, y / factor, xx / factor);
    return add_node("nn_upsample", {x.id}, std::move(out), [factor](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        int in_id = nd.inputs[0];
        if (!g.wants_grad(in_id)) return;
        Tensor& gin = g.grad_slot(in_id);
        const Tensor& gout = nd.grad;
        // Each factor x factor output block sums into its source pixel.
        for (int n = 0; n < gin.n(); ++n)
            for (int c = 0; c < gin.c(); ++c)
                for (int y = 0; y < gout.h(); ++y)
                    for (int xx = 0; xx < gout.w(); ++xx)
                        gin.at(n, c, y / factor, xx / factor) += gout.at(n, c, y, xx);
    });
}

Value Graph::maxpool2x2(Value x) {
    const Tensor& in = value(x);
    if (in.h() < 2 || in.w() < 2) {
        throw std::invalid_argument("maxpool2x2 needs spatial extent >= 2, got " +
                                    to_string(in.shape()));
    }
    Tensor out({in.n(), in.c(), in.h() / 2, in.w() / 2});
    std::vector<std::int64_t> argmax(static_cast<std::size_t>(out.numel()));
    std::int64_t o = 0;
    for (int n = 0; n < in.n(); ++n) {
        for (int c = 0; c < in.c(); ++c) {
            for (int y = 0; y < out.h(); ++y) {
                for (int xx = 0; xx < out.w(); ++xx, ++o) {
                    std::int64_t best_idx = in.index(n, c, 2 * y, 2 * xx);
                    float best = in.data()[best_idx];
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            std::int64_t idx = in.index(n, c, 2 * y + dy, 2 * xx + dx);
                            float v = in.data()[idx];
                            if (v > best) {
                                best = v;
                                best_idx = idx;
                            }
                        }
                    }
                    out.data()[o] = best;
                    argmax[static_cast<std::size_t>(o)] = best_idx;
                }
            }
        }
    }
    return add_node("maxpool2x2", {x.id}, std::move(out),
                    [argmax = std::move(argmax)](Graph& g, int id) {
                        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
                        int in_id = nd.inputs[0];
                        if (!g.wants_grad(in_id)) return;
                        Tensor& gin = g.grad_slot(in_id);
                        const float* gout = nd.grad.data();
                        for (std::int64_t i = 0; i < nd.grad.numel(); ++i) {
                            gin.data()[argmax[static_cast<std::size_t>(i)]] += gout[i];
                        }
                    });
}

Value Graph::replicate3(Value x) {
    const Tensor& in = value(x);
    if (in.c() != 1) {
        throw std::invalid_argument("replicate3 expects a single-channel tensor, got " +
                                    to_string(in.shape()));
    }
    Tensor out({in.n(), 3, in.h(), in.w()});
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < in.h(); ++y)
                for (int xx = 0; xx < in.w(); ++xx)
                    out.at(n, c, y, xx) = in.at(n, 0, y, xx);
    return add_node("replicate3", {x.id}, std::move(out), [](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        int in_id = nd.inputs[0];
        if (!g.wants_grad(in_id)) return;
        Tensor& gin = g.grad_slot(in_id);
        const Tensor& gout = nd.grad;
        for (int n = 0; n < gin.n(); ++n)
            for (int c = 0; c < 3; ++c)
                for (int y = 0; y < gin.h(); ++y)
                    for (int xx = 0; xx < gin.w(); ++xx)
                        gin.at(n, 0, y, xx) += gout.at(n, c, y, xx);
    });
}

Value Graph::sub_channel_mean(Value x, std::vector<float> means) {
    const Tensor& in = value(x);
    if (static_cast<int>(means.size()) != in.c()) {
        throw std::invalid_argument("sub_channel_mean got " + std::to_string(means.size()) +
                                    " means for " + std::to_string(in.c()) + " channels");
    }
    Tensor out(in.shape());
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < in.h(); ++y)
                for (int xx = 0; xx < in.w(); ++xx)
                    out.at(n, c, y, xx) = in.at(n, c, y, xx) - means[static_cast<std::size_t>(c)];
    return add_node("sub_channel_mean", {x.id}, std::move(out), [](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        int in_id = nd.inputs[0];
        if (!g.wants_grad(in_id)) return;
        Tensor& gin = g.grad_slot(in_id);
        const float* gout = nd.grad.data();
        float* dst = gin.data();
        for (std::int64_t i = 0; i < nd.grad.numel(); ++i) dst[i] += gout[i];
    });
}

Value Graph::normalized_sq_distance(Value a, Value b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (!(ta.shape() == tb.shape())) {
        throw std::invalid_argument("normalized_sq_distance shape mismatch: " +
                                    to_string(ta.shape()) + " vs " + to_string(tb.shape()));
    }
    double acc = 0.0;
    const float* pa = ta.data();
    const float* pb = tb.data();
    for (std::int64_t i = 0; i < ta.numel(); ++i) {
        double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
        acc += d * d;
    }
    Tensor out({1, 1, 1, 1});
    out.at(0, 0, 0, 0) = static_cast<float>(acc / static_cast<double>(ta.numel()));
    return add_node("normalized_sq_distance", {a.id, b.id}, std::move(out),
                    [](Graph& g, int id) {
                        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
                        int a_id = nd.inputs[0], b_id = nd.inputs[1];
                        const Tensor& ta = *g.nodes_[static_cast<std::size_t>(a_id)].value;
                        const Tensor& tb = *g.nodes_[static_cast<std::size_t>(b_id)].value;
                        float scale = 2.0f * nd.grad.at(0, 0, 0, 0) /
                                      static_cast<float>(ta.numel());
                        const float* pa = ta.data();
                        const float* pb = tb.data();
                        if (g.wants_grad(a_id)) {
                            float* da = g.grad_slot(a_id).data();
                            for (std::int64_t i = 0; i < ta.numel(); ++i)
                                da[i] += scale * (pa[i] - pb[i]);
                        }
                        if (g.wants_grad(b_id)) {
                            float* db = g.grad_slot(b_id).data();
                            for (std::int64_t i = 0; i < ta.numel(); ++i)
                                db[i] += scale * (pb[i] - pa[i]);
                        }
                    });
}

Value Graph::add(Value a, Value b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    if (!(ta.shape() == tb.shape())) {
        throw std::invalid_argument("add shape mismatch: " + to_string(ta.shape()) + " vs " +
                                    to_string(tb.shape()));
    }
    Tensor out(ta.shape());
    for (std::int64_t i = 0; i < ta.numel(); ++i) {
        out.data()[i] = ta.data()[i] + tb.data()[i];
    }
    return add_node("add", {a.id, b.id}, std::move(out), [](Graph& g, int id) {
        Node& nd = g.nodes_[static_cast<std::size_t>(id)];
        const float* gout = nd.grad.data();
        for (int input : nd.inputs) {
            if (!g.wants_grad(input)) continue;
            float* dst = g.grad_slot(input).data();
            for (std::int64_t i = 0; i < nd.grad.numel(); ++i) dst[i] += gout[i];
        }
    });
}

}  // namespace fcit
