#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fcit/tensor.hpp"

namespace fcit {

enum class PadKind { Zero, Replicate };

struct Conv2dSpec {
    int stride_h = 1;
    int stride_w = 1;
    PadKind pad_kind = PadKind::Zero;
    int pad = 0;
};

// Handle to a node on a Graph's tape.
struct Value {
    int id = -1;
};

// Reverse-mode tape. Nodes are appended in topological order by
// construction; a backward pass from a scalar node fills gradient slots for
// every node that requires one. A Graph belongs to one training iteration
// and is not shared across threads.
class Graph {
public:
    Value leaf(Tensor value, bool requires_grad = false);
    Value leaf(std::shared_ptr<const Tensor> value, bool requires_grad = false);

    const Tensor& value(Value v) const;
    bool requires_grad(Value v) const;
    bool has_grad(Value v) const;
    const Tensor& grad(Value v) const;
    std::size_t size() const { return nodes_.size(); }

    Value conv2d(Value input, Value weight, Value bias, const Conv2dSpec& spec);
    Value relu(Value x);
    Value scaled_tanh(Value x, float lo, float hi);
    Value nn_upsample(Value x, int factor);
    Value maxpool2x2(Value x);
    Value replicate3(Value x);
    Value sub_channel_mean(Value x, std::vector<float> means);
    Value normalized_sq_distance(Value a, Value b);
    Value add(Value a, Value b);

    void backward(Value loss);

private:
    struct Node {
        const char* kind = "";
        std::shared_ptr<const Tensor> value;
        std::vector<int> inputs;
        bool requires_grad = false;
        Tensor grad;  // empty until the backward pass reaches this node
        std::function<void(Graph&, int)> backward_fn;
    };

    Value add_node(const char* kind, std::vector<int> inputs, Tensor out,
                   std::function<void(Graph&, int)> backward_fn);
    Tensor& grad_slot(int id);
    bool wants_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
    const Node& node(Value v) const;
    Node& node(Value v);

    std::vector<Node> nodes_;
};

namespace detail {

// C(M x N) = A(M x K) * B(K x N), row-major. Rows of C are distributed over
// worker threads; each row keeps a fixed accumulation order.
void gemm(const float* a, const float* b, float* c, int m, int k, int n);

// C(M x K) += A(M x N) * B(K x N)^T.
void gemm_nt_accum(const float* a, const float* b, float* c, int m, int n, int k);

// C(K x N) = A(M x K)^T * B(M x N).
void gemm_tn(const float* a, const float* b, float* c, int m, int k, int n);

Tensor conv2d_forward(const Tensor& in, const Tensor& w, const Tensor& b,
                      const Conv2dSpec& spec);
void conv2d_backward(const Tensor& in, const Tensor& w, const Conv2dSpec& spec,
                     const Tensor& grad_out, Tensor* grad_in, Tensor* grad_w,
                     Tensor* grad_b);

}  // namespace detail

}  // namespace fcit
