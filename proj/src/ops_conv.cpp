#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcit/graph.hpp"
#include "fcit/parallel.hpp"

namespace fcit::detail {

namespace {

struct ConvDims {
    int kh, kw, out_h, out_w, patch;  // patch = in_c * kh * kw
};

ConvDims validate(const Tensor& in, const Tensor& w, const Tensor& b, const Conv2dSpec& spec) {
    if (w.c() != in.c()) {
        throw std::invalid_argument("conv2d channel mismatch: input " + to_string(in.shape()) +
                                    " vs weights " + to_string(w.shape()));
    }
    if (spec.stride_h < 1 || spec.stride_w < 1 || spec.pad < 0) {
        throw std::invalid_argument("conv2d needs stride >= 1 and pad >= 0");
    }
    if (!(b.shape() == Shape{1, w.n(), 1, 1})) {
        throw std::invalid_argument("conv2d bias must be shaped (1," + std::to_string(w.n()) +
                                    ",1,1), got " + to_string(b.shape()));
    }
    int padded_h = in.h() + 2 * spec.pad;
    int padded_w = in.w() + 2 * spec.pad;
    if (w.h() > padded_h || w.w() > padded_w) {
        throw std::invalid_argument("conv2d kernel " + std::to_string(w.h()) + "x" +
                                    std::to_string(w.w()) + " larger than padded input " +
                                    std::to_string(padded_h) + "x" + std::to_string(padded_w));
    }
    ConvDims d;
    d.kh = w.h();
    d.kw = w.w();
    d.out_h = (padded_h - d.kh) / spec.stride_h + 1;
    d.out_w = (padded_w - d.kw) / spec.stride_w + 1;
    d.patch = in.c() * d.kh * d.kw;
    return d;
}

// Gathers the patches of one batch item into col (patch x out_h*out_w).
// Out-of-bounds taps read zero for zero padding and the clamped boundary
// pixel for replication padding.
void im2col(const Tensor& in, int item, const Conv2dSpec& spec, const ConvDims& d, float* col) {
    const int cols = d.out_h * d.out_w;
    for (int ci = 0; ci < in.c(); ++ci) {
        for (int dy = 0; dy < d.kh; ++dy) {
            for (int dx = 0; dx < d.kw; ++dx) {
                float* row = col + (std::int64_t(ci) * d.kh * d.kw + dy * d.kw + dx) * cols;
                for (int oy = 0; oy < d.out_h; ++oy) {
                    int iy = oy * spec.stride_h - spec.pad + dy;
                    bool row_oob = iy < 0 || iy >= in.h();
                    if (row_oob && spec.pad_kind == PadKind::Zero) {
                        std::memset(row + oy * d.out_w, 0,
                                    static_cast<std::size_t>(d.out_w) * sizeof(float));
                        continue;
                    }
                    int cy = std::clamp(iy, 0, in.h() - 1);
                    for (int ox = 0; ox < d.out_w; ++ox) {
                        int ix = ox * spec.stride_w - spec.pad + dx;
                        if (ix < 0 || ix >= in.w()) {
                            row[oy * d.out_w + ox] =
                                spec.pad_kind == PadKind::Zero
                                    ? 0.0f
                                    : in.at(item, ci, cy, std::clamp(ix, 0, in.w() - 1));
                        } else {
                            row[oy * d.out_w + ox] = in.at(item, ci, cy, ix);
                        }
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatters col rows back onto the input gradient. With
// replication padding the clamped taps accumulate into the boundary pixel.
void col2im_accum(const float* col, const Shape& in_shape, int item, const Conv2dSpec& spec,
                  const ConvDims& d, Tensor& grad_in) {
    const int cols = d.out_h * d.out_w;
    parallel_for(0, in_shape.c, [&](std::int64_t c_lo, std::int64_t c_hi) {
        for (int ci = static_cast<int>(c_lo); ci < static_cast<int>(c_hi); ++ci) {
            for (int dy = 0; dy < d.kh; ++dy) {
                for (int dx = 0; dx < d.kw; ++dx) {
                    const float* row =
                        col + (std::int64_t(ci) * d.kh * d.kw + dy * d.kw + dx) * cols;
                    for (int oy = 0; oy < d.out_h; ++oy) {
                        int iy = oy * spec.stride_h - spec.pad + dy;
                        if (iy < 0 || iy >= in_shape.h) {
                            if (spec.pad_kind == PadKind::Zero) continue;
                            iy = std::clamp(iy, 0, in_shape.h - 1);
                        }
                        for (int ox = 0; ox < d.out_w; ++ox) {
                            int ix = ox * spec.stride_w - spec.pad + dx;
                            if (ix < 0 || ix >= in_shape.w) {
                                if (spec.pad_kind == PadKind::Zero) continue;
                                ix = std::clamp(ix, 0, in_shape.w - 1);
                            }
                            grad_in.at(item, ci, iy, ix) += row[oy * d.out_w + ox];
                        }
                    }
                }
            }
        }
    });
}

}  // namespace

void gemm(const float* a, const float* b, float* c, int m, int k, int n) {
    std::memset(c, 0, static_cast<std::size_t>(m) * n * sizeof(float));
    parallel_for(0, m, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            float* ci = c + i * n;
            const float* ai = a + i * k;
            for (int kk = 0; kk < k; ++kk) {
                float av = ai[kk];
                if (av == 0.0f) continue;
                const float* bk = b + std::int64_t(kk) * n;
                for (int j = 0; j < n; ++j) {
                    ci[j] += av * bk[j];
                }
            }
        }
    });
}

void gemm_nt_accum(const float* a, const float* b, float* c, int m, int n, int k) {
    parallel_for(0, m, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const float* ai = a + i * n;
            float* ci = c + i * k;
            for (int kk = 0; kk < k; ++kk) {
                const float* bk = b + std::int64_t(kk) * n;
                float acc = 0.0f;
                for (int j = 0; j < n; ++j) {
                    acc += ai[j] * bk[j];
                }
                ci[kk] += acc;
            }
        }
    });
}

void gemm_tn(const float* a, const float* b, float* c, int m, int k, int n) {
    std::memset(c, 0, static_cast<std::size_t>(k) * n * sizeof(float));
    parallel_for(0, k, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t kk = lo; kk < hi; ++kk) {
            float* ck = c + kk * n;
            for (int i = 0; i < m; ++i) {
                float av = a[std::int64_t(i) * k + kk];
                if (av == 0.0f) continue;
                const float* bi = b + std::int64_t(i) * n;
                for (int j = 0; j < n; ++j) {
                    ck[j] += av * bi[j];
                }
            }
        }
    });
}

Tensor conv2d_forward(const Tensor& in, const Tensor& w, const Tensor& b,
                      const Conv2dSpec& spec) {
    ConvDims d = validate(in, w, b, spec);
    Tensor out({in.n(), w.n(), d.out_h, d.out_w});
    const int cols = d.out_h * d.out_w;
    std::vector<float> col(static_cast<std::size_t>(d.patch) * cols);
    for (int item = 0; item < in.n(); ++item) {
        im2col(in, item, spec, d, col.data());
        float* dst = out.data() + out.index(item, 0, 0, 0);
        gemm(w.data(), col.data(), dst, w.n(), d.patch, cols);
        for (int oc = 0; oc < w.n(); ++oc) {
            float bias = b.at(0, oc, 0, 0);
            float* plane = dst + std::int64_t(oc) * cols;
            for (int j = 0; j < cols; ++j) plane[j] += bias;
        }
    }
    return out;
}

void conv2d_backward(const Tensor& in, const Tensor& w, const Conv2dSpec& spec,
                     const Tensor& grad_out, Tensor* grad_in, Tensor* grad_w, Tensor* grad_b) {
    Tensor dummy_bias({1, w.n(), 1, 1});
    ConvDims d = validate(in, w, dummy_bias, spec);
    const int cols = d.out_h * d.out_w;

    if (grad_b) {
        for (int item = 0; item < in.n(); ++item) {
            for (int oc = 0; oc < w.n(); ++oc) {
                const float* plane = grad_out.data() + grad_out.index(item, oc, 0, 0);
                float acc = 0.0f;
                for (int j = 0; j < cols; ++j) acc += plane[j];
                grad_b->at(0, oc, 0, 0) += acc;
            }
        }
    }

    std::vector<float> col;
    if (grad_w || grad_in) {
        col.resize(static_cast<std::size_t>(d.patch) * cols);
    }
    std::vector<float> col_grad;
    if (grad_in) {
        col_grad.resize(static_cast<std::size_t>(d.patch) * cols);
    }

    for (int item = 0; item < in.n(); ++item) {
        const float* gout = grad_out.data() + grad_out.index(item, 0, 0, 0);
        if (grad_w) {
            im2col(in, item, spec, d, col.data());
            gemm_nt_accum(gout, col.data(), grad_w->data(), w.n(), cols, d.patch);
        }
        if (grad_in) {
            gemm_tn(w.data(), gout, col_grad.data(), w.n(), d.patch, cols);
            col2im_accum(col_grad.data(), in.shape(), item, spec, d, *grad_in);
        }
    }
}

}  // namespace fcit::detail
