// Copyright 2026 The envanim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "envanim/autograd.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace envanim::ag {

namespace {

using EMat = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using CEMat =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// C[m,n] (+)= op(A) @ op(B)
void gemm(const double* a, const double* b, double* c, int64_t m, int64_t k, int64_t n,
          bool trans_a, bool trans_b, bool accumulate) {
    CEMat A(a, trans_a ? k : m, trans_a ? m : k);
    CEMat B(b, trans_b ? n : k, trans_b ? k : n);
    EMat C(c, m, n);
    if (trans_a && trans_b) {
        if (accumulate) C.noalias() += A.transpose() * B.transpose();
        else C.noalias() = A.transpose() * B.transpose();
    } else if (trans_a) {
        if (accumulate) C.noalias() += A.transpose() * B;
        else C.noalias() = A.transpose() * B;
    } else if (trans_b) {
        if (accumulate) C.noalias() += A * B.transpose();
        else C.noalias() = A * B.transpose();
    } else {
        if (accumulate) C.noalias() += A * B;
        else C.noalias() = A * B;
    }
}

void check_same_shape(const Var& a, const Var& b, const char* op) {
    if (!a.val().same_shape(b.val()))
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + a.val().shape_str() +
                                    " vs " + b.val().shape_str());
}

int64_t conv_out_dim(int64_t in, int k, int stride, int pad) {
    return (in + 2 * pad - k) / stride + 1;
}

// cols: [C*kh*kw, Ho*Wo]
void im2col(const double* x, int64_t c_in, int64_t h, int64_t w, int kh, int kw, int stride,
            int pad, double* cols) {
    const int64_t ho = conv_out_dim(h, kh, stride, pad), wo = conv_out_dim(w, kw, stride, pad);
    for (int64_t c = 0; c < c_in; ++c)
        for (int i = 0; i < kh; ++i)
            for (int j = 0; j < kw; ++j) {
                double* row = cols + ((c * kh + i) * kw + j) * ho * wo;
                for (int64_t oy = 0; oy < ho; ++oy) {
                    int64_t iy = oy * stride - pad + i;
                    for (int64_t ox = 0; ox < wo; ++ox) {
                        int64_t ix = ox * stride - pad + j;
                        row[oy * wo + ox] = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                                ? x[(c * h + iy) * w + ix]
                                                : 0.0;
                    }
                }
            }
}

void col2im_acc(const double* cols, int64_t c_in, int64_t h, int64_t w, int kh, int kw, int stride,
                int pad, double* x) {
    const int64_t ho = conv_out_dim(h, kh, stride, pad), wo = conv_out_dim(w, kw, stride, pad);
    for (int64_t c = 0; c < c_in; ++c)
        for (int i = 0; i < kh; ++i)
            for (int j = 0; j < kw; ++j) {
                const double* row = cols + ((c * kh + i) * kw + j) * ho * wo;
                for (int64_t oy = 0; oy < ho; ++oy) {
                    int64_t iy = oy * stride - pad + i;
                    if (iy < 0 || iy >= h) continue;
                    for (int64_t ox = 0; ox < wo; ++ox) {
                        int64_t ix = ox * stride - pad + j;
                        if (ix < 0 || ix >= w) continue;
                        x[(c * h + iy) * w + ix] += row[oy * wo + ox];
                    }
                }
            }
}

std::vector<int64_t> permuted_shape(const std::vector<int64_t>& shape, const std::vector<int>& axes) {
    std::vector<int64_t> out(shape.size());
    for (size_t i = 0; i < axes.size(); ++i) out[i] = shape[static_cast<size_t>(axes[i])];
    return out;
}

void permute_copy(const Tensor& src, const std::vector<int>& axes, Tensor& dst) {
    const int r = src.rank();
    std::vector<int64_t> in_stride(static_cast<size_t>(r), 1);
    for (int i = r - 2; i >= 0; --i)
        in_stride[static_cast<size_t>(i)] = in_stride[static_cast<size_t>(i) + 1] * src.dim(i + 1);
    std::vector<int64_t> out_stride_in(static_cast<size_t>(r));  // input stride per output axis
    for (int i = 0; i < r; ++i)
        out_stride_in[static_cast<size_t>(i)] = in_stride[static_cast<size_t>(axes[static_cast<size_t>(i)])];
    std::vector<int64_t> idx(static_cast<size_t>(r), 0);
    const int64_t total = src.size();
    for (int64_t o = 0; o < total; ++o) {
        int64_t src_off = 0;
        for (int i = 0; i < r; ++i) src_off += idx[static_cast<size_t>(i)] * out_stride_in[static_cast<size_t>(i)];
        dst[o] = src[src_off];
        for (int i = r - 1; i >= 0; --i) {
            if (++idx[static_cast<size_t>(i)] < dst.dim(i)) break;
            idx[static_cast<size_t>(i)] = 0;
        }
    }
}

}  // namespace

void accumulate(Tensor& dst, const Tensor& src) {
    for (int64_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

void ensure_grad(Node& n) {
    if (n.grad.empty() && n.value.size() > 0) n.grad = Tensor(n.value.shape());
}

Var Graph::constant(Tensor value) {
    auto node = std::make_unique<Node>();
    node->value = std::move(value);
    Node* p = node.get();
    tape_.push_back(std::move(node));
    return Var{p};
}

Var Graph::leaf(const Tensor& value, int param_id) {
    auto it = leaf_nodes_.find(param_id);
    if (it != leaf_nodes_.end()) return Var{it->second};
    auto node = std::make_unique<Node>();
    node->value = value;
    node->needs_grad = recording_;
    node->param_id = param_id;
    Node* p = node.get();
    leaf_nodes_[param_id] = p;
    tape_.push_back(std::move(node));
    return Var{p};
}

Var Graph::make(Tensor value, std::vector<Node*> parents, std::function<void(Node&)> bw) {
    auto node = std::make_unique<Node>();
    node->value = std::move(value);
    if (recording_) {
        for (Node* p : parents)
            if (p->needs_grad) {
                node->needs_grad = true;
                break;
            }
        if (node->needs_grad) {
            node->parents = std::move(parents);
            node->backward = std::move(bw);
        }
    }
    Node* p = node.get();
    tape_.push_back(std::move(node));
    return Var{p};
}

void Graph::backward(Var loss) {
    if (!recording_) throw std::logic_error("backward on a non-recording graph");
    if (loss.val().size() != 1) throw std::invalid_argument("backward: loss must be scalar");
    loss.node->grad = Tensor(loss.val().shape(), 1.0);
    for (auto it = tape_.rbegin(); it != tape_.rend(); ++it) {
        Node& n = **it;
        if (!n.needs_grad || n.grad.empty() || !n.backward) continue;
        for (Node* p : n.parents)
            if (p->needs_grad) ensure_grad(*p);
        n.backward(n);
        if (n.param_id < 0) n.grad = Tensor();  // free activation grads eagerly
    }
}

const Tensor* Graph::grad_of(int param_id) const {
    auto it = leaf_nodes_.find(param_id);
    if (it == leaf_nodes_.end() || it->second->grad.empty()) return nullptr;
    return &it->second->grad;
}

// ---------------------------------------------------------------- elementwise

Var add(Graph& g, Var a, Var b) {
    check_same_shape(a, b, "add");
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) out[i] += b.val()[i];
    return g.make(std::move(out), {a.node, b.node}, [a, b](Node& n) {
        if (a.node->needs_grad) accumulate(a.node->grad, n.grad);
        if (b.node->needs_grad) accumulate(b.node->grad, n.grad);
    });
}

Var sub(Graph& g, Var a, Var b) {
    check_same_shape(a, b, "sub");
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) out[i] -= b.val()[i];
    return g.make(std::move(out), {a.node, b.node}, [a, b](Node& n) {
        if (a.node->needs_grad) accumulate(a.node->grad, n.grad);
        if (b.node->needs_grad)
            for (int64_t i = 0; i < n.grad.size(); ++i) b.node->grad[i] -= n.grad[i];
    });
}

Var mul(Graph& g, Var a, Var b) {
    check_same_shape(a, b, "mul");
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) out[i] *= b.val()[i];
    return g.make(std::move(out), {a.node, b.node}, [a, b](Node& n) {
        if (a.node->needs_grad)
            for (int64_t i = 0; i < n.grad.size(); ++i) a.node->grad[i] += n.grad[i] * b.val()[i];
        if (b.node->needs_grad)
            for (int64_t i = 0; i < n.grad.size(); ++i) b.node->grad[i] += n.grad[i] * a.val()[i];
    });
}

Var scale(Graph& g, Var a, double s) {
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) out[i] *= s;
    return g.make(std::move(out), {a.node}, [a, s](Node& n) {
        for (int64_t i = 0; i < n.grad.size(); ++i) a.node->grad[i] += n.grad[i] * s;
    });
}

Var silu(Graph& g, Var a) {
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) {
        double s = 1.0 / (1.0 + std::exp(-out[i]));
        out[i] = out[i] * s;
    }
    return g.make(std::move(out), {a.node}, [a](Node& n) {
        for (int64_t i = 0; i < n.grad.size(); ++i) {
            double x = a.val()[i];
            double s = 1.0 / (1.0 + std::exp(-x));
            a.node->grad[i] += n.grad[i] * (s * (1.0 + x * (1.0 - s)));
        }
    });
}

Var sigmoid(Graph& g, Var a) {
    Tensor out = a.val();
    for (int64_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
    return g.make(std::move(out), {a.node}, [a](Node& n) {
        for (int64_t i = 0; i < n.grad.size(); ++i) {
            double y = n.value[i];
            a.node->grad[i] += n.grad[i] * y * (1.0 - y);
        }
    });
}

// ---------------------------------------------------------------------- shape

Var reshape(Graph& g, Var a, std::vector<int64_t> shape) {
    Tensor out = a.val().reshaped(shape);
    return g.make(std::move(out), {a.node}, [a](Node& n) {
        for (int64_t i = 0; i < n.grad.size(); ++i) a.node->grad[i] += n.grad[i];
    });
}

Var permute(Graph& g, Var a, std::vector<int> axes) {
    if (static_cast<int>(axes.size()) != a.val().rank())
        throw std::invalid_argument("permute: axes rank mismatch");
    Tensor out(permuted_shape(a.shape(), axes));
    permute_copy(a.val(), axes, out);
    return g.make(std::move(out), {a.node}, [a, axes](Node& n) {
        std::vector<int> inv(axes.size());
        for (size_t i = 0; i < axes.size(); ++i) inv[static_cast<size_t>(axes[i])] = static_cast<int>(i);
        Tensor gin(a.shape());
        permute_copy(n.grad, inv, gin);
        accumulate(a.node->grad, gin);
    });
}

Var concat_ch(Graph& g, const std::vector<Var>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat_ch: no inputs");
    const auto& s0 = parts[0].shape();
    int64_t c_total = 0;
    for (const auto& p : parts) {
        if (p.val().rank() != 4 || p.val().dim(0) != s0[0] || p.val().dim(2) != s0[2] ||
            p.val().dim(3) != s0[3])
            throw std::invalid_argument("concat_ch: incompatible shapes");
        c_total += p.val().dim(1);
    }
    const int64_t n = s0[0], h = s0[2], w = s0[3], hw = h * w;
    Tensor out({n, c_total, h, w});
    std::vector<Node*> parents;
    int64_t c_off = 0;
    for (const auto& p : parts) {
        const int64_t pc = p.val().dim(1);
        for (int64_t b = 0; b < n; ++b)
            std::copy_n(p.val().data() + b * pc * hw, pc * hw,
                        out.data() + (b * c_total + c_off) * hw);
        c_off += pc;
        parents.push_back(p.node);
    }
    auto parts_copy = parts;
    return g.make(std::move(out), std::move(parents), [parts_copy, n, c_total, hw](Node& nd) {
        int64_t off = 0;
        for (const auto& p : parts_copy) {
            const int64_t pc = p.val().dim(1);
            if (p.node->needs_grad)
                for (int64_t b = 0; b < n; ++b) {
                    const double* src = nd.grad.data() + (b * c_total + off) * hw;
                    double* dst = p.node->grad.data() + b * pc * hw;
                    for (int64_t i = 0; i < pc * hw; ++i) dst[i] += src[i];
                }
            off += pc;
        }
    });
}

Var slice_ch(Graph& g, Var a, int64_t c0, int64_t c1) {
    const auto& s = a.shape();
    if (a.val().rank() != 4 || c0 < 0 || c1 > s[1] || c0 >= c1)
        throw std::invalid_argument("slice_ch: bad channel range");
    const int64_t n = s[0], c = s[1], hw = s[2] * s[3], cs = c1 - c0;
    Tensor out({n, cs, s[2], s[3]});
    for (int64_t b = 0; b < n; ++b)
        std::copy_n(a.val().data() + (b * c + c0) * hw, cs * hw, out.data() + b * cs * hw);
    return g.make(std::move(out), {a.node}, [a, c0, cs, n, c, hw](Node& nd) {
        for (int64_t b = 0; b < n; ++b) {
            const double* src = nd.grad.data() + b * cs * hw;
            double* dst = a.node->grad.data() + (b * c + c0) * hw;
            for (int64_t i = 0; i < cs * hw; ++i) dst[i] += src[i];
        }
    });
}

Var tile_batch(Graph& g, Var a, int64_t times) {
    std::vector<int64_t> shape = a.shape();
    shape.insert(shape.begin(), times);
    Tensor out(shape);
    const int64_t sz = a.val().size();
    for (int64_t t = 0; t < times; ++t) std::copy_n(a.val().data(), sz, out.data() + t * sz);
    return g.make(std::move(out), {a.node}, [a, times, sz](Node& nd) {
        for (int64_t t = 0; t < times; ++t)
            for (int64_t i = 0; i < sz; ++i) a.node->grad[i] += nd.grad[t * sz + i];
    });
}

Var upsample_nearest2(Graph& g, Var a) {
    const auto& s = a.shape();
    if (a.val().rank() != 4) throw std::invalid_argument("upsample_nearest2: expected rank 4");
    const int64_t n = s[0], c = s[1], h = s[2], w = s[3];
    Tensor out({n, c, 2 * h, 2 * w});
    for (int64_t b = 0; b < n; ++b)
        for (int64_t ch = 0; ch < c; ++ch) {
            const double* src = a.val().data() + (b * c + ch) * h * w;
            double* dst = out.data() + (b * c + ch) * 4 * h * w;
            for (int64_t r = 0; r < h; ++r)
                for (int64_t cc = 0; cc < w; ++cc) {
                    double v = src[r * w + cc];
                    dst[(2 * r) * 2 * w + 2 * cc] = v;
                    dst[(2 * r) * 2 * w + 2 * cc + 1] = v;
                    dst[(2 * r + 1) * 2 * w + 2 * cc] = v;
                    dst[(2 * r + 1) * 2 * w + 2 * cc + 1] = v;
                }
        }
    return g.make(std::move(out), {a.node}, [a, n, c, h, w](Node& nd) {
        for (int64_t b = 0; b < n; ++b)
            for (int64_t ch = 0; ch < c; ++ch) {
                const double* src = nd.grad.data() + (b * c + ch) * 4 * h * w;
                double* dst = a.node->grad.data() + (b * c + ch) * h * w;
                for (int64_t r = 0; r < h; ++r)
                    for (int64_t cc = 0; cc < w; ++cc)
                        dst[r * w + cc] += src[(2 * r) * 2 * w + 2 * cc] +
                                           src[(2 * r) * 2 * w + 2 * cc + 1] +
                                           src[(2 * r + 1) * 2 * w + 2 * cc] +
                                           src[(2 * r + 1) * 2 * w + 2 * cc + 1];
            }
    });
}

// ------------------------------------------------------------- linear algebra

Var matmul(Graph& g, Var a, Var b) {
    if (a.val().rank() != 2 || b.val().rank() != 2 || a.val().dim(1) != b.val().dim(0))
        throw std::invalid_argument("matmul: bad shapes " + a.val().shape_str() + " @ " +
                                    b.val().shape_str());
    const int64_t m = a.val().dim(0), k = a.val().dim(1), n = b.val().dim(1);
    Tensor out({m, n});
    gemm(a.val().data(), b.val().data(), out.data(), m, k, n, false, false, false);
    return g.make(std::move(out), {a.node, b.node}, [a, b, m, k, n](Node& nd) {
        if (a.node->needs_grad)
            gemm(nd.grad.data(), b.val().data(), a.node->grad.data(), m, n, k, false, true, true);
        if (b.node->needs_grad)
            gemm(a.val().data(), nd.grad.data(), b.node->grad.data(), k, m, n, true, false, true);
    });
}

Var bmm(Graph& g, Var a, Var b) {
    if (a.val().rank() != 3 || b.val().rank() != 3 || a.val().dim(0) != b.val().dim(0) ||
        a.val().dim(2) != b.val().dim(1))
        throw std::invalid_argument("bmm: bad shapes " + a.val().shape_str() + " @ " +
                                    b.val().shape_str());
    const int64_t bt = a.val().dim(0), m = a.val().dim(1), k = a.val().dim(2), n = b.val().dim(2);
    Tensor out({bt, m, n});
    for (int64_t i = 0; i < bt; ++i)
        gemm(a.val().data() + i * m * k, b.val().data() + i * k * n, out.data() + i * m * n, m, k, n,
             false, false, false);
    return g.make(std::move(out), {a.node, b.node}, [a, b, bt, m, k, n](Node& nd) {
        for (int64_t i = 0; i < bt; ++i) {
            if (a.node->needs_grad)
                gemm(nd.grad.data() + i * m * n, b.val().data() + i * k * n,
                     a.node->grad.data() + i * m * k, m, n, k, false, true, true);
            if (b.node->needs_grad)
                gemm(a.val().data() + i * m * k, nd.grad.data() + i * m * n,
                     b.node->grad.data() + i * k * n, k, m, n, true, false, true);
        }
    });
}

Var transpose_last2(Graph& g, Var a) {
    if (a.val().rank() != 3) throw std::invalid_argument("transpose_last2: expected rank 3");
    return permute(g, a, {0, 2, 1});
}

Var softmax_last(Graph& g, Var a) {
    const int64_t cols = a.val().dim(a.val().rank() - 1);
    const int64_t rows = a.val().size() / cols;
    Tensor out = a.val();
    for (int64_t r = 0; r < rows; ++r) {
        double* p = out.data() + r * cols;
        double mx = p[0];
        for (int64_t i = 1; i < cols; ++i) mx = std::max(mx, p[i]);
        double sum = 0.0;
        for (int64_t i = 0; i < cols; ++i) {
            p[i] = std::exp(p[i] - mx);
            sum += p[i];
        }
        for (int64_t i = 0; i < cols; ++i) p[i] /= sum;
    }
    return g.make(std::move(out), {a.node}, [a, rows, cols](Node& nd) {
        for (int64_t r = 0; r < rows; ++r) {
            const double* y = nd.value.data() + r * cols;
            const double* gy = nd.grad.data() + r * cols;
            double dot = 0.0;
            for (int64_t i = 0; i < cols; ++i) dot += y[i] * gy[i];
            double* gx = a.node->grad.data() + r * cols;
            for (int64_t i = 0; i < cols; ++i) gx[i] += y[i] * (gy[i] - dot);
        }
    });
}

// --------------------------------------------------------- network primitives

Var linear(Graph& g, Var x, Var w, Var b) {
    if (x.val().rank() != 2 || w.val().rank() != 2 || x.val().dim(1) != w.val().dim(0))
        throw std::invalid_argument("linear: bad shapes " + x.val().shape_str() + " @ " +
                                    w.val().shape_str());
    const int64_t m = x.val().dim(0), k = x.val().dim(1), n = w.val().dim(1);
    if (b.defined() && (b.val().rank() != 1 || b.val().dim(0) != n))
        throw std::invalid_argument("linear: bad bias shape");
    Tensor out({m, n});
    gemm(x.val().data(), w.val().data(), out.data(), m, k, n, false, false, false);
    if (b.defined())
        for (int64_t r = 0; r < m; ++r)
            for (int64_t c = 0; c < n; ++c) out.at(r, c) += b.val()[c];
    std::vector<Node*> parents = {x.node, w.node};
    if (b.defined()) parents.push_back(b.node);
    return g.make(std::move(out), std::move(parents), [x, w, b, m, k, n](Node& nd) {
        if (x.node->needs_grad)
            gemm(nd.grad.data(), w.val().data(), x.node->grad.data(), m, n, k, false, true, true);
        if (w.node->needs_grad)
            gemm(x.val().data(), nd.grad.data(), w.node->grad.data(), k, m, n, true, false, true);
        if (b.defined() && b.node->needs_grad)
            for (int64_t r = 0; r < m; ++r)
                for (int64_t c = 0; c < n; ++c) b.node->grad[c] += nd.grad.at(r, c);
    });
}

Var conv2d(Graph& g, Var x, Var w, Var b, int stride, int pad) {
    if (x.val().rank() != 4 || w.val().rank() != 4 || x.val().dim(1) != w.val().dim(1))
        throw std::invalid_argument("conv2d: bad shapes " + x.val().shape_str() + " * " +
                                    w.val().shape_str());
    const int64_t n = x.val().dim(0), c_in = x.val().dim(1), h = x.val().dim(2), ww = x.val().dim(3);
    const int64_t f = w.val().dim(0);
    const int kh = static_cast<int>(w.val().dim(2)), kw = static_cast<int>(w.val().dim(3));
    const int64_t ho = conv_out_dim(h, kh, stride, pad), wo = conv_out_dim(ww, kw, stride, pad);
    if (ho < 1 || wo < 1) throw std::invalid_argument("conv2d: empty output");
    const int64_t krows = c_in * kh * kw, ohw = ho * wo;
    Tensor out({n, f, ho, wo});
    Tensor cols({krows, ohw});
    for (int64_t i = 0; i < n; ++i) {
        im2col(x.val().data() + i * c_in * h * ww, c_in, h, ww, kh, kw, stride, pad, cols.data());
        gemm(w.val().data(), cols.data(), out.data() + i * f * ohw, f, krows, ohw, false, false,
             false);
        if (b.defined()) {
            double* y = out.data() + i * f * ohw;
            for (int64_t ch = 0; ch < f; ++ch)
                for (int64_t p = 0; p < ohw; ++p) y[ch * ohw + p] += b.val()[ch];
        }
    }
    std::vector<Node*> parents = {x.node, w.node};
    if (b.defined()) parents.push_back(b.node);
    // The im2col buffer is recomputed in backward instead of cached; it is the
    // largest intermediate and dominates graph memory otherwise.
    return g.make(std::move(out), std::move(parents),
                  [x, w, b, n, c_in, h, ww, f, kh, kw, stride, pad, krows, ohw](Node& nd) {
                      Tensor cols({krows, ohw}), dcols({krows, ohw});
                      for (int64_t i = 0; i < n; ++i) {
                          const double* dy = nd.grad.data() + i * f * ohw;
                          if (w.node->needs_grad || x.node->needs_grad)
                              im2col(x.val().data() + i * c_in * h * ww, c_in, h, ww, kh, kw, stride,
                                     pad, cols.data());
                          if (w.node->needs_grad)
                              gemm(dy, cols.data(), w.node->grad.data(), f, ohw, krows, false, true,
                                   true);
                          if (x.node->needs_grad) {
                              gemm(w.val().data(), dy, dcols.data(), krows, f, ohw, true, false,
                                   false);
                              col2im_acc(dcols.data(), c_in, h, ww, kh, kw, stride, pad,
                                         x.node->grad.data() + i * c_in * h * ww);
                          }
                          if (b.defined() && b.node->needs_grad)
                              for (int64_t ch = 0; ch < f; ++ch)
                                  for (int64_t p = 0; p < ohw; ++p)
                                      b.node->grad[ch] += dy[ch * ohw + p];
                      }
                  });
}

Var conv_time3(Graph& g, Var x, Var w, Var b) {
    if (x.val().rank() != 4 || w.val().rank() != 3 || w.val().dim(2) != 3 ||
        x.val().dim(1) != w.val().dim(1))
        throw std::invalid_argument("conv_time3: bad shapes");
    const int64_t n = x.val().dim(0), c_in = x.val().dim(1), hw = x.val().dim(2) * x.val().dim(3);
    const int64_t f = w.val().dim(0);
    Tensor out({n, f, x.val().dim(2), x.val().dim(3)});
    // Weight slice per time offset dt in {-1,0,+1}: w[:,:,dt+1] as [F,C].
    Tensor wslice({3, f, c_in});
    for (int64_t o = 0; o < f; ++o)
        for (int64_t c = 0; c < c_in; ++c)
            for (int64_t dt = 0; dt < 3; ++dt)
                wslice.at(dt, o, c) = w.val().at(o, c, dt);
    for (int64_t t = 0; t < n; ++t) {
        double* y = out.data() + t * f * hw;
        bool first = true;
        for (int64_t dt = 0; dt < 3; ++dt) {
            int64_t src = t + dt - 1;
            if (src < 0 || src >= n) continue;
            gemm(wslice.data() + dt * f * c_in, x.val().data() + src * c_in * hw, y, f, c_in, hw,
                 false, false, !first);
            first = false;
        }
        if (first) std::fill(y, y + f * hw, 0.0);
        if (b.defined())
            for (int64_t ch = 0; ch < f; ++ch)
                for (int64_t p = 0; p < hw; ++p) y[ch * hw + p] += b.val()[ch];
    }
    std::vector<Node*> parents = {x.node, w.node};
    if (b.defined()) parents.push_back(b.node);
    return g.make(std::move(out), std::move(parents),
                  [x, w, b, n, c_in, hw, f, wslice](Node& nd) {
                      for (int64_t t = 0; t < n; ++t) {
                          const double* dy = nd.grad.data() + t * f * hw;
                          for (int64_t dt = 0; dt < 3; ++dt) {
                              int64_t src = t + dt - 1;
                              if (src < 0 || src >= n) continue;
                              if (x.node->needs_grad)
                                  gemm(wslice.data() + dt * f * c_in, dy,
                                       x.node->grad.data() + src * c_in * hw, c_in, f, hw, true,
                                       false, true);
                              if (w.node->needs_grad) {
                                  // dW_dt += dy @ x[src]^T, scattered back to [F,C,3].
                                  Tensor dws({f, c_in});
                                  gemm(dy, x.val().data() + src * c_in * hw, dws.data(), f, hw,
                                       c_in, false, true, false);
                                  for (int64_t o = 0; o < f; ++o)
                                      for (int64_t c = 0; c < c_in; ++c)
                                          w.node->grad[(o * c_in + c) * 3 + dt] += dws.at(o, c);
                              }
                          }
                          if (b.defined() && b.node->needs_grad)
                              for (int64_t ch = 0; ch < f; ++ch)
                                  for (int64_t p = 0; p < hw; ++p)
                                      b.node->grad[ch] += dy[ch * hw + p];
                      }
                  });
}

Var group_norm(Graph& g, Var x, Var gamma, Var beta, int groups, double eps) {
    if (x.val().rank() != 4) throw std::invalid_argument("group_norm: expected [N,C,H,W]");
    const int64_t n = x.val().dim(0), c = x.val().dim(1), hw = x.val().dim(2) * x.val().dim(3);
    if (c % groups != 0) throw std::invalid_argument("group_norm: channels not divisible by groups");
    const int64_t cg = c / groups, m = cg * hw;
    Tensor out(x.val().shape());
    Tensor mean({n, groups}), rstd({n, groups});
    for (int64_t b = 0; b < n; ++b)
        for (int64_t gr = 0; gr < groups; ++gr) {
            const double* src = x.val().data() + (b * c + gr * cg) * hw;
            double mu = 0.0;
            for (int64_t i = 0; i < m; ++i) mu += src[i];
            mu /= static_cast<double>(m);
            double var = 0.0;
            for (int64_t i = 0; i < m; ++i) {
                double d = src[i] - mu;
                var += d * d;
            }
            var /= static_cast<double>(m);
            double r = 1.0 / std::sqrt(var + eps);
            mean.at(b, gr) = mu;
            rstd.at(b, gr) = r;
            double* dst = out.data() + (b * c + gr * cg) * hw;
            for (int64_t ch = 0; ch < cg; ++ch) {
                double ga = gamma.val()[gr * cg + ch], be = beta.val()[gr * cg + ch];
                for (int64_t i = 0; i < hw; ++i)
                    dst[ch * hw + i] = (src[ch * hw + i] - mu) * r * ga + be;
            }
        }
    return g.make(std::move(out), {x.node, gamma.node, beta.node},
                  [x, gamma, beta, n, c, hw, groups, cg, m, mean, rstd](Node& nd) {
                      for (int64_t b = 0; b < n; ++b)
                          for (int64_t gr = 0; gr < groups; ++gr) {
                              const double* src = x.val().data() + (b * c + gr * cg) * hw;
                              const double* gy = nd.grad.data() + (b * c + gr * cg) * hw;
                              const double mu = mean.at(b, gr), r = rstd.at(b, gr);
                              // Accumulate the two reduction terms of the
                              // normalization backward.
                              double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
                              for (int64_t ch = 0; ch < cg; ++ch) {
                                  double ga = gamma.val()[gr * cg + ch];
                                  for (int64_t i = 0; i < hw; ++i) {
                                      double xhat = (src[ch * hw + i] - mu) * r;
                                      double dxhat = gy[ch * hw + i] * ga;
                                      sum_dxhat += dxhat;
                                      sum_dxhat_xhat += dxhat * xhat;
                                  }
                              }
                              const double inv_m = 1.0 / static_cast<double>(m);
                              for (int64_t ch = 0; ch < cg; ++ch) {
                                  double ga = gamma.val()[gr * cg + ch];
                                  double* gx = x.node->needs_grad
                                                   ? x.node->grad.data() + (b * c + gr * cg) * hw
                                                   : nullptr;
                                  for (int64_t i = 0; i < hw; ++i) {
                                      double xhat = (src[ch * hw + i] - mu) * r;
                                      double dxhat = gy[ch * hw + i] * ga;
                                      if (gx)
                                          gx[ch * hw + i] +=
                                              r * (dxhat - inv_m * sum_dxhat -
                                                   xhat * inv_m * sum_dxhat_xhat);
                                      if (gamma.node->needs_grad)
                                          gamma.node->grad[gr * cg + ch] += gy[ch * hw + i] * xhat;
                                      if (beta.node->needs_grad)
                                          beta.node->grad[gr * cg + ch] += gy[ch * hw + i];
                                  }
                              }
                          }
                  });
}

Var add_chan_bias(Graph& g, Var x, Var b) {
    if (x.val().rank() != 4 || b.val().rank() != 1 || b.val().dim(0) != x.val().dim(1))
        throw std::invalid_argument("add_chan_bias: bad shapes");
    const int64_t n = x.val().dim(0), c = x.val().dim(1), hw = x.val().dim(2) * x.val().dim(3);
    Tensor out = x.val();
    for (int64_t i = 0; i < n; ++i)
        for (int64_t ch = 0; ch < c; ++ch) {
            double* p = out.data() + (i * c + ch) * hw;
            for (int64_t k = 0; k < hw; ++k) p[k] += b.val()[ch];
        }
    return g.make(std::move(out), {x.node, b.node}, [x, b, n, c, hw](Node& nd) {
        if (x.node->needs_grad) accumulate(x.node->grad, nd.grad);
        if (b.node->needs_grad)
            for (int64_t i = 0; i < n; ++i)
                for (int64_t ch = 0; ch < c; ++ch) {
                    const double* p = nd.grad.data() + (i * c + ch) * hw;
                    for (int64_t k = 0; k < hw; ++k) b.node->grad[ch] += p[k];
                }
    });
}

// ----------------------------------------------------------------- reductions

Var mean_all(Graph& g, Var a) {
    Tensor out({1});
    double sum = 0.0;
    for (int64_t i = 0; i < a.val().size(); ++i) sum += a.val()[i];
    out[0] = sum / static_cast<double>(a.val().size());
    const double inv = 1.0 / static_cast<double>(a.val().size());
    return g.make(std::move(out), {a.node}, [a, inv](Node& nd) {
        for (int64_t i = 0; i < a.node->grad.size(); ++i) a.node->grad[i] += nd.grad[0] * inv;
    });
}

Var mse(Graph& g, Var a, Var b) {
    Var d = sub(g, a, b);
    return mean_all(g, mul(g, d, d));
}

}  // namespace envanim::ag
