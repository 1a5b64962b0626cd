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

#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "envanim/tensor.hpp"

namespace envanim::ag {

// Define-by-run reverse-mode tape. A Graph is confined to one thread; the
// creation order of nodes is the topological order used by backward(). All
// gradients are exact analytic expressions of the forward ops, which is what
// the finite-difference suites verify.

struct Node {
    Tensor value;
    Tensor grad;  // allocated on demand during backward
    bool needs_grad = false;
    int param_id = -1;
    std::vector<Node*> parents;
    std::function<void(Node&)> backward;
};

struct Var {
    Node* node = nullptr;
    const Tensor& val() const { return node->value; }
    const std::vector<int64_t>& shape() const { return node->value.shape(); }
    bool defined() const { return node != nullptr; }
};

class Graph {
public:
    explicit Graph(bool recording = true) : recording_(recording) {}

    /// Constant input; gradients do not flow into it.
    Var constant(Tensor value);
    /// Parameter leaf. Repeated calls with the same id alias one node so the
    /// gradient accumulates across uses.
    Var leaf(const Tensor& value, int param_id);
    /// Internal node; `bw` accumulates into the parents' grads.
    Var make(Tensor value, std::vector<Node*> parents, std::function<void(Node&)> bw);

    /// Reverse sweep from a scalar loss. Leaf gradients are then available
    /// through grad_of().
    void backward(Var loss);
    const Tensor* grad_of(int param_id) const;

    bool recording() const { return recording_; }
    size_t node_count() const { return tape_.size(); }

private:
    std::vector<std::unique_ptr<Node>> tape_;
    std::unordered_map<int, Node*> leaf_nodes_;
    bool recording_;
};

void accumulate(Tensor& dst, const Tensor& src);
void ensure_grad(Node& n);

// ---- elementwise ----
Var add(Graph& g, Var a, Var b);
Var sub(Graph& g, Var a, Var b);
Var mul(Graph& g, Var a, Var b);
Var scale(Graph& g, Var a, double s);
Var silu(Graph& g, Var a);
Var sigmoid(Graph& g, Var a);

// ---- shape ----
Var reshape(Graph& g, Var a, std::vector<int64_t> shape);
Var permute(Graph& g, Var a, std::vector<int> axes);
Var concat_ch(Graph& g, const std::vector<Var>& parts);           // along dim 1 of [N,C,H,W]
Var slice_ch(Graph& g, Var a, int64_t c0, int64_t c1);            // channels [c0, c1)
Var tile_batch(Graph& g, Var a, int64_t times);                   // new leading dim
Var upsample_nearest2(Graph& g, Var a);                           // [N,C,H,W] -> [N,C,2H,2W]

// ---- linear algebra ----
Var matmul(Graph& g, Var a, Var b);                               // [M,K] @ [K,N]
Var bmm(Graph& g, Var a, Var b);                                  // [B,M,K] @ [B,K,N]
Var transpose_last2(Graph& g, Var a);                             // [B,M,N] -> [B,N,M]
Var softmax_last(Graph& g, Var a);

// ---- network primitives ----
Var linear(Graph& g, Var x, Var w, Var b);                        // [M,K] @ [K,N] + b
Var conv2d(Graph& g, Var x, Var w, Var b, int stride, int pad);   // w: [F,C,kh,kw]
Var conv_time3(Graph& g, Var x, Var w, Var b);                    // w: [F,C,3], same-pad over frames
Var group_norm(Graph& g, Var x, Var gamma, Var beta, int groups, double eps = 1e-5);
Var add_chan_bias(Graph& g, Var x, Var b);                        // b: [C] broadcast over N,H,W

// ---- reductions ----
Var mean_all(Graph& g, Var a);                                    // -> [1]
Var mse(Graph& g, Var a, Var b);                                  // -> [1]

}  // namespace envanim::ag
