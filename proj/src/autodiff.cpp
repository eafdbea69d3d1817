#include "pcgan/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace pcgan {

namespace {
constexpr float kBceEps = 1e-7f;
}

Var::Var(Tensor value, bool requires_grad) {
    node_ = std::make_shared<Node>();
    node_->value = std::move(value);
    node_->requires_grad = requires_grad;
}

const Tensor& Var::grad() const {
    node_->ensure_grad();
    return node_->grad;
}

void Var::zero_grad() {
    if (node_) {
        node_->ensure_grad();
        node_->grad.fill(0.0f);
    }
}

Var make_op(Tensor value, std::vector<Var> parents, const char* op,
            std::function<void(Node&)> backprop) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->op = op;
    bool needs = false;
    n->parents.reserve(parents.size());
    for (const auto& p : parents) {
        n->parents.push_back(p.node());
        needs = needs || p.node()->requires_grad;
    }
    n->requires_grad = needs;
    if (needs) n->backprop = std::move(backprop);
    return Var::from_node(std::move(n));
}

Var matmul(const Var& a, const Var& b) {
    Tensor out = matmul_value(a.value(), b.value());
    return make_op(std::move(out), {a, b}, "matmul", [](Node& n) {
        Node& pa = *n.parents[0];
        Node& pb = *n.parents[1];
        const std::int64_t m = pa.value.dim(0);
        const std::int64_t k = pa.value.dim(1);
        const std::int64_t c = pb.value.dim(1);
        if (pa.requires_grad) {
            pa.ensure_grad();
            // dA += dC * B^T
            gemm(false, true, m, k, c, 1.0f, n.grad.data(), pb.value.data(), 1.0f,
                 pa.grad.data());
        }
        if (pb.requires_grad) {
            pb.ensure_grad();
            // dB += A^T * dC
            gemm(true, false, k, c, m, 1.0f, pa.value.data(), n.grad.data(), 1.0f,
                 pb.grad.data());
        }
    });
}

namespace {

void check_same_shape(const Var& a, const Var& b, const char* op) {
    if (!a.value().same_shape(b.value())) {
        throw std::invalid_argument(std::string(op) + " shape mismatch: " +
                                    a.value().shape_str() + " vs " + b.value().shape_str());
    }
}

}  // namespace

Var add(const Var& a, const Var& b) {
    check_same_shape(a, b, "add");
    Tensor out = a.value();
    const float* bv = b.value().data();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] += bv[i];
    return make_op(std::move(out), {a, b}, "add", [](Node& n) {
        for (auto& p : n.parents) {
            if (!p->requires_grad) continue;
            p->ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i) p->grad[i] += n.grad[i];
        }
    });
}

Var sub(const Var& a, const Var& b) {
    check_same_shape(a, b, "sub");
    Tensor out = a.value();
    const float* bv = b.value().data();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] -= bv[i];
    return make_op(std::move(out), {a, b}, "sub", [](Node& n) {
        Node& pa = *n.parents[0];
        Node& pb = *n.parents[1];
        if (pa.requires_grad) {
            pa.ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i) pa.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
            pb.ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i) pb.grad[i] -= n.grad[i];
        }
    });
}

Var mul(const Var& a, const Var& b) {
    check_same_shape(a, b, "mul");
    Tensor out = a.value();
    const float* bv = b.value().data();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] *= bv[i];
    return make_op(std::move(out), {a, b}, "mul", [](Node& n) {
        Node& pa = *n.parents[0];
        Node& pb = *n.parents[1];
        if (pa.requires_grad) {
            pa.ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i)
                pa.grad[i] += n.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            pb.ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i)
                pb.grad[i] += n.grad[i] * pa.value[i];
        }
    });
}

Var scale(const Var& a, float c) {
    Tensor out = a.value();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] *= c;
    return make_op(std::move(out), {a}, "scale", [c](Node& n) {
        Node& pa = *n.parents[0];
        pa.ensure_grad();
        for (std::int64_t i = 0; i < n.grad.numel(); ++i) pa.grad[i] += c * n.grad[i];
    });
}

Var add_rows(const Var& x, const Var& bias) {
    if (x.value().rank() != 2 || bias.value().rank() != 1 ||
        x.value().dim(1) != bias.value().dim(0)) {
        throw std::invalid_argument("add_rows shape mismatch: " + x.value().shape_str() +
                                    " + " + bias.value().shape_str());
    }
    Tensor out = x.value();
    const std::int64_t rows = out.dim(0), cols = out.dim(1);
    const float* bv = bias.value().data();
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c) out.at(r, c) += bv[c];
    return make_op(std::move(out), {x, bias}, "add_rows", [](Node& n) {
        Node& px = *n.parents[0];
        Node& pb = *n.parents[1];
        const std::int64_t rows = n.value.dim(0), cols = n.value.dim(1);
        if (px.requires_grad) {
            px.ensure_grad();
            for (std::int64_t i = 0; i < n.grad.numel(); ++i) px.grad[i] += n.grad[i];
        }
        if (pb.requires_grad) {
            pb.ensure_grad();
            for (std::int64_t r = 0; r < rows; ++r)
                for (std::int64_t c = 0; c < cols; ++c) pb.grad[c] += n.grad.at(r, c);
        }
    });
}

Var relu(const Var& x) {
    Tensor out = x.value();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = std::max(0.0f, out[i]);
    return make_op(std::move(out), {x}, "relu", [](Node& n) {
        Node& p = *n.parents[0];
        p.ensure_grad();
        for (std::int64_t i = 0; i < n.grad.numel(); ++i)
            if (p.value[i] > 0.0f) p.grad[i] += n.grad[i];
    });
}

Var sigmoid(const Var& x) {
    Tensor out = x.value();
    for (std::int64_t i = 0; i < out.numel(); ++i) {
        const float v = out[i];
        if (v >= 0.0f) {
            out[i] = 1.0f / (1.0f + std::exp(-v));
        } else {
            const float e = std::exp(v);
            out[i] = e / (1.0f + e);
        }
    }
    return make_op(std::move(out), {x}, "sigmoid", [](Node& n) {
        Node& p = *n.parents[0];
        p.ensure_grad();
        for (std::int64_t i = 0; i < n.grad.numel(); ++i) {
            const float s = n.value[i];
            p.grad[i] += n.grad[i] * s * (1.0f - s);
        }
    });
}

Var tanh_act(const Var& x) {
    Tensor out = x.value();
    for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(out[i]);
    return make_op(std::move(out), {x}, "tanh", [](Node& n) {
        Node& p = *n.parents[0];
        p.ensure_grad();
        for (std::int64_t i = 0; i < n.grad.numel(); ++i) {
            const float t = n.value[i];
            p.grad[i] += n.grad[i] * (1.0f - t * t);
        }
    });
}

Var concat_cols(const Var& a, const Var& b) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (av.rank() != 2 || bv.rank() != 2 || av.dim(0) != bv.dim(0)) {
        throw std::invalid_argument("concat_cols shape mismatch: " + av.shape_str() +
                                    " | " + bv.shape_str());
    }
    const std::int64_t rows = av.dim(0), ca = av.dim(1), cb = bv.dim(1);
    Tensor out({rows, ca + cb});
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t c = 0; c < ca; ++c) out.at(r, c) = av.at(r, c);
        for (std::int64_t c = 0; c < cb; ++c) out.at(r, ca + c) = bv.at(r, c);
    }
    return make_op(std::move(out), {a, b}, "concat_cols", [ca, cb](Node& n) {
        Node& pa = *n.parents[0];
        Node& pb = *n.parents[1];
        const std::int64_t rows = n.value.dim(0);
        if (pa.requires_grad) {
            pa.ensure_grad();
            for (std::int64_t r = 0; r < rows; ++r)
                for (std::int64_t c = 0; c < ca; ++c) pa.grad.at(r, c) += n.grad.at(r, c);
        }
        if (pb.requires_grad) {
            pb.ensure_grad();
            for (std::int64_t r = 0; r < rows; ++r)
                for (std::int64_t c = 0; c < cb; ++c)
                    pb.grad.at(r, c) += n.grad.at(r, ca + c);
        }
    });
}

Var sum_all(const Var& x) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < x.value().numel(); ++i) acc += x.value()[i];
    return make_op(Tensor::scalar(static_cast<float>(acc)), {x}, "sum", [](Node& n) {
        Node& p = *n.parents[0];
        p.ensure_grad();
        const float g = n.grad[0];
        for (std::int64_t i = 0; i < p.grad.numel(); ++i) p.grad[i] += g;
    });
}

Var mean_all(const Var& x) {
    const std::int64_t n_el = x.value().numel();
    double acc = 0.0;
    for (std::int64_t i = 0; i < n_el; ++i) acc += x.value()[i];
    return make_op(Tensor::scalar(static_cast<float>(acc / static_cast<double>(n_el))),
                   {x}, "mean", [n_el](Node& n) {
                       Node& p = *n.parents[0];
                       p.ensure_grad();
                       const float g = n.grad[0] / static_cast<float>(n_el);
                       for (std::int64_t i = 0; i < p.grad.numel(); ++i) p.grad[i] += g;
                   });
}

Var bce_loss(const Var& p, const Tensor& target) {
    const Tensor& pv = p.value();
    if (!pv.same_shape(target)) {
        throw std::invalid_argument("bce_loss shape mismatch: " + pv.shape_str() + " vs " +
                                    shape_to_string(target.shape()));
    }
    for (std::int64_t i = 0; i < target.numel(); ++i) {
        if (target[i] != 0.0f && target[i] != 1.0f) {
            throw std::invalid_argument("bce_loss target must be 0 or 1, got " +
                                        std::to_string(target[i]));
        }
    }
    const std::int64_t n_el = pv.numel();
    double acc = 0.0;
    for (std::int64_t i = 0; i < n_el; ++i) {
        const float ph = std::clamp(pv[i], kBceEps, 1.0f - kBceEps);
        acc += target[i] == 1.0f ? -std::log(static_cast<double>(ph))
                                 : -std::log(1.0 - static_cast<double>(ph));
    }
    Tensor t = target;
    return make_op(Tensor::scalar(static_cast<float>(acc / static_cast<double>(n_el))),
                   {p}, "bce", [t = std::move(t), n_el](Node& n) {
                       Node& pp = *n.parents[0];
                       pp.ensure_grad();
                       const float g = n.grad[0] / static_cast<float>(n_el);
                       for (std::int64_t i = 0; i < n_el; ++i) {
                           const float raw = pp.value[i];
                           if (raw <= kBceEps || raw >= 1.0f - kBceEps) continue;
                           const float d = t[i] == 1.0f ? -1.0f / raw : 1.0f / (1.0f - raw);
                           pp.grad[i] += g * d;
                       }
                   });
}

Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels) {
    const Tensor& lv = logits.value();
    if (lv.rank() != 2 || lv.dim(0) != static_cast<std::int64_t>(labels.size())) {
        throw std::invalid_argument("softmax_cross_entropy: logits " + lv.shape_str() +
                                    " vs " + std::to_string(labels.size()) + " labels");
    }
    const std::int64_t rows = lv.dim(0), cols = lv.dim(1);
    Tensor probs({rows, cols});
    double loss = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
        const int lab = labels[static_cast<std::size_t>(r)];
        if (lab < 0 || lab >= cols) {
            throw std::invalid_argument("softmax_cross_entropy label out of range: " +
                                        std::to_string(lab));
        }
        float mx = lv.at(r, 0);
        for (std::int64_t c = 1; c < cols; ++c) mx = std::max(mx, lv.at(r, c));
        double denom = 0.0;
        for (std::int64_t c = 0; c < cols; ++c)
            denom += std::exp(static_cast<double>(lv.at(r, c) - mx));
        const double log_denom = std::log(denom);
        for (std::int64_t c = 0; c < cols; ++c)
            probs.at(r, c) = static_cast<float>(
                std::exp(static_cast<double>(lv.at(r, c) - mx)) / denom);
        loss += log_denom - static_cast<double>(lv.at(r, lab) - mx);
    }
    auto labs = labels;
    return make_op(Tensor::scalar(static_cast<float>(loss / static_cast<double>(rows))),
                   {logits}, "softmax_ce",
                   [probs = std::move(probs), labs = std::move(labs)](Node& n) {
                       Node& p = *n.parents[0];
                       p.ensure_grad();
                       const std::int64_t rows = p.value.dim(0), cols = p.value.dim(1);
                       const float g = n.grad[0] / static_cast<float>(rows);
                       for (std::int64_t r = 0; r < rows; ++r) {
                           const int lab = labs[static_cast<std::size_t>(r)];
                           for (std::int64_t c = 0; c < cols; ++c) {
                               float d = probs.at(r, c);
                               if (c == lab) d -= 1.0f;
                               p.grad.at(r, c) += g * d;
                           }
                       }
                   });
}

Var detach(const Var& x) { return Var(x.value(), false); }

void backward(const Var& root) {
    if (!root.defined()) throw std::invalid_argument("backward on undefined Var");
    if (root.value().numel() != 1) {
        throw std::invalid_argument("backward requires a scalar root, got shape " +
                                    root.value().shape_str());
    }
    // Topological order by iterative DFS.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* n;
        std::size_t next;
    };
    std::vector<Frame> stack;
    Node* r = root.node().get();
    if (!r->requires_grad) return;
    stack.push_back({r, 0});
    visited.insert(r);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < f.n->parents.size()) {
            Node* p = f.n->parents[f.next++].get();
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(f.n);
            stack.pop_back();
        }
    }
    r->ensure_grad();
    r->grad[0] += 1.0f;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backprop) {
            n->ensure_grad();
            n->backprop(*n);
        }
    }
}

}  // namespace pcgan
