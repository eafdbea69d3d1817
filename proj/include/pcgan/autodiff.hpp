#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "pcgan/tensor.hpp"

namespace pcgan {

/// One record of the reverse-mode tape: an operation's result, the parents
/// it was computed from, and a closure that pushes this node's gradient
/// into them.
class Node {
public:
    Tensor value;
    Tensor grad;  // allocated on first use, same shape as value
    bool requires_grad = false;
    const char* op = "leaf";
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backprop;

    void ensure_grad() {
        if (grad.empty()) grad = Tensor::zeros(value.shape());
    }
};

/// Shared handle to a tape node. Copying a Var aliases the node, which is
/// what lets one F(y) feed both the generator and discriminator paths.
class Var {
public:
    Var() = default;
    explicit Var(Tensor value, bool requires_grad = false);

    /// Trainable leaf.
    static Var param(Tensor value) { return Var(std::move(value), true); }

    bool defined() const { return node_ != nullptr; }
    const Tensor& value() const { return node_->value; }
    Tensor& value() { return node_->value; }
    const Tensor& grad() const;
    bool requires_grad() const { return node_ && node_->requires_grad; }

    void zero_grad();

    std::shared_ptr<Node> node() const { return node_; }

    static Var from_node(std::shared_ptr<Node> n) {
        Var v;
        v.node_ = std::move(n);
        return v;
    }

private:
    std::shared_ptr<Node> node_;
};

/// Build an op node. `backprop` receives the finished node and must
/// accumulate into parent->grad (after parent->ensure_grad()).
Var make_op(Tensor value, std::vector<Var> parents, const char* op,
            std::function<void(Node&)> backprop);

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);        // same shape
Var sub(const Var& a, const Var& b);        // same shape
Var mul(const Var& a, const Var& b);        // Hadamard, same shape
Var scale(const Var& a, float c);
Var add_rows(const Var& x, const Var& bias);  // [B,n] + [n]
Var relu(const Var& x);
Var sigmoid(const Var& x);
Var tanh_act(const Var& x);
Var concat_cols(const Var& a, const Var& b);  // [B,n],[B,m] -> [B,n+m]
Var sum_all(const Var& x);
Var mean_all(const Var& x);

/// Mean binary cross-entropy of probabilities p against {0,1} targets.
/// p is clamped to [1e-7, 1-1e-7] before the logs. Targets outside {0,1}
/// raise std::invalid_argument.
Var bce_loss(const Var& p, const Tensor& target);

/// Mean softmax cross-entropy of logits [B,C] against integer labels.
Var softmax_cross_entropy(const Var& logits, const std::vector<int>& labels);

/// Cut the graph: a new leaf holding a copy of the value, no gradient flow.
Var detach(const Var& x);

/// Reverse sweep from a scalar root; accumulates into every reachable
/// grad-requiring node. Non-scalar roots raise std::invalid_argument.
void backward(const Var& root);

}  // namespace pcgan
