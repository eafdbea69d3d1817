#pragma once

#include <string>
#include <vector>

#include "pcgan/autodiff.hpp"
#include "pcgan/rng.hpp"
#include "pcgan/tensor.hpp"

namespace pcgan {

enum class Activation { identity, relu, sigmoid, tanh };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct NamedParam {
    std::string name;
    Var var;
};

/// Named non-trainable tensor (running statistics), addressed for
/// checkpointing by pointer into the owning layer.
struct NamedState {
    std::string name;
    Tensor* tensor;
};

/// Fully connected layer with a fused activation.
class DenseLayer {
public:
    DenseLayer() = default;
    /// He-normal init for relu, Glorot-normal otherwise, zero bias.
    DenseLayer(std::int64_t in, std::int64_t out, Activation act, Rng& rng);

    Var forward(const Var& x) const;

    std::int64_t in_features() const { return in_; }
    std::int64_t out_features() const { return out_; }
    Activation activation() const { return act_; }
    std::int64_t parameter_count() const { return in_ * out_ + out_; }

    Var& weights() { return w_; }
    Var& bias() { return b_; }
    const Var& weights() const { return w_; }
    const Var& bias() const { return b_; }

    void collect(const std::string& prefix, std::vector<NamedParam>& out);

private:
    std::int64_t in_ = 0, out_ = 0;
    Activation act_ = Activation::identity;
    Var w_, b_;
};

/// Batch normalization over the batch dimension of a [B, features] input.
/// Training mode normalizes by batch statistics and updates the running
/// estimates; inference mode uses the running estimates only.
class BatchNorm1d {
public:
    BatchNorm1d() = default;
    explicit BatchNorm1d(std::int64_t features);

    Var forward(const Var& x, bool training);

    std::int64_t features() const { return features_; }
    std::int64_t parameter_count() const { return 2 * features_; }

    void collect(const std::string& prefix, std::vector<NamedParam>& out);
    void collect_state(const std::string& prefix, std::vector<NamedState>& out);

    float epsilon() const { return eps_; }

private:
    std::int64_t features_ = 0;
    float eps_ = 1e-5f;
    float momentum_ = 0.1f;
    Var gamma_, beta_;
    Tensor running_mean_, running_var_;
};

}  // namespace pcgan
