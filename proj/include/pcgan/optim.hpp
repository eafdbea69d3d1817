#pragma once

#include <cstdint>
#include <vector>

#include "pcgan/layers.hpp"
#include "pcgan/tensor.hpp"

namespace pcgan {

struct AdamConfig {
    float lr = 1e-4f;
    float beta1 = 0.9f;
    float beta2 = 0.999f;
    float eps = 1e-8f;
};

/// One parameter's moment buffers.
struct AdamSlot {
    Tensor m;
    Tensor v;
};

/// Bias-corrected Adam update of a single tensor, step count t >= 1.
/// Throws on any shape mismatch between param, grad and moments.
void adam_update(Tensor& param, const Tensor& grad, AdamSlot& slot, std::int64_t t,
                 const AdamConfig& cfg);

/// Adam over a fixed parameter list. Gradients are read from each
/// parameter's tape node; the caller is responsible for zeroing them
/// between steps (zero_grad()).
class Adam {
public:
    Adam() = default;
    Adam(std::vector<NamedParam> params, AdamConfig cfg);

    void step();
    void zero_grad();
    std::int64_t step_count() const { return step_; }
    const std::vector<NamedParam>& params() const { return params_; }

private:
    std::vector<NamedParam> params_;
    std::vector<AdamSlot> slots_;
    AdamConfig cfg_;
    std::int64_t step_ = 0;
};

}  // namespace pcgan
