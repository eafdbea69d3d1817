#include "pcgan/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgan {

void adam_update(Tensor& param, const Tensor& grad, AdamSlot& slot, std::int64_t t,
                 const AdamConfig& cfg) {
    if (!param.same_shape(grad) || !param.same_shape(slot.m) ||
        !param.same_shape(slot.v)) {
        throw std::invalid_argument("adam_update shape mismatch: param " +
                                    param.shape_str() + ", grad " +
                                    shape_to_string(grad.shape()));
    }
    const float bc1 = 1.0f - std::pow(cfg.beta1, static_cast<float>(t));
    const float bc2 = 1.0f - std::pow(cfg.beta2, static_cast<float>(t));
    for (std::int64_t i = 0; i < param.numel(); ++i) {
        const float g = grad[i];
        slot.m[i] = cfg.beta1 * slot.m[i] + (1.0f - cfg.beta1) * g;
        slot.v[i] = cfg.beta2 * slot.v[i] + (1.0f - cfg.beta2) * g * g;
        const float mhat = slot.m[i] / bc1;
        const float vhat = slot.v[i] / bc2;
        param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

Adam::Adam(std::vector<NamedParam> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
    slots_.reserve(params_.size());
    for (const auto& p : params_) {
        slots_.push_back({Tensor::zeros(p.var.value().shape()),
                          Tensor::zeros(p.var.value().shape())});
    }
}

void Adam::step() {
    ++step_;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        adam_update(params_[i].var.value(), params_[i].var.grad(), slots_[i], step_,
                    cfg_);
    }
}

void Adam::zero_grad() {
    for (auto& p : params_) p.var.zero_grad();
}

}  // namespace pcgan
