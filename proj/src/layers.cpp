#include "pcgan/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgan {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::tanh: return "tanh";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    throw std::invalid_argument("unknown activation: " + name);
}

DenseLayer::DenseLayer(std::int64_t in, std::int64_t out, Activation act, Rng& rng)
    : in_(in), out_(out), act_(act) {
    const float stddev = act == Activation::relu
                             ? std::sqrt(2.0f / static_cast<float>(in))
                             : std::sqrt(2.0f / static_cast<float>(in + out));
    Tensor w({in, out});
    for (std::int64_t i = 0; i < w.numel(); ++i) w[i] = stddev * rng.normal();
    w_ = Var::param(std::move(w));
    b_ = Var::param(Tensor::zeros({out}));
}

Var DenseLayer::forward(const Var& x) const {
    Var z = add_rows(matmul(x, w_), b_);
    switch (act_) {
        case Activation::identity: return z;
        case Activation::relu: return relu(z);
        case Activation::sigmoid: return sigmoid(z);
        case Activation::tanh: return tanh_act(z);
    }
    return z;
}

void DenseLayer::collect(const std::string& prefix, std::vector<NamedParam>& out) {
    out.push_back({prefix + ".weight", w_});
    out.push_back({prefix + ".bias", b_});
}

BatchNorm1d::BatchNorm1d(std::int64_t features) : features_(features) {
    gamma_ = Var::param(Tensor::full({features}, 1.0f));
    beta_ = Var::param(Tensor::zeros({features}));
    running_mean_ = Tensor::zeros({features});
    running_var_ = Tensor::full({features}, 1.0f);
}

Var BatchNorm1d::forward(const Var& x, bool training) {
    const Tensor& xv = x.value();
    if (xv.rank() != 2 || xv.dim(1) != features_) {
        throw std::invalid_argument("batchnorm expects [B," + std::to_string(features_) +
                                    "], got " + xv.shape_str());
    }
    const std::int64_t rows = xv.dim(0), cols = xv.dim(1);

    if (!training) {
        Tensor out({rows, cols});
        const float* g = gamma_.value().data();
        const float* b = beta_.value().data();
        for (std::int64_t c = 0; c < cols; ++c) {
            const float inv = 1.0f / std::sqrt(running_var_[c] + eps_);
            const float sc = g[c] * inv;
            const float sh = b[c] - running_mean_[c] * sc;
            for (std::int64_t r = 0; r < rows; ++r) out.at(r, c) = xv.at(r, c) * sc + sh;
        }
        return make_op(std::move(out), {x, gamma_, beta_}, "batchnorm_eval",
                       [mean = running_mean_, var = running_var_, eps = eps_](Node& n) {
                           Node& px = *n.parents[0];
                           Node& pg = *n.parents[1];
                           Node& pb = *n.parents[2];
                           const std::int64_t rows = n.value.dim(0);
                           const std::int64_t cols = n.value.dim(1);
                           const float* g = pg.value.data();
                           if (px.requires_grad) px.ensure_grad();
                           if (pg.requires_grad) pg.ensure_grad();
                           if (pb.requires_grad) pb.ensure_grad();
                           for (std::int64_t c = 0; c < cols; ++c) {
                               const float inv = 1.0f / std::sqrt(var[c] + eps);
                               for (std::int64_t r = 0; r < rows; ++r) {
                                   const float go = n.grad.at(r, c);
                                   const float xhat =
                                       (px.value.at(r, c) - mean[c]) * inv;
                                   if (px.requires_grad)
                                       px.grad.at(r, c) += go * g[c] * inv;
                                   if (pg.requires_grad) pg.grad[c] += go * xhat;
                                   if (pb.requires_grad) pb.grad[c] += go;
                               }
                           }
                       });
    }

    if (rows < 2) {
        throw std::invalid_argument("batchnorm training mode needs batch size >= 2, got " +
                                    std::to_string(rows));
    }

    Tensor mean({cols}), inv_std({cols}), xhat({rows, cols});
    for (std::int64_t c = 0; c < cols; ++c) {
        double mu = 0.0;
        for (std::int64_t r = 0; r < rows; ++r) mu += xv.at(r, c);
        mu /= static_cast<double>(rows);
        double var = 0.0;
        for (std::int64_t r = 0; r < rows; ++r) {
            const double d = xv.at(r, c) - mu;
            var += d * d;
        }
        var /= static_cast<double>(rows);
        mean[c] = static_cast<float>(mu);
        inv_std[c] = static_cast<float>(1.0 / std::sqrt(var + eps_));

        const double unbiased = var * static_cast<double>(rows) /
                                static_cast<double>(rows - 1);
        running_mean_[c] = (1.0f - momentum_) * running_mean_[c] +
                           momentum_ * static_cast<float>(mu);
        running_var_[c] = (1.0f - momentum_) * running_var_[c] +
                          momentum_ * static_cast<float>(unbiased);
    }
    Tensor out({rows, cols});
    const float* g = gamma_.value().data();
    const float* b = beta_.value().data();
    for (std::int64_t c = 0; c < cols; ++c) {
        for (std::int64_t r = 0; r < rows; ++r) {
            const float xh = (xv.at(r, c) - mean[c]) * inv_std[c];
            xhat.at(r, c) = xh;
            out.at(r, c) = g[c] * xh + b[c];
        }
    }
    return make_op(
        std::move(out), {x, gamma_, beta_}, "batchnorm",
        [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& n) {
            Node& px = *n.parents[0];
            Node& pg = *n.parents[1];
            Node& pb = *n.parents[2];
            const std::int64_t rows = n.value.dim(0), cols = n.value.dim(1);
            const float* g = pg.value.data();
            if (pg.requires_grad) pg.ensure_grad();
            if (pb.requires_grad) pb.ensure_grad();
            if (px.requires_grad) px.ensure_grad();
            for (std::int64_t c = 0; c < cols; ++c) {
                double sum_go = 0.0, sum_go_xhat = 0.0;
                for (std::int64_t r = 0; r < rows; ++r) {
                    const float go = n.grad.at(r, c);
                    sum_go += go;
                    sum_go_xhat += go * xhat.at(r, c);
                }
                if (pg.requires_grad) pg.grad[c] += static_cast<float>(sum_go_xhat);
                if (pb.requires_grad) pb.grad[c] += static_cast<float>(sum_go);
                if (px.requires_grad) {
                    const float inv_n = 1.0f / static_cast<float>(rows);
                    for (std::int64_t r = 0; r < rows; ++r) {
                        const float go = n.grad.at(r, c);
                        const float term =
                            go - inv_n * static_cast<float>(sum_go) -
                            xhat.at(r, c) * inv_n * static_cast<float>(sum_go_xhat);
                        px.grad.at(r, c) += g[c] * inv_std[c] * term;
                    }
                }
            }
        });
}

void BatchNorm1d::collect(const std::string& prefix, std::vector<NamedParam>& out) {
    out.push_back({prefix + ".gamma", gamma_});
    out.push_back({prefix + ".beta", beta_});
}

void BatchNorm1d::collect_state(const std::string& prefix, std::vector<NamedState>& out) {
    out.push_back({prefix + ".running_mean", &running_mean_});
    out.push_back({prefix + ".running_var", &running_var_});
}

}  // namespace pcgan
