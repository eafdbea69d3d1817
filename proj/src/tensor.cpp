#include "pcgan/tensor.hpp"

#include <cblas.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pcgan {

namespace {

std::int64_t checked_numel(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (std::int64_t d : shape) {
        if (d <= 0) {
            throw std::invalid_argument("tensor dims must be positive, got shape " +
                                        shape_to_string(shape));
        }
        n *= d;
    }
    return n;
}

struct BlasInit {
    BlasInit() { openblas_set_num_threads(1); }
};

void ensure_single_threaded_blas() {
    static BlasInit init;
    (void)init;
}

}  // namespace

std::string shape_to_string(const std::vector<std::int64_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

Tensor::Tensor(std::vector<std::int64_t> shape)
    : shape_(std::move(shape)),
      data_(static_cast<std::size_t>(checked_numel(shape_)), 0.0f) {}

Tensor::Tensor(std::vector<std::int64_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_numel(shape_) != static_cast<std::int64_t>(data_.size())) {
        throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                    " does not match shape " + shape_to_string(shape_));
    }
}

Tensor Tensor::scalar(float v) { return Tensor({1}, {v}); }

Tensor Tensor::zeros(std::vector<std::int64_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<std::int64_t> shape, float v) {
    Tensor t(std::move(shape));
    t.fill(v);
    return t;
}

float Tensor::item() const {
    if (numel() != 1) {
        throw std::invalid_argument("item() requires a single-element tensor, got shape " +
                                    shape_str());
    }
    return data_[0];
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

bool Tensor::all_finite() const {
    for (float v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::require_finite(const std::string& what) const {
    if (!all_finite()) {
        throw std::runtime_error("non-finite values in " + what);
    }
}

void Tensor::fill(float v) {
    for (auto& x : data_) x = v;
}

void gemm(bool trans_a, bool trans_b, std::int64_t m, std::int64_t n,
          std::int64_t k, float alpha, const float* a, const float* b,
          float beta, float* c) {
    ensure_single_threaded_blas();
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, static_cast<blasint>(m),
                static_cast<blasint>(n), static_cast<blasint>(k), alpha, a,
                static_cast<blasint>(trans_a ? m : k), b,
                static_cast<blasint>(trans_b ? k : n), beta, c,
                static_cast<blasint>(n));
}

Tensor matmul_value(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
        throw std::invalid_argument("matmul dimension mismatch: " + a.shape_str() + " x " +
                                    b.shape_str());
    }
    Tensor c({a.dim(0), b.dim(1)});
    gemm(false, false, a.dim(0), b.dim(1), a.dim(1), 1.0f, a.data(), b.data(), 0.0f,
         c.data());
    return c;
}

}  // namespace pcgan
