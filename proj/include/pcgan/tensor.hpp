#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pcgan {

/// Dense row-major float32 array with shape metadata. Values are plain
/// data; ownership is by value, copies are deep.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::int64_t> shape);
    Tensor(std::vector<std::int64_t> shape, std::vector<float> data);

    static Tensor scalar(float v);
    static Tensor zeros(std::vector<std::int64_t> shape);
    static Tensor full(std::vector<std::int64_t> shape, float v);

    const std::vector<std::int64_t>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    std::int64_t dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    std::int64_t numel() const { return static_cast<std::int64_t>(data_.size()); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::vector<float>& vec() { return data_; }
    const std::vector<float>& vec() const { return data_; }

    float& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    float operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

    /// Rank-2 element access.
    float& at(std::int64_t r, std::int64_t c) {
        return data_[static_cast<std::size_t>(r * shape_[1] + c)];
    }
    float at(std::int64_t r, std::int64_t c) const {
        return data_[static_cast<std::size_t>(r * shape_[1] + c)];
    }

    float item() const;  ///< value of a single-element tensor

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

    bool all_finite() const;
    /// Throws std::runtime_error naming `what` if any value is NaN/Inf.
    void require_finite(const std::string& what) const;

    void fill(float v);

private:
    std::vector<std::int64_t> shape_;
    std::vector<float> data_;
};

std::string shape_to_string(const std::vector<std::int64_t>& shape);

/// c = a [rows_a x inner] * b [inner x cols_b], row-major.
/// Throws std::invalid_argument naming both shapes on mismatch.
Tensor matmul_value(const Tensor& a, const Tensor& b);

/// Raw row-major sgemm helpers used by forward and backward kernels.
/// c (m x n) += or = alpha * op(a) * op(b).
void gemm(bool trans_a, bool trans_b, std::int64_t m, std::int64_t n,
          std::int64_t k, float alpha, const float* a, const float* b,
          float beta, float* c);

}  // namespace pcgan
