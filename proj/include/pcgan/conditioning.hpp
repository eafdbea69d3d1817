#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcgan/rng.hpp"
#include "pcgan/tensor.hpp"

namespace pcgan {

/// Binary conditioning vector with the set of indices whose values are
/// actually observed. Unobserved entries are always 0.
class ConditionVector {
public:
    ConditionVector() = default;
    ConditionVector(std::vector<std::uint8_t> bits, std::vector<std::uint8_t> observed);
    /// All entries observed.
    explicit ConditionVector(std::vector<std::uint8_t> bits);

    std::int64_t size() const { return static_cast<std::int64_t>(bits_.size()); }
    std::uint8_t bit(std::int64_t i) const { return bits_[static_cast<std::size_t>(i)]; }
    bool is_observed(std::int64_t i) const {
        return observed_[static_cast<std::size_t>(i)] != 0;
    }
    const std::vector<std::uint8_t>& bits() const { return bits_; }
    const std::vector<std::uint8_t>& observed_mask() const { return observed_; }
    std::vector<std::int64_t> observed_indices() const;
    std::int64_t popcount() const;

    /// Write the bits as floats into dst[0..size).
    void write_floats(float* dst) const;
    Tensor to_tensor() const;  // shape [size]

    bool operator==(const ConditionVector& other) const = default;

private:
    std::vector<std::uint8_t> bits_;
    std::vector<std::uint8_t> observed_;
};

/// Training-time Bernoulli keep mask: every entry independently observed
/// with probability p.
struct MaskSpec {
    explicit MaskSpec(float p, std::uint64_t seed = 0);
    float p;
    std::uint64_t seed;
};

/// One-hot embedding: a single 1 at class_index, all indices observed.
ConditionVector one_hot(int class_index, int num_classes);

/// The duplicated-9 embedding over 11 bits: digits 0-8 one-hot, digit 9
/// sets bits 9 and 10.
ConditionVector encode_dup9(int digit);

/// y ⊙ b_p with b_p i.i.d. Bernoulli(p); draws one Bernoulli per entry.
/// The observed set shrinks to the kept indices.
ConditionVector apply_mask(const ConditionVector& y, const MaskSpec& m, Rng& rng);

/// Evaluation-time masking: zeroes exactly round(fraction * K) positions
/// chosen uniformly without replacement. fraction outside [0,1] throws.
ConditionVector mask_fraction(const ConditionVector& y, double fraction, Rng& rng);

/// Ten random partitions of the digits {0..9} into three blocks with sizes
/// {3,3,4}; encodes each digit as a 30-bit vector with one 1 per partition.
class PartitionScheme {
public:
    static constexpr int kPartitions = 10;
    static constexpr int kBlocks = 3;
    static constexpr int kDigits = 10;
    static constexpr int kCondBits = kPartitions * kBlocks;

    PartitionScheme() = default;
    PartitionScheme(std::uint64_t seed,
                    std::array<std::array<int, kDigits>, kPartitions> assignment);

    int block_of(int partition, int digit) const {
        return assignment_[static_cast<std::size_t>(partition)]
                          [static_cast<std::size_t>(digit)];
    }
    /// Digits of one block as a bitmask over {0..9}.
    std::uint16_t block_members(int partition, int block) const;

    ConditionVector encode(int digit) const;

    std::uint64_t seed() const { return seed_; }

    std::string serialize() const;
    static PartitionScheme parse(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static PartitionScheme load(const std::filesystem::path& path);

    bool operator==(const PartitionScheme& other) const = default;

private:
    std::uint64_t seed_ = 0;
    std::array<std::array<int, kDigits>, kPartitions> assignment_ = {};
};

PartitionScheme build_partition_scheme(Rng& rng);

struct DigitRedundancy {
    int digit = 0;
    std::uint16_t full_intersection = 0;  // bitmask over digits 0..9
    std::array<bool, PartitionScheme::kPartitions> leave_one_out_redundant = {};
    bool any_redundant = false;
    bool uniquely_identified = false;
};

struct RedundancyReport {
    std::array<DigitRedundancy, PartitionScheme::kDigits> digits;
    std::string to_string() const;
};

/// Brute-force leave-one-out analysis: for each digit, which partitions can
/// be dropped without enlarging the intersection of its block memberships.
RedundancyReport check_redundancy(const PartitionScheme& s);

/// Encode a batch of labels into a [B, K] float tensor with the given
/// per-sample conditioners.
Tensor conds_to_tensor(const std::vector<ConditionVector>& conds);

}  // namespace pcgan
