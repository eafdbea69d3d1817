#include "pcgan/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pcgan {

ConditionVector::ConditionVector(std::vector<std::uint8_t> bits,
                                 std::vector<std::uint8_t> observed)
    : bits_(std::move(bits)), observed_(std::move(observed)) {
    if (bits_.size() != observed_.size()) {
        throw std::invalid_argument("condition vector bits/observed length mismatch");
    }
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] > 1) {
            throw std::invalid_argument("condition vector entries must be 0 or 1");
        }
        if (!observed_[i] && bits_[i] != 0) {
            throw std::invalid_argument("unobserved conditioning entry must be 0");
        }
    }
}

ConditionVector::ConditionVector(std::vector<std::uint8_t> bits)
    : ConditionVector(std::move(bits), {}) {
    observed_.assign(bits_.size(), 1);
}

std::vector<std::int64_t> ConditionVector::observed_indices() const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < observed_.size(); ++i) {
        if (observed_[i]) out.push_back(static_cast<std::int64_t>(i));
    }
    return out;
}

std::int64_t ConditionVector::popcount() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::int64_t{0});
}

void ConditionVector::write_floats(float* dst) const {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        dst[i] = static_cast<float>(bits_[i]);
    }
}

Tensor ConditionVector::to_tensor() const {
    Tensor t({size()});
    write_floats(t.data());
    return t;
}

MaskSpec::MaskSpec(float p_, std::uint64_t seed_) : p(p_), seed(seed_) {
    if (!(p > 0.0f && p <= 1.0f)) {
        throw std::invalid_argument("mask observation probability must be in (0,1], got " +
                                    std::to_string(p));
    }
}

ConditionVector one_hot(int class_index, int num_classes) {
    if (class_index < 0 || class_index >= num_classes) {
        throw std::invalid_argument("one_hot index " + std::to_string(class_index) +
                                    " out of range [0," + std::to_string(num_classes) +
                                    ")");
    }
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(num_classes), 0);
    bits[static_cast<std::size_t>(class_index)] = 1;
    return ConditionVector(std::move(bits));
}

ConditionVector encode_dup9(int digit) {
    if (digit < 0 || digit > 9) {
        throw std::invalid_argument("encode_dup9 digit out of range: " +
                                    std::to_string(digit));
    }
    std::vector<std::uint8_t> bits(11, 0);
    if (digit == 9) {
        bits[9] = 1;
        bits[10] = 1;
    } else {
        bits[static_cast<std::size_t>(digit)] = 1;
    }
    return ConditionVector(std::move(bits));
}

ConditionVector apply_mask(const ConditionVector& y, const MaskSpec& m, Rng& rng) {
    const std::size_t k = y.bits().size();
    std::vector<std::uint8_t> bits(k), observed(k);
    for (std::size_t i = 0; i < k; ++i) {
        const bool keep = rng.bernoulli(m.p);
        observed[i] = y.observed_mask()[i] && keep ? 1 : 0;
        bits[i] = observed[i] ? y.bits()[i] : 0;
    }
    return ConditionVector(std::move(bits), std::move(observed));
}

ConditionVector mask_fraction(const ConditionVector& y, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw std::invalid_argument("mask fraction must be in [0,1], got " +
                                    std::to_string(fraction));
    }
    const std::size_t k = y.bits().size();
    const auto drop = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(k)));
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first `drop` entries are the masked positions.
    for (std::size_t i = 0; i < drop; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(k - i));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::uint8_t> bits(y.bits());
    std::vector<std::uint8_t> observed(y.observed_mask());
    for (std::size_t i = 0; i < drop; ++i) {
        bits[idx[i]] = 0;
        observed[idx[i]] = 0;
    }
    return ConditionVector(std::move(bits), std::move(observed));
}

PartitionScheme::PartitionScheme(
    std::uint64_t seed, std::array<std::array<int, kDigits>, kPartitions> assignment)
    : seed_(seed), assignment_(assignment) {
    for (const auto& part : assignment_) {
        std::array<int, kBlocks> sizes = {};
        for (int b : part) {
            if (b < 0 || b >= kBlocks) {
                throw std::invalid_argument("partition block index out of range");
            }
            ++sizes[static_cast<std::size_t>(b)];
        }
        std::array<int, kBlocks> sorted = sizes;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != std::array<int, kBlocks>{3, 3, 4}) {
            throw std::invalid_argument("partition block sizes must be {3,3,4}");
        }
    }
}

std::uint16_t PartitionScheme::block_members(int partition, int block) const {
    std::uint16_t mask = 0;
    for (int d = 0; d < kDigits; ++d) {
        if (block_of(partition, d) == block) mask |= static_cast<std::uint16_t>(1u << d);
    }
    return mask;
}

ConditionVector PartitionScheme::encode(int digit) const {
    if (digit < 0 || digit >= kDigits) {
        throw std::invalid_argument("partition encode digit out of range: " +
                                    std::to_string(digit));
    }
    std::vector<std::uint8_t> bits(kCondBits, 0);
    for (int p = 0; p < kPartitions; ++p) {
        bits[static_cast<std::size_t>(p * kBlocks + block_of(p, digit))] = 1;
    }
    return ConditionVector(std::move(bits));
}

std::string PartitionScheme::serialize() const {
    std::ostringstream os;
    os << "seed=" << seed_ << "\n";
    for (const auto& part : assignment_) {
        for (std::size_t d = 0; d < part.size(); ++d) {
            if (d) os << ',';
            os << part[d];
        }
        os << "\n";
    }
    return os.str();
}

PartitionScheme PartitionScheme::parse(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("seed=", 0) != 0) {
        throw std::invalid_argument("partition scheme text must start with seed=<u64>");
    }
    const std::uint64_t seed = std::stoull(line.substr(5));
    std::array<std::array<int, kDigits>, kPartitions> assignment = {};
    for (int p = 0; p < kPartitions; ++p) {
        if (!std::getline(is, line)) {
            throw std::invalid_argument("partition scheme text: expected 10 partition lines");
        }
        std::istringstream ls(line);
        std::string tok;
        for (int d = 0; d < kDigits; ++d) {
            if (!std::getline(ls, tok, ',')) {
                throw std::invalid_argument("partition line " + std::to_string(p) +
                                            " needs 10 entries");
            }
            assignment[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] =
                std::stoi(tok);
        }
    }
    return PartitionScheme(seed, assignment);
}

void PartitionScheme::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write partition scheme: " + path.string());
    os << serialize();
}

PartitionScheme PartitionScheme::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read partition scheme: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

PartitionScheme build_partition_scheme(Rng& rng) {
    std::array<std::array<int, PartitionScheme::kDigits>, PartitionScheme::kPartitions>
        assignment = {};
    for (auto& part : assignment) {
        // Uniform over assignments with sizes {3,3,4}: pick which block gets
        // the extra digit, then deal a uniform shuffle into the size profile.
        const int big = static_cast<int>(rng.next_below(3));
        std::array<int, 3> sizes = {3, 3, 3};
        sizes[static_cast<std::size_t>(big)] = 4;
        std::vector<int> digits(PartitionScheme::kDigits);
        std::iota(digits.begin(), digits.end(), 0);
        rng.shuffle(digits);
        std::size_t pos = 0;
        for (int b = 0; b < 3; ++b) {
            for (int i = 0; i < sizes[static_cast<std::size_t>(b)]; ++i) {
                part[static_cast<std::size_t>(digits[pos++])] = b;
            }
        }
    }
    return PartitionScheme(rng.seed(), assignment);
}

RedundancyReport check_redundancy(const PartitionScheme& s) {
    RedundancyReport report;
    for (int n = 0; n < PartitionScheme::kDigits; ++n) {
        DigitRedundancy& r = report.digits[static_cast<std::size_t>(n)];
        r.digit = n;
        std::array<std::uint16_t, PartitionScheme::kPartitions> member_masks = {};
        std::uint16_t full = 0x3ff;
        for (int k = 0; k < PartitionScheme::kPartitions; ++k) {
            member_masks[static_cast<std::size_t>(k)] =
                s.block_members(k, s.block_of(k, n));
            full &= member_masks[static_cast<std::size_t>(k)];
        }
        r.full_intersection = full;
        r.uniquely_identified = full == static_cast<std::uint16_t>(1u << n);
        r.any_redundant = false;
        for (int m = 0; m < PartitionScheme::kPartitions; ++m) {
            std::uint16_t loo = 0x3ff;
            for (int k = 0; k < PartitionScheme::kPartitions; ++k) {
                if (k != m) loo &= member_masks[static_cast<std::size_t>(k)];
            }
            const bool redundant = loo == full;
            r.leave_one_out_redundant[static_cast<std::size_t>(m)] = redundant;
            r.any_redundant = r.any_redundant || redundant;
        }
    }
    return report;
}

std::string RedundancyReport::to_string() const {
    std::ostringstream os;
    for (const auto& r : digits) {
        os << "digit " << r.digit << ": intersection={";
        bool first = true;
        for (int d = 0; d < 10; ++d) {
            if (r.full_intersection & (1u << d)) {
                if (!first) os << ',';
                os << d;
                first = false;
            }
        }
        os << "} unique=" << (r.uniquely_identified ? "yes" : "no") << " droppable=[";
        first = true;
        for (int m = 0; m < PartitionScheme::kPartitions; ++m) {
            if (r.leave_one_out_redundant[static_cast<std::size_t>(m)]) {
                if (!first) os << ',';
                os << m;
                first = false;
            }
        }
        os << "]\n";
    }
    return os.str();
}

Tensor conds_to_tensor(const std::vector<ConditionVector>& conds) {
    if (conds.empty()) throw std::invalid_argument("conds_to_tensor: empty batch");
    const std::int64_t k = conds.front().size();
    Tensor t({static_cast<std::int64_t>(conds.size()), k});
    for (std::size_t i = 0; i < conds.size(); ++i) {
        if (conds[i].size() != k) {
            throw std::invalid_argument("conds_to_tensor: inconsistent lengths");
        }
        conds[i].write_floats(t.data() + static_cast<std::int64_t>(i) * k);
    }
    return t;
}

}  // namespace pcgan
