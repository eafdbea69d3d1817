#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace pcgan {

/// Deterministic, platform-independent PRNG (xoshiro256** seeded via
/// splitmix64). The same seed always yields the same stream; independent
/// sub-streams are derived with fork().
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform in [0, 1), 53-bit resolution.
    double next_double();
    /// Uniform in [0, 1), 24-bit resolution.
    float next_float();

    /// Uniform integer in [0, n), n > 0. Rejection-sampled, unbiased.
    std::uint64_t next_below(std::uint64_t n);

    bool bernoulli(double p);

    /// Standard normal via Box-Muller. Generated in pairs; the spare is
    /// cached, so draw order matters for reproducibility.
    float normal();

    std::vector<float> normal_vector(std::size_t n);

    /// Derive an independent stream from this generator's seed and a tag.
    /// Forking does not advance this generator's state.
    Rng fork(std::string_view tag) const;

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t state_[4] = {};
    bool has_spare_ = false;
    float spare_ = 0.0f;
};

}  // namespace pcgan
