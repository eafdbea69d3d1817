#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pcgan/tensor.hpp"

namespace pcgan {

/// Flat binary parameter container, little-endian throughout:
///   "PCGW" | version u32 | records...
/// record: name_len u32 | name bytes | rank u32 | dims u32[rank] | f32 data.
constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, Tensor>>& tensors);

std::vector<std::pair<std::string, Tensor>> load_checkpoint(
    const std::filesystem::path& path);

}  // namespace pcgan
