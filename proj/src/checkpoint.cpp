#include "pcgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pcgan {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::istream& is, const char* what) {
    std::uint32_t v = 0;
    if (!is.read(reinterpret_cast<char*>(&v), 4)) {
        throw std::runtime_error(std::string("checkpoint truncated while reading ") + what);
    }
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, Tensor>>& tensors) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    os.write("PCGW", 4);
    write_u32(os, kCheckpointVersion);
    for (const auto& [name, t] : tensors) {
        write_u32(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        write_u32(os, static_cast<std::uint32_t>(t.rank()));
        for (int i = 0; i < t.rank(); ++i) {
            write_u32(os, static_cast<std::uint32_t>(t.dim(i)));
        }
        os.write(reinterpret_cast<const char*>(t.data()),
                 static_cast<std::streamsize>(t.numel() * 4));
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path.string());
}

std::vector<std::pair<std::string, Tensor>> load_checkpoint(
    const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[4] = {};
    if (!is.read(magic, 4) || std::memcmp(magic, "PCGW", 4) != 0) {
        throw std::runtime_error("bad checkpoint magic in " + path.string());
    }
    const std::uint32_t version = read_u32(is, "version");
    if (version != kCheckpointVersion) {
        throw std::runtime_error("unsupported checkpoint version " +
                                 std::to_string(version) + " in " + path.string());
    }
    std::vector<std::pair<std::string, Tensor>> out;
    for (;;) {
        std::uint32_t name_len = 0;
        if (!is.read(reinterpret_cast<char*>(&name_len), 4)) break;  // clean EOF
        std::string name(name_len, '\0');
        if (!is.read(name.data(), name_len)) {
            throw std::runtime_error("checkpoint truncated while reading a name in " +
                                     path.string());
        }
        const std::uint32_t rank = read_u32(is, "rank");
        std::vector<std::int64_t> shape(rank);
        std::int64_t numel = 1;
        for (auto& d : shape) {
            d = read_u32(is, "dim");
            numel *= d;
        }
        std::vector<float> data(static_cast<std::size_t>(numel));
        if (!is.read(reinterpret_cast<char*>(data.data()),
                     static_cast<std::streamsize>(numel * 4))) {
            throw std::runtime_error("checkpoint truncated while reading tensor '" + name +
                                     "' in " + path.string());
        }
        out.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
    }
    return out;
}

}  // namespace pcgan
