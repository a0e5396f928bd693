#include "segkit/checkpoint.hpp"

#include "segkit/atomic_file.hpp"
#include "segkit/error.hpp"

#include <fmt/format.h>

#include <cstring>
#include <map>

namespace segkit {

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(std::span<std::byte const> bytes, std::size_t offset) {
    if (bytes.size() < offset + 4) {
        throw LoadError(fmt::format("truncated checkpoint at offset {}", offset));
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
    }
    return v;
}

template <typename Range>
Tensor to_tensor(std::vector<std::uint32_t> dims, Range const& values) {
    Tensor t;
    t.dims = std::move(dims);
    for (double v : values) t.values.push_back(static_cast<float>(v));
    return t;
}

} // namespace

std::vector<std::byte> encode_sections(std::vector<std::pair<std::string, Tensor>> const& sections) {
    std::vector<std::byte> out;
    for (char c : {'S', 'K', 'C', 'K'}) out.push_back(static_cast<std::byte>(c));
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(sections.size()));
    for (auto const& [name, tensor] : sections) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        for (char c : name) out.push_back(static_cast<std::byte>(c));
        auto const blob = encode_tensor(tensor);
        out.insert(out.end(), blob.begin(), blob.end());
    }
    return out;
}

std::vector<std::pair<std::string, Tensor>> decode_sections(std::span<std::byte const> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "SKCK", 4) != 0) {
        throw LoadError("not a checkpoint: bad magic");
    }
    if (auto const v = get_u32(bytes, 4); v != kCheckpointVersion) {
        throw LoadError(fmt::format("unsupported checkpoint version {}", v));
    }
    auto const count = get_u32(bytes, 8);
    std::size_t offset = 12;
    std::vector<std::pair<std::string, Tensor>> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        auto const len = get_u32(bytes, offset);
        offset += 4;
        if (bytes.size() < offset + len) {
            throw LoadError("truncated checkpoint section name");
        }
        std::string name(reinterpret_cast<char const*>(bytes.data() + offset), len);
        offset += len;
        std::size_t used = 0;
        auto tensor = decode_tensor(bytes.subspan(offset), &used);
        offset += used;
        out.emplace_back(std::move(name), std::move(tensor));
    }
    if (offset != bytes.size()) {
        throw LoadError(fmt::format("{} trailing bytes in checkpoint", bytes.size() - offset));
    }
    return out;
}

void save_checkpoint(std::filesystem::path const& path, ToyHead const& head) {
    head.validate();
    auto const c = static_cast<std::uint32_t>(head.channels);
    auto const k = static_cast<std::uint32_t>(head.class_count);
    std::vector<std::pair<std::string, Tensor>> sections;
    sections.emplace_back("bilinear", to_tensor({c, c}, head.bilinear));
    sections.emplace_back("offsets", to_tensor({3}, head.offsets));
    sections.emplace_back("iou_weights", to_tensor({3, 3}, head.iou_weights));
    sections.emplace_back("class_weights", to_tensor({k, c}, head.class_weights));
    sections.emplace_back("class_bias", to_tensor({k}, head.class_bias));
    write_file_atomic(path, encode_sections(sections));
}

ToyHead load_checkpoint(std::filesystem::path const& path) {
    std::map<std::string, Tensor> by_name;
    try {
        for (auto& [name, t] : decode_sections(read_binary_file(path))) {
            by_name[name] = std::move(t);
        }
    } catch (LoadError const& e) {
        throw LoadError("checkpoint '" + path.string() + "': " + e.what());
    }
    auto section = [&](char const* name, std::size_t rank) -> Tensor const& {
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw LoadError(fmt::format("checkpoint '{}' lacks section '{}'", path.string(), name));
        }
        if (it->second.dims.size() != rank) {
            throw LoadError(fmt::format("checkpoint section '{}' has rank {}, expected {}", name,
                                        it->second.dims.size(), rank));
        }
        return it->second;
    };
    auto const& bilinear = section("bilinear", 2);
    auto const& class_weights = section("class_weights", 2);
    ToyHead head = ToyHead::zeros(static_cast<int>(bilinear.dims[0]), class_weights.dims[0]);
    auto copy = [&](Tensor const& t, auto& dst, char const* name) {
        if (t.values.size() != dst.size()) {
            throw LoadError(fmt::format("checkpoint section '{}' has the wrong size", name));
        }
        std::copy(t.values.begin(), t.values.end(), dst.begin());
    };
    copy(bilinear, head.bilinear, "bilinear");
    copy(section("offsets", 1), head.offsets, "offsets");
    copy(section("iou_weights", 2), head.iou_weights, "iou_weights");
    copy(class_weights, head.class_weights, "class_weights");
    copy(section("class_bias", 1), head.class_bias, "class_bias");
    head.validate();
    return head;
}

} // namespace segkit
