#include "segkit/feature_map.hpp"

#include "segkit/atomic_file.hpp"
#include "segkit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace segkit {

FeatureMap::FeatureMap(std::string image_id, int channels, int fh, int fw,
                       std::vector<float> values, FeatureSource source)
    : image_id_(std::move(image_id)), channels_(channels), fh_(fh), fw_(fw),
      values_(std::move(values)), source_(source) {
    if (channels < 1 || fh < 1 || fw < 1) {
        throw ValidationError("feature map for '" + image_id_ + "' has an empty dimension");
    }
    if (values_.size() != static_cast<std::size_t>(channels) * fh * fw) {
        throw ValidationError("feature map for '" + image_id_ + "' does not match C*fh*fw");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); })) {
        throw ValidationError("feature map for '" + image_id_ + "' has non-finite values");
    }
}

std::vector<double> FeatureMap::cell(int row, int col) const {
    std::vector<double> v(static_cast<std::size_t>(channels_));
    for (int c = 0; c < channels_; ++c) {
        v[static_cast<std::size_t>(c)] = at(c, row, col);
    }
    return v;
}

int FeatureMap::row_of(double y, int canvas_h) const {
    return std::clamp(static_cast<int>(std::floor(y * fh_ / canvas_h)), 0, fh_ - 1);
}

int FeatureMap::col_of(double x, int canvas_w) const {
    return std::clamp(static_cast<int>(std::floor(x * fw_ / canvas_w)), 0, fw_ - 1);
}

std::size_t Tensor::element_count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

namespace {

constexpr std::uint32_t kFeatVersion = 1;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
    }
}

std::uint32_t get_u32(std::span<std::byte const> bytes, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
    }
    return v;
}

void require(std::span<std::byte const> bytes, std::size_t offset, std::size_t need,
             char const* what) {
    if (bytes.size() < offset + need) {
        throw LoadError(fmt::format("truncated tensor: {} needs {} bytes at offset {}, {} missing",
                                    what, need, offset, offset + need - bytes.size()));
    }
}

} // namespace

std::vector<std::byte> encode_tensor(Tensor const& tensor) {
    if (tensor.values.size() != tensor.element_count()) {
        throw ArgumentError("tensor payload does not match its dimensions");
    }
    std::vector<std::byte> out;
    out.reserve(16 + 4 * tensor.dims.size() + 4 * tensor.values.size());
    for (char c : {'F', 'E', 'A', 'T'}) {
        out.push_back(static_cast<std::byte>(c));
    }
    put_u32(out, kFeatVersion);
    put_u32(out, static_cast<std::uint32_t>(tensor.dims.size()));
    for (auto d : tensor.dims) {
        put_u32(out, d);
    }
    for (float f : tensor.values) {
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

Tensor decode_tensor(std::span<std::byte const> bytes, std::size_t* consumed) {
    require(bytes, 0, 12, "header");
    if (std::memcmp(bytes.data(), "FEAT", 4) != 0) {
        throw LoadError("bad tensor magic: expected \"FEAT\"");
    }
    auto const version = get_u32(bytes, 4);
    if (version != kFeatVersion) {
        throw LoadError(fmt::format("unsupported tensor version {}", version));
    }
    auto const rank = get_u32(bytes, 8);
    require(bytes, 12, 4ull * rank, "dimension table");
    Tensor t;
    for (std::uint32_t i = 0; i < rank; ++i) {
        t.dims.push_back(get_u32(bytes, 12 + 4ull * i));
    }
    std::size_t const offset = 12 + 4ull * rank;
    std::size_t const count = t.element_count();
    require(bytes, offset, 4 * count, "payload");
    t.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        t.values[i] = std::bit_cast<float>(get_u32(bytes, offset + 4 * i));
    }
    if (consumed) {
        *consumed = offset + 4 * count;
    }
    return t;
}

std::vector<std::byte> read_binary_file(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError("cannot open '" + path.string() + "'");
    }
    in.seekg(0, std::ios::end);
    auto const size = static_cast<std::size_t>(in.tellg());
    in.seekg(0);
    std::vector<std::byte> bytes(size);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    return bytes;
}

void write_feat(std::filesystem::path const& path, FeatureMap const& map) {
    Tensor t{{static_cast<std::uint32_t>(map.channels()), static_cast<std::uint32_t>(map.fh()),
              static_cast<std::uint32_t>(map.fw())},
             {map.values().begin(), map.values().end()}};
    write_file_atomic(path, encode_tensor(t));
}

FeatureMap read_feat(std::filesystem::path const& path, std::string image_id,
                     FeatureSource source) {
    auto const bytes = read_binary_file(path);
    Tensor t;
    std::size_t used = 0;
    try {
        t = decode_tensor(bytes, &used);
    } catch (LoadError const& e) {
        throw LoadError("'" + path.string() + "': " + e.what());
    }
    if (used != bytes.size()) {
        throw LoadError(fmt::format("'{}': {} trailing bytes after the tensor", path.string(),
                                    bytes.size() - used));
    }
    if (t.dims.size() != 3) {
        throw LoadError(fmt::format("'{}': feature maps are rank 3, found rank {}", path.string(),
                                    t.dims.size()));
    }
    return FeatureMap(std::move(image_id), static_cast<int>(t.dims[0]),
                      static_cast<int>(t.dims[1]), static_cast<int>(t.dims[2]),
                      std::move(t.values), source);
}

FeatureDirectory::FeatureDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {}

FeatureMap FeatureDirectory::features_for(ImageRecord const& image) const {
    auto const path = dir_ / (image.id() + ".feat");
    if (!std::filesystem::exists(path)) {
        throw LoadError("no feature map for image '" + image.id() + "' (expected " +
                        path.string() + ")");
    }
    return read_feat(path, image.id(), FeatureSource::bridge_export);
}

void FeatureDirectory::require(std::span<ImageRecord const> images) const {
    if (!std::filesystem::is_directory(dir_)) {
        throw LoadError("feature directory '" + dir_.string() + "' does not exist");
    }
    std::vector<std::string> missing;
    for (auto const& img : images) {
        if (!std::filesystem::exists(dir_ / (img.id() + ".feat"))) missing.push_back(img.id());
    }
    if (!missing.empty()) {
        throw LoadError(fmt::format("no feature map in '{}' for image(s): {}", dir_.string(),
                                    fmt::join(missing, ", ")));
    }
}

} // namespace segkit
