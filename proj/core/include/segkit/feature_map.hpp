#pragma once

#include "segkit/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace segkit {

enum class FeatureSource { toy_encoder, bridge_export };

/// C x fh x fw feature tensor for one image, channel-major.
class FeatureMap {
  public:
    FeatureMap() = default;
    FeatureMap(std::string image_id, int channels, int fh, int fw, std::vector<float> values,
               FeatureSource source);

    std::string const& image_id() const { return image_id_; }
    int channels() const { return channels_; }
    int fh() const { return fh_; }
    int fw() const { return fw_; }
    FeatureSource source() const { return source_; }
    std::span<float const> values() const { return values_; }

    float at(int c, int row, int col) const {
        return values_[(static_cast<std::size_t>(c) * fh_ + row) * fw_ + col];
    }

    /// Feature vector of one cell, widened to double.
    std::vector<double> cell(int row, int col) const;

    /// Cell containing canvas pixel (x, y) under the nearest-cell mapping.
    int row_of(double y, int canvas_h) const;
    int col_of(double x, int canvas_w) const;

  private:
    std::string image_id_;
    int channels_ = 0;
    int fh_ = 0;
    int fw_ = 0;
    std::vector<float> values_;
    FeatureSource source_ = FeatureSource::toy_encoder;
};

/// Raw tensor as stored in the portable ".feat" format.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> values;

    std::size_t element_count() const;
    friend bool operator==(Tensor const&, Tensor const&) = default;
};

/// "FEAT" | u32 version=1 | u32 rank | rank x u32 dims | f32 payload, all little-endian.
std::vector<std::byte> encode_tensor(Tensor const& tensor);

/// Parses one tensor starting at `bytes`; `consumed` receives its length.
/// Throws LoadError describing truncation or a bad header.
Tensor decode_tensor(std::span<std::byte const> bytes, std::size_t* consumed = nullptr);

void write_feat(std::filesystem::path const& path, FeatureMap const& map);
FeatureMap read_feat(std::filesystem::path const& path, std::string image_id,
                     FeatureSource source = FeatureSource::bridge_export);

std::vector<std::byte> read_binary_file(std::filesystem::path const& path);

/// Supplies a feature map for an image. Implementations are thread-safe.
class FeatureProvider {
  public:
    virtual ~FeatureProvider() = default;
    virtual FeatureMap features_for(ImageRecord const& image) const = 0;
};

/// Reads `<dir>/<image_id>.feat`.
class FeatureDirectory final : public FeatureProvider {
  public:
    explicit FeatureDirectory(std::filesystem::path dir);
    FeatureMap features_for(ImageRecord const& image) const override;

    /// Throws LoadError listing every image without a feature file.
    void require(std::span<ImageRecord const> images) const;

  private:
    std::filesystem::path dir_;
};

} // namespace segkit
