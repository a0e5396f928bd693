#pragma once

#include "segkit/class_table.hpp"
#include "segkit/image.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace segkit {

struct InstanceMask {
    BinaryMask mask;
    std::size_t label = 0; ///< index into the owning manifest's ClassTable
    std::string instance_id;
    std::string file; ///< path relative to the manifest, empty for in-memory masks

    friend bool operator==(InstanceMask const&, InstanceMask const&) = default;
};

struct ImageRecord {
    ImageFrame frame;
    std::string file;
    std::vector<InstanceMask> masks;

    std::string const& id() const { return frame.id; }
    friend bool operator==(ImageRecord const&, ImageRecord const&) = default;
};

struct Manifest {
    ClassTable class_table;
    std::vector<ImageRecord> images;

    std::size_t image_count() const { return images.size(); }
    std::size_t mask_count() const;

    /// Checks every frame and mask invariant; throws ValidationError.
    void validate() const;

    friend bool operator==(Manifest const&, Manifest const&) = default;
};

/// Loads a JSON manifest and decodes every referenced PNG. Paths inside the
/// document are relative to the manifest file.
Manifest load_manifest(std::filesystem::path const& path);

/// Writes the manifest document plus one PNG per image and mask. Records with
/// an empty `file` get `images/<id>.png` / `masks/<instance_id>.png`.
void save_manifest(Manifest const& manifest, std::filesystem::path const& path);

/// Resamples an image (bilinear) and its masks (nearest) onto a side x side canvas.
std::pair<ImageFrame, std::vector<InstanceMask>> resize_to_canvas(
    ImageFrame const& frame, std::span<InstanceMask const> masks, int side = 1024);

/// Applies resize_to_canvas to every image. side <= 0 leaves the manifest unchanged.
Manifest resize_manifest(Manifest const& manifest, int side);

BinaryMask resize_mask_nearest(BinaryMask const& mask, int width, int height);
ImageFrame resize_frame_bilinear(ImageFrame const& frame, int width, int height);

struct StatsReport {
    std::size_t image_count = 0;
    std::size_t mask_count = 0;
    std::vector<std::pair<std::string, std::size_t>> per_class; ///< table order, zeros included
    std::map<std::string, std::size_t> per_category;
    std::map<std::string, std::size_t> per_size;
    ClassTable class_table;
};

StatsReport dataset_stats(Manifest const& manifest);
std::string render_stats_table(StatsReport const& report);
std::string stats_to_json(StatsReport const& report);

} // namespace segkit
