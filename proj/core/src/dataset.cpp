#include "segkit/dataset.hpp"

#include "segkit/atomic_file.hpp"
#include "segkit/error.hpp"
#include "segkit/png_io.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace segkit {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::size_t Manifest::mask_count() const {
    std::size_t n = 0;
    for (auto const& img : images) {
        n += img.masks.size();
    }
    return n;
}

void Manifest::validate() const {
    for (auto const& img : images) {
        img.frame.validate();
        for (auto const& m : img.masks) {
            if (m.mask.width() != img.frame.width || m.mask.height() != img.frame.height) {
                throw ValidationError(fmt::format(
                    "mask '{}' is {}x{} but image '{}' is {}x{}", m.instance_id, m.mask.width(),
                    m.mask.height(), img.id(), img.frame.width, img.frame.height));
            }
            if (m.mask.empty()) {
                throw ValidationError("mask '" + m.instance_id + "' has no foreground pixels");
            }
            if (m.label >= class_table.size()) {
                throw ValidationError("mask '" + m.instance_id + "' has an unknown label");
            }
        }
    }
}

namespace {

std::string required_string(ordered_json const& obj, char const* key, std::string const& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw LoadError(fmt::format("{}: missing string field '{}'", where, key));
    }
    return it->get<std::string>();
}

int required_int(ordered_json const& obj, char const* key, std::string const& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        throw LoadError(fmt::format("{}: missing integer field '{}'", where, key));
    }
    return it->get<int>();
}

} // namespace

Manifest load_manifest(fs::path const& path) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_text_file(path));
    } catch (ordered_json::exception const& e) {
        throw LoadError("cannot parse manifest '" + path.string() + "': " + e.what());
    }
    auto const root = path.parent_path();
    auto const where = path.string();

    if (!doc.is_object() || !doc.contains("class_table") || !doc["class_table"].is_array()) {
        throw LoadError(where + ": missing 'class_table' array");
    }
    std::vector<ClassEntry> entries;
    for (auto const& c : doc["class_table"]) {
        entries.push_back({required_string(c, "name", where),
                           parse_category(required_string(c, "category", where)),
                           parse_size(required_string(c, "size", where))});
    }

    Manifest m;
    m.class_table = ClassTable(std::move(entries));

    if (!doc.contains("images") || !doc["images"].is_array()) {
        throw LoadError(where + ": missing 'images' array");
    }
    for (auto const& jimg : doc["images"]) {
        ImageRecord rec;
        auto id = required_string(jimg, "id", where);
        rec.file = required_string(jimg, "file", where);
        int const width = required_int(jimg, "width", where);
        int const height = required_int(jimg, "height", where);
        rec.frame = read_rgb_png(root / rec.file, id);
        if (rec.frame.width != width || rec.frame.height != height) {
            throw ValidationError(fmt::format("image '{}' is {}x{} but the manifest declares {}x{}",
                                              id, rec.frame.width, rec.frame.height, width,
                                              height));
        }
        if (jimg.contains("masks")) {
            for (auto const& jm : jimg["masks"]) {
                InstanceMask im;
                im.file = required_string(jm, "file", where);
                im.instance_id = required_string(jm, "instance_id", where);
                auto const label = required_string(jm, "label", where);
                auto idx = m.class_table.index_of(label);
                if (!idx) {
                    throw ValidationError(fmt::format("mask '{}' has label '{}' not in the class table",
                                                      im.instance_id, label));
                }
                im.label = *idx;
                im.mask = read_mask_png(root / im.file);
                rec.masks.push_back(std::move(im));
            }
        }
        m.images.push_back(std::move(rec));
    }
    m.validate();
    return m;
}

void save_manifest(Manifest const& manifest, fs::path const& path) {
    manifest.validate();
    auto const root = path.parent_path();
    ordered_json doc;
    doc["class_table"] = ordered_json::array();
    for (auto const& e : manifest.class_table.entries()) {
        doc["class_table"].push_back(
            {{"name", e.name}, {"category", to_string(e.category)}, {"size", to_string(e.size)}});
    }
    doc["images"] = ordered_json::array();
    for (auto const& img : manifest.images) {
        auto const file = img.file.empty() ? "images/" + img.id() + ".png" : img.file;
        write_rgb_png(root / file, img.frame);
        ordered_json jimg{{"id", img.id()},
                          {"file", file},
                          {"width", img.frame.width},
                          {"height", img.frame.height},
                          {"masks", ordered_json::array()}};
        for (auto const& m : img.masks) {
            auto const mfile = m.file.empty() ? "masks/" + m.instance_id + ".png" : m.file;
            write_mask_png(root / mfile, m.mask);
            jimg["masks"].push_back({{"file", mfile},
                                     {"label", manifest.class_table.at(m.label).name},
                                     {"instance_id", m.instance_id}});
        }
        doc["images"].push_back(std::move(jimg));
    }
    write_file_atomic(path, doc.dump(2) + "\n");
}

BinaryMask resize_mask_nearest(BinaryMask const& mask, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ArgumentError("target size must be positive");
    }
    if (width == mask.width() && height == mask.height()) {
        return mask;
    }
    BinaryMask out(width, height);
    long long const sw = mask.width(), sh = mask.height();
    for (int y = 0; y < height; ++y) {
        int const sy = static_cast<int>(std::min(sh - 1, ((2LL * y + 1) * sh) / (2LL * height)));
        for (int x = 0; x < width; ++x) {
            int const sx = static_cast<int>(std::min(sw - 1, ((2LL * x + 1) * sw) / (2LL * width)));
            out(x, y) = mask(sx, sy);
        }
    }
    return out;
}

ImageFrame resize_frame_bilinear(ImageFrame const& frame, int width, int height) {
    frame.validate();
    if (width <= 0 || height <= 0) {
        throw ArgumentError("target size must be positive");
    }
    if (width == frame.width && height == frame.height) {
        return frame;
    }
    ImageFrame out = make_frame(frame.id, width, height);
    double const scale_x = static_cast<double>(frame.width) / width;
    double const scale_y = static_cast<double>(frame.height) / height;
    for (int y = 0; y < height; ++y) {
        double const sy = std::clamp((y + 0.5) * scale_y - 0.5, 0.0, frame.height - 1.0);
        int const y0 = static_cast<int>(std::floor(sy));
        int const y1 = std::min(y0 + 1, frame.height - 1);
        double const wy = sy - y0;
        for (int x = 0; x < width; ++x) {
            double const sx = std::clamp((x + 0.5) * scale_x - 0.5, 0.0, frame.width - 1.0);
            int const x0 = static_cast<int>(std::floor(sx));
            int const x1 = std::min(x0 + 1, frame.width - 1);
            double const wx = sx - x0;
            for (int c = 0; c < 3; ++c) {
                double const top = frame.at(x0, y0, c) * (1 - wx) + frame.at(x1, y0, c) * wx;
                double const bottom = frame.at(x0, y1, c) * (1 - wx) + frame.at(x1, y1, c) * wx;
                double const v = top * (1 - wy) + bottom * wy;
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            }
        }
    }
    return out;
}

std::pair<ImageFrame, std::vector<InstanceMask>> resize_to_canvas(
    ImageFrame const& frame, std::span<InstanceMask const> masks, int side) {
    if (side < std::max(frame.width, frame.height)) {
        throw ArgumentError(fmt::format("canvas side {} is smaller than image '{}' ({}x{})", side,
                                        frame.id, frame.width, frame.height));
    }
    auto image = resize_frame_bilinear(frame, side, side);
    std::vector<InstanceMask> out;
    out.reserve(masks.size());
    std::vector<std::string> emptied;
    for (auto const& m : masks) {
        InstanceMask r = m;
        r.mask = resize_mask_nearest(m.mask, side, side);
        if (r.mask.empty()) {
            emptied.push_back(m.instance_id);
        }
        out.push_back(std::move(r));
    }
    if (!emptied.empty()) {
        throw ValidationError(fmt::format("masks empty after resizing to {}: {}", side,
                                          fmt::join(emptied, ", ")));
    }
    return {std::move(image), std::move(out)};
}

Manifest resize_manifest(Manifest const& manifest, int side) {
    if (side <= 0) {
        return manifest;
    }
    Manifest out;
    out.class_table = manifest.class_table;
    out.images.reserve(manifest.images.size());
    for (auto const& img : manifest.images) {
        auto [frame, masks] = resize_to_canvas(img.frame, img.masks, side);
        out.images.push_back({std::move(frame), img.file, std::move(masks)});
    }
    return out;
}

StatsReport dataset_stats(Manifest const& manifest) {
    StatsReport r;
    r.class_table = manifest.class_table;
    r.image_count = manifest.image_count();
    for (auto c : {Category::receptacle, Category::pickupable, Category::openable}) {
        r.per_category[std::string(to_string(c))] = 0;
    }
    for (auto s : {SizeClass::small, SizeClass::medium, SizeClass::large}) {
        r.per_size[std::string(to_string(s))] = 0;
    }
    std::vector<std::size_t> counts(manifest.class_table.size(), 0);
    for (auto const& img : manifest.images) {
        for (auto const& m : img.masks) {
            ++counts.at(m.label);
        }
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        auto const& e = manifest.class_table.at(i);
        r.per_class.emplace_back(e.name, counts[i]);
        r.per_category[std::string(to_string(e.category))] += counts[i];
        r.per_size[std::string(to_string(e.size))] += counts[i];
        r.mask_count += counts[i];
    }
    return r;
}

std::string render_stats_table(StatsReport const& report) {
    std::string out;
    out += fmt::format("{:<12} {:<8} {:<20} {:>10}\n", "Type", "Size", "Class", "Total");
    out += std::string(53, '-') + "\n";
    for (auto cat : {Category::receptacle, Category::pickupable, Category::openable}) {
        for (auto size : {SizeClass::large, SizeClass::medium, SizeClass::small}) {
            for (std::size_t i = 0; i < report.per_class.size(); ++i) {
                auto const& e = report.class_table.at(i);
                if (e.category == cat && e.size == size) {
                    out += fmt::format("{:<12} {:<8} {:<20} {:>10}\n", to_string(cat),
                                       to_string(size), e.name, report.per_class[i].second);
                }
            }
        }
    }
    out += std::string(53, '-') + "\n";
    for (auto const& [name, n] : report.per_category) {
        out += fmt::format("{:<42} {:>10}\n", "category " + name, n);
    }
    for (auto const& [name, n] : report.per_size) {
        out += fmt::format("{:<42} {:>10}\n", "size " + name, n);
    }
    out += fmt::format("{:<42} {:>10}\n", "images", report.image_count);
    out += fmt::format("{:<42} {:>10}\n", "masks", report.mask_count);
    return out;
}

std::string stats_to_json(StatsReport const& report) {
    ordered_json j;
    j["image_count"] = report.image_count;
    j["mask_count"] = report.mask_count;
    j["per_class"] = ordered_json::object();
    for (auto const& [name, n] : report.per_class) {
        j["per_class"][name] = n;
    }
    j["per_category"] = report.per_category;
    j["per_size"] = report.per_size;
    return j.dump(2) + "\n";
}

} // namespace segkit
