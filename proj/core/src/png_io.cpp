#include "segkit/png_io.hpp"

#include "segkit/atomic_file.hpp"
#include "segkit/error.hpp"

#include <png.h>

#include <cstring>
#include <memory>

namespace segkit {

namespace {

struct PngImage {
    png_image image;

    PngImage() {
        std::memset(&image, 0, sizeof image);
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(PngImage const&) = delete;
    PngImage& operator=(PngImage const&) = delete;
};

std::vector<std::uint8_t> decode(std::filesystem::path const& path, png_uint_32 format,
                                 int& width, int& height) {
    if (!std::filesystem::exists(path)) {
        throw LoadError("missing file '" + path.string() + "'");
    }
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw LoadError("cannot decode '" + path.string() + "': " + png.image.message);
    }
    png.image.format = format;
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buffer.data(), 0, nullptr)) {
        throw LoadError("cannot decode '" + path.string() + "': " + png.image.message);
    }
    width = static_cast<int>(png.image.width);
    height = static_cast<int>(png.image.height);
    return buffer;
}

void encode(std::filesystem::path const& path, png_uint_32 format, int width, int height,
            std::uint8_t const* data) {
    write_atomic_with(path, [&](std::filesystem::path const& tmp) {
        PngImage png;
        png.image.width = static_cast<png_uint_32>(width);
        png.image.height = static_cast<png_uint_32>(height);
        png.image.format = format;
        if (!png_image_write_to_file(&png.image, tmp.c_str(), 0, data, 0, nullptr)) {
            throw Error("cannot write '" + path.string() + "': " + png.image.message);
        }
    });
}

} // namespace

ImageFrame read_rgb_png(std::filesystem::path const& path, std::string id) {
    ImageFrame frame;
    frame.id = std::move(id);
    frame.channels = 3;
    frame.pixels = decode(path, PNG_FORMAT_RGB, frame.width, frame.height);
    return frame;
}

BinaryMask read_mask_png(std::filesystem::path const& path) {
    int width = 0, height = 0;
    auto gray = decode(path, PNG_FORMAT_GRAY, width, height);
    for (auto& v : gray) {
        v = v >= 128 ? 1 : 0;
    }
    return BinaryMask(width, height, std::move(gray));
}

void write_rgb_png(std::filesystem::path const& path, ImageFrame const& frame) {
    frame.validate();
    encode(path, PNG_FORMAT_RGB, frame.width, frame.height, frame.pixels.data());
}

void write_mask_png(std::filesystem::path const& path, BinaryMask const& mask) {
    if (mask.width() <= 0 || mask.height() <= 0) {
        throw ArgumentError("cannot write an empty-canvas mask to '" + path.string() + "'");
    }
    std::vector<std::uint8_t> gray(mask.values().begin(), mask.values().end());
    for (auto& v : gray) {
        v = v ? 255 : 0;
    }
    encode(path, PNG_FORMAT_GRAY, mask.width(), mask.height(), gray.data());
}

} // namespace segkit
