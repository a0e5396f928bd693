#include "segkit/image.hpp"

#include "segkit/error.hpp"

#include <algorithm>

namespace segkit {

double box_iou(Box const& a, Box const& b) {
    int const ix0 = std::max(a.x0, b.x0);
    int const iy0 = std::max(a.y0, b.y0);
    int const ix1 = std::min(a.x1, b.x1);
    int const iy1 = std::min(a.y1, b.y1);
    long long const inter =
        (ix1 > ix0 && iy1 > iy0) ? static_cast<long long>(ix1 - ix0) * (iy1 - iy0) : 0;
    long long const uni = a.area() + b.area() - inter;
    if (uni <= 0) {
        return 0.0;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height),
      values_(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0) {
    if (width < 0 || height < 0) {
        throw ArgumentError("mask dimensions must be non-negative");
    }
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width < 0 || height < 0 ||
        values_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ArgumentError("mask buffer does not match its dimensions");
    }
    for (auto& v : values_) {
        v = v ? 1 : 0;
    }
}

std::size_t BinaryMask::area() const {
    return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

std::optional<Box> bounding_box(BinaryMask const& mask) {
    int x0 = mask.width(), y0 = mask.height(), x1 = -1, y1 = -1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask(x, y)) {
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x);
                y1 = std::max(y1, y);
            }
        }
    }
    if (x1 < 0) {
        return std::nullopt;
    }
    return Box{x0, y0, x1 + 1, y1 + 1};
}

std::size_t intersection_area(BinaryMask const& a, BinaryMask const& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw ArgumentError("mask dimensions differ");
    }
    auto const va = a.values();
    auto const vb = b.values();
    std::size_t n = 0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        n += static_cast<std::size_t>(va[i] & vb[i]);
    }
    return n;
}

void ImageFrame::validate() const {
    if (width <= 0 || height <= 0) {
        throw ValidationError("image '" + id + "' has non-positive dimensions");
    }
    if (channels != 3) {
        throw ValidationError("image '" + id + "' must have 3 channels");
    }
    if (pixels.size() != static_cast<std::size_t>(width) * height * channels) {
        throw ValidationError("image '" + id + "' pixel buffer does not match H*W*C");
    }
}

ImageFrame make_frame(std::string id, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw ArgumentError("frame dimensions must be positive");
    }
    ImageFrame f;
    f.id = std::move(id);
    f.width = width;
    f.height = height;
    f.pixels.assign(static_cast<std::size_t>(width) * height * 3, 0);
    return f;
}

} // namespace segkit
