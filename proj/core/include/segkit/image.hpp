#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace segkit {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(Point const&, Point const&) = default;
};

struct Canvas {
    int width = 0;
    int height = 0;

    bool contains(Point p) const {
        return p.x >= 0.0 && p.y >= 0.0 && p.x < width && p.y < height;
    }
    friend bool operator==(Canvas const&, Canvas const&) = default;
};

/// Axis-aligned box with exclusive upper corner: [x0, x1) x [y0, y1).
struct Box {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    long long area() const {
        return static_cast<long long>(x1 - x0) * static_cast<long long>(y1 - y0);
    }
    friend bool operator==(Box const&, Box const&) = default;
};

double box_iou(Box const& a, Box const& b);

/// Single-channel mask with values in {0, 1}, row-major.
class BinaryMask {
  public:
    BinaryMask() = default;
    BinaryMask(int width, int height);
    BinaryMask(int width, int height, std::vector<std::uint8_t> values);

    int width() const { return width_; }
    int height() const { return height_; }
    Canvas canvas() const { return {width_, height_}; }

    std::uint8_t operator()(int x, int y) const {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }
    std::uint8_t& operator()(int x, int y) {
        return values_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::span<std::uint8_t const> values() const { return values_; }
    std::span<std::uint8_t> values() { return values_; }

    std::size_t area() const;
    bool empty() const { return area() == 0; }

    friend bool operator==(BinaryMask const&, BinaryMask const&) = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> values_;
};

/// Tight bounding box of the foreground, or nullopt for an empty mask.
std::optional<Box> bounding_box(BinaryMask const& mask);

std::size_t intersection_area(BinaryMask const& a, BinaryMask const& b);

/// 8-bit interleaved RGB frame.
struct ImageFrame {
    std::string id;
    int width = 0;
    int height = 0;
    int channels = 3;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    Canvas canvas() const { return {width, height}; }

    /// Throws ValidationError when the frame violates its shape invariants.
    void validate() const;

    friend bool operator==(ImageFrame const&, ImageFrame const&) = default;
};

ImageFrame make_frame(std::string id, int width, int height);

} // namespace segkit
