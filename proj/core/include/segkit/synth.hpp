#pragma once

#include "segkit/dataset.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace segkit {

enum class ShapeKind { rectangle, ellipse };

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(Rgb const&, Rgb const&) = default;
};

struct Shape {
    ShapeKind kind = ShapeKind::rectangle;
    Box box;
    std::size_t label = 0;
    Rgb color;
};

/// Pixels covered by a shape. Ellipses are inscribed in their box and a
/// pixel is inside when its center is.
BinaryMask rasterize(Shape const& shape, int width, int height);

/// Visible region of each shape when painted in order (later shapes on top).
std::vector<BinaryMask> rasterize_visible(std::span<Shape const> shapes, int width, int height);

/// Base color of class `label`; the first eight are the RGB cube corners.
Rgb class_color(std::size_t label);

struct SynthConfig {
    std::size_t image_count = 64;
    int width = 128;
    int height = 128;
    ClassTable class_table = ClassTable::toy(8);
    std::size_t min_shapes = 2;
    std::size_t max_shapes = 4;
    int min_extent = 24; ///< shape box side bounds, pixels
    int max_extent = 56;
    std::size_t min_visible_area = 200; ///< redraw a shape whose visible part is smaller
    int color_jitter = 16;
    int pixel_noise = 6;
    std::uint64_t seed = 7;
    std::string id_prefix = "img";
    std::size_t max_attempts = 200;
};

/// Deterministic synthetic dataset: each image holds distinct-class
/// rectangles and ellipses on a gray background with z-order occlusion.
/// Masks are the visible regions and are pairwise disjoint.
Manifest synth_generate(SynthConfig const& config);

} // namespace segkit
