#include "segkit/synth.hpp"

#include "segkit/error.hpp"
#include "segkit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace segkit {

BinaryMask rasterize(Shape const& shape, int width, int height) {
    BinaryMask m(width, height);
    auto const& b = shape.box;
    int const x0 = std::max(b.x0, 0), x1 = std::min(b.x1, width);
    int const y0 = std::max(b.y0, 0), y1 = std::min(b.y1, height);
    double const cx = 0.5 * (b.x0 + b.x1), cy = 0.5 * (b.y0 + b.y1);
    double const rx = 0.5 * (b.x1 - b.x0), ry = 0.5 * (b.y1 - b.y0);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (shape.kind == ShapeKind::rectangle) {
                m(x, y) = 1;
            } else {
                double const dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
                m(x, y) = (dx * dx + dy * dy <= 1.0) ? 1 : 0;
            }
        }
    }
    return m;
}

std::vector<BinaryMask> rasterize_visible(std::span<Shape const> shapes, int width, int height) {
    // owner[p] = index of the top-most shape covering p, or -1
    std::vector<int> owner(static_cast<std::size_t>(width) * height, -1);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        auto const cover = rasterize(shapes[i], width, height);
        auto const v = cover.values();
        for (std::size_t p = 0; p < v.size(); ++p) {
            if (v[p]) owner[p] = static_cast<int>(i);
        }
    }
    std::vector<BinaryMask> out(shapes.size(), BinaryMask(width, height));
    for (std::size_t p = 0; p < owner.size(); ++p) {
        if (owner[p] >= 0) {
            out[static_cast<std::size_t>(owner[p])].values()[p] = 1;
        }
    }
    return out;
}

Rgb class_color(std::size_t label) {
    static constexpr std::array<Rgb, 8> corners{{{0, 0, 0},
                                                 {255, 0, 0},
                                                 {0, 255, 0},
                                                 {0, 0, 255},
                                                 {255, 255, 0},
                                                 {255, 0, 255},
                                                 {0, 255, 255},
                                                 {255, 255, 255}}};
    if (label < corners.size()) {
        return corners[label];
    }
    // Remaining colors walk a 4-level lattice, skipping near-gray entries.
    static constexpr std::uint8_t levels[] = {0, 85, 170, 255};
    std::size_t k = label - corners.size();
    for (int r = 0; r < 4; ++r) {
        for (int g = 0; g < 4; ++g) {
            for (int b = 0; b < 4; ++b) {
                bool const corner = (r % 3 == 0) && (g % 3 == 0) && (b % 3 == 0);
                bool const grayish = (r == g && g == b);
                if (corner || grayish) continue;
                if (k-- == 0) return {levels[r], levels[g], levels[b]};
            }
        }
    }
    return {static_cast<std::uint8_t>(label * 37 % 256), static_cast<std::uint8_t>(label * 91 % 256),
            static_cast<std::uint8_t>(label * 53 % 256)};
}

namespace {

std::uint8_t jitter(std::uint8_t base, int amount, Rng& rng) {
    if (amount <= 0) return base;
    long long const v = base + rng.uniform_int(-amount, amount);
    return static_cast<std::uint8_t>(std::clamp(v, 0LL, 255LL));
}

void check_config(SynthConfig const& c) {
    if (c.width <= 0 || c.height <= 0) {
        throw GenerationError("synthetic canvas must be positive");
    }
    if (c.class_table.empty()) {
        throw GenerationError("synthetic class table is empty");
    }
    if (c.min_shapes > c.max_shapes) {
        throw GenerationError("min_shapes exceeds max_shapes");
    }
    if (c.max_shapes > c.class_table.size()) {
        throw GenerationError(fmt::format("{} shapes per image need at least that many classes, "
                                          "table has {}",
                                          c.max_shapes, c.class_table.size()));
    }
    if (c.min_extent < 1 || c.min_extent > c.max_extent || c.max_extent > std::min(c.width, c.height)) {
        throw GenerationError("shape extents do not fit the canvas");
    }
    auto const canvas = static_cast<std::size_t>(c.width) * c.height;
    if (c.max_shapes * c.min_visible_area > canvas) {
        throw GenerationError(fmt::format("{} shapes of at least {} visible pixels do not fit a "
                                          "{}x{} canvas",
                                          c.max_shapes, c.min_visible_area, c.width, c.height));
    }
}

Shape random_shape(SynthConfig const& c, std::size_t label, Rng& rng) {
    Shape s;
    s.kind = rng.uniform_int(0, 1) == 0 ? ShapeKind::rectangle : ShapeKind::ellipse;
    int const w = static_cast<int>(rng.uniform_int(c.min_extent, c.max_extent));
    int const h = static_cast<int>(rng.uniform_int(c.min_extent, c.max_extent));
    int const x0 = static_cast<int>(rng.uniform_int(0, c.width - w));
    int const y0 = static_cast<int>(rng.uniform_int(0, c.height - h));
    s.box = {x0, y0, x0 + w, y0 + h};
    s.label = label;
    auto const base = class_color(label);
    s.color = {jitter(base.r, c.color_jitter, rng), jitter(base.g, c.color_jitter, rng),
               jitter(base.b, c.color_jitter, rng)};
    return s;
}

} // namespace

Manifest synth_generate(SynthConfig const& config) {
    check_config(config);
    Rng rng(config.seed);
    Manifest m;
    m.class_table = config.class_table;

    for (std::size_t i = 0; i < config.image_count; ++i) {
        auto const id = fmt::format("{}{:04d}", config.id_prefix, i);
        auto const count = static_cast<std::size_t>(rng.uniform_int(
            static_cast<long long>(config.min_shapes), static_cast<long long>(config.max_shapes)));

        // distinct classes per image: partial Fisher-Yates
        std::vector<std::size_t> labels(config.class_table.size());
        std::iota(labels.begin(), labels.end(), std::size_t{0});
        for (std::size_t k = 0; k < count; ++k) {
            auto const j = static_cast<std::size_t>(
                rng.uniform_int(static_cast<long long>(k), static_cast<long long>(labels.size() - 1)));
            std::swap(labels[k], labels[j]);
        }

        std::vector<Shape> shapes;
        std::vector<BinaryMask> visible;
        for (std::size_t k = 0; k < count; ++k) {
            bool placed = false;
            for (std::size_t attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
                auto trial = shapes;
                trial.push_back(random_shape(config, labels[k], rng));
                auto vis = rasterize_visible(trial, config.width, config.height);
                bool const ok = std::all_of(vis.begin(), vis.end(), [&](BinaryMask const& v) {
                    return v.area() >= config.min_visible_area;
                });
                if (ok) {
                    shapes = std::move(trial);
                    visible = std::move(vis);
                    placed = true;
                }
            }
            if (!placed) {
                throw GenerationError(fmt::format("could not place shape {} of image '{}' after {} "
                                                  "attempts",
                                                  k, id, config.max_attempts));
            }
        }

        ImageFrame frame = make_frame(id, config.width, config.height);
        for (int y = 0; y < config.height; ++y) {
            for (int x = 0; x < config.width; ++x) {
                frame.at(x, y, 0) = frame.at(x, y, 1) = frame.at(x, y, 2) = 128;
            }
        }
        for (std::size_t k = 0; k < shapes.size(); ++k) {
            auto const v = visible[k].values();
            for (std::size_t p = 0; p < v.size(); ++p) {
                if (!v[p]) continue;
                frame.pixels[p * 3 + 0] = shapes[k].color.r;
                frame.pixels[p * 3 + 1] = shapes[k].color.g;
                frame.pixels[p * 3 + 2] = shapes[k].color.b;
            }
        }
        for (auto& px : frame.pixels) {
            px = jitter(px, config.pixel_noise, rng);
        }

        ImageRecord rec;
        rec.frame = std::move(frame);
        for (std::size_t k = 0; k < shapes.size(); ++k) {
            InstanceMask im;
            im.mask = std::move(visible[k]);
            im.label = shapes[k].label;
            im.instance_id = fmt::format("{}_{}", id, k);
            rec.masks.push_back(std::move(im));
        }
        m.images.push_back(std::move(rec));
    }
    return m;
}

} // namespace segkit
