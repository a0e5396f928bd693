#include "segkit/postprocess.hpp"

#include "segkit/error.hpp"

#include "json.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace segkit {

void FilterConfig::validate() const {
    if (pred_iou_threshold < 0.0 || pred_iou_threshold > 1.0) {
        throw ArgumentError("pred_iou_threshold must lie in [0, 1]");
    }
    if (box_iou_cutoff < 0.0) {
        throw ArgumentError("box_iou_cutoff must be non-negative");
    }
}

std::vector<MaskCandidate> threshold_by_pred_iou(std::vector<MaskCandidate> candidates,
                                                 double threshold) {
    std::erase_if(candidates, [&](MaskCandidate const& c) { return !(c.predicted_iou >= threshold); });
    return candidates;
}

std::vector<MaskCandidate> drop_empty(std::vector<MaskCandidate> candidates) {
    std::erase_if(candidates, [](MaskCandidate const& c) { return c.mask.empty(); });
    return candidates;
}

std::vector<MaskCandidate> box_nms(std::vector<MaskCandidate> candidates, double cutoff) {
    std::vector<Box> boxes;
    std::vector<std::size_t> areas;
    boxes.reserve(candidates.size());
    for (auto const& c : candidates) {
        auto box = bounding_box(c.mask);
        if (!box) {
            throw ArgumentError("box_nms requires non-empty masks");
        }
        boxes.push_back(*box);
        areas.push_back(c.mask.area());
    }
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (candidates[a].predicted_iou != candidates[b].predicted_iou) {
            return candidates[a].predicted_iou > candidates[b].predicted_iou;
        }
        if (areas[a] != areas[b]) {
            return areas[a] > areas[b];
        }
        return a < b;
    });
    std::vector<std::size_t> kept;
    for (auto idx : order) {
        bool const keep = std::all_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return box_iou(boxes[idx], boxes[k]) < cutoff;
        });
        if (keep) kept.push_back(idx);
    }
    std::vector<MaskCandidate> out;
    out.reserve(kept.size());
    for (auto idx : kept) {
        out.push_back(std::move(candidates[idx]));
    }
    return out;
}

namespace {

struct Run {
    int y, x0, x1; // [x0, x1)
};

/// Row runs of `value` with 8-connected component ids. Components are numbered
/// from 1 in raster order of their first pixel; areas[0] is unused.
struct RunLabels {
    std::vector<Run> runs;
    std::vector<int> label;
    std::vector<std::size_t> areas;
};

RunLabels label_runs(BinaryMask const& mask, std::uint8_t value) {
    int const w = mask.width(), h = mask.height();
    auto const v = mask.values();
    RunLabels out;
    std::vector<std::size_t> parent;
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    std::size_t prev_begin = 0, prev_end = 0;
    for (int y = 0; y < h; ++y) {
        std::size_t const row_begin = out.runs.size();
        auto const* row = v.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w;) {
            if (row[x] != value) {
                ++x;
                continue;
            }
            int const x0 = x;
            while (x < w && row[x] == value) ++x;
            std::size_t const id = out.runs.size();
            out.runs.push_back({y, x0, x});
            parent.push_back(id);
            for (std::size_t k = prev_begin; k < prev_end; ++k) {
                auto const& r = out.runs[k];
                if (r.x0 > x) break;
                if (r.x1 >= x0) {
                    auto const a = find(id), b = find(k);
                    if (a != b) parent[std::max(a, b)] = std::min(a, b);
                }
            }
        }
        prev_begin = row_begin;
        prev_end = out.runs.size();
    }
    out.label.resize(out.runs.size());
    out.areas.push_back(0);
    std::vector<int> root_label(out.runs.size(), 0);
    for (std::size_t i = 0; i < out.runs.size(); ++i) {
        auto const root = find(i);
        if (root_label[root] == 0) {
            root_label[root] = static_cast<int>(out.areas.size());
            out.areas.push_back(0);
        }
        out.label[i] = root_label[root];
        out.areas[static_cast<std::size_t>(out.label[i])] +=
            static_cast<std::size_t>(out.runs[i].x1 - out.runs[i].x0);
    }
    return out;
}

/// Flips every `value` component smaller than min_area.
void flip_small(BinaryMask& mask, std::uint8_t value, std::size_t min_area) {
    auto const rl = label_runs(mask, value);
    auto v = mask.values();
    auto const w = static_cast<std::size_t>(mask.width());
    std::uint8_t const flipped = value ? 0 : 1;
    for (std::size_t i = 0; i < rl.runs.size(); ++i) {
        if (rl.areas[static_cast<std::size_t>(rl.label[i])] >= min_area) continue;
        auto const& r = rl.runs[i];
        auto* row = v.data() + static_cast<std::size_t>(r.y) * w;
        std::fill(row + r.x0, row + r.x1, flipped);
    }
}

} // namespace

Components connected_components(BinaryMask const& mask, std::uint8_t value) {
    auto rl = label_runs(mask, value);
    auto const w = static_cast<std::size_t>(mask.width());
    Components cc;
    cc.labels.assign(w * static_cast<std::size_t>(mask.height()), 0);
    for (std::size_t i = 0; i < rl.runs.size(); ++i) {
        auto const& r = rl.runs[i];
        auto* row = cc.labels.data() + static_cast<std::size_t>(r.y) * w;
        std::fill(row + r.x0, row + r.x1, rl.label[i]);
    }
    cc.areas = std::move(rl.areas);
    return cc;
}

BinaryMask clean_regions(BinaryMask const& mask, std::size_t min_area) {
    BinaryMask out = mask;
    if (min_area == 0) {
        return out;
    }
    flip_small(out, 0, min_area);
    flip_small(out, 1, min_area);
    return out;
}

std::vector<MaskCandidate> run_pipeline(std::vector<MaskCandidate> candidates,
                                        FilterConfig const& config) {
    config.validate();
    auto kept = drop_empty(threshold_by_pred_iou(std::move(candidates), config.pred_iou_threshold));
    for (auto& c : kept) {
        c.mask = clean_regions(c.mask, config.min_region_area);
    }
    return box_nms(drop_empty(std::move(kept)), config.box_iou_cutoff);
}

MaskCountReport count_masks(std::string pipeline, std::span<std::size_t const> per_image_counts) {
    MaskCountReport r;
    r.pipeline = std::move(pipeline);
    r.per_image.assign(per_image_counts.begin(), per_image_counts.end());
    r.image_count = r.per_image.size();
    r.total = std::accumulate(r.per_image.begin(), r.per_image.end(), std::size_t{0});
    return r;
}

MaskCountReport count_masks(std::string pipeline,
                            std::span<std::vector<MaskCandidate> const> per_image) {
    std::vector<std::size_t> counts;
    counts.reserve(per_image.size());
    for (auto const& survivors : per_image) {
        counts.push_back(survivors.size());
    }
    return count_masks(std::move(pipeline), counts);
}

MaskCountReport mask_count_from_total(std::string pipeline, std::size_t total,
                                      std::size_t image_count) {
    MaskCountReport r;
    r.pipeline = std::move(pipeline);
    r.total = total;
    r.image_count = image_count;
    return r;
}

std::string render_mask_counts(std::span<MaskCountReport const> reports) {
    std::string out = fmt::format("{:<24}", "");
    for (auto const& r : reports) out += fmt::format(" {:>12}", r.pipeline);
    out += "\n";
    out += fmt::format("{:<24}", "Number of output masks");
    for (auto const& r : reports) out += fmt::format(" {:>12}", r.total);
    out += "\n";
    out += fmt::format("{:<24}", "Images");
    for (auto const& r : reports) out += fmt::format(" {:>12}", r.image_count);
    out += "\n";
    out += fmt::format("{:<24}", "Masks per image");
    for (auto const& r : reports) out += fmt::format(" {:>12.2f}", r.mean_per_image());
    out += "\n";
    if (!reports.empty() && reports.front().total > 0) {
        out += fmt::format("{:<24}", "Change vs first");
        auto const base = static_cast<double>(reports.front().total);
        for (auto const& r : reports) {
            out += fmt::format(" {:>11.1f}%", 100.0 * (static_cast<double>(r.total) - base) / base);
        }
        out += "\n";
    }
    return out;
}

std::string mask_counts_to_json(std::span<MaskCountReport const> reports) {
    auto arr = nlohmann::ordered_json::array();
    for (auto const& r : reports) {
        arr.push_back({{"pipeline", r.pipeline},
                       {"total", r.total},
                       {"image_count", r.image_count},
                       {"mean_per_image", r.mean_per_image()},
                       {"per_image", r.per_image}});
    }
    return nlohmann::ordered_json{{"pipelines", arr}}.dump(2) + "\n";
}

std::vector<MaskCountReport> mask_counts_from_json(std::string const& text) {
    std::vector<MaskCountReport> out;
    try {
        auto const doc = nlohmann::json::parse(text);
        for (auto const& j : doc.at("pipelines")) {
            MaskCountReport r;
            r.pipeline = j.at("pipeline").get<std::string>();
            r.total = j.at("total").get<std::size_t>();
            r.image_count = j.at("image_count").get<std::size_t>();
            if (j.contains("per_image")) {
                r.per_image = j.at("per_image").get<std::vector<std::size_t>>();
            }
            out.push_back(std::move(r));
        }
    } catch (nlohmann::json::exception const& e) {
        throw LoadError(std::string("malformed mask count report: ") + e.what());
    }
    return out;
}

} // namespace segkit
