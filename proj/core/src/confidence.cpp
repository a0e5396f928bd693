#include "segkit/confidence.hpp"

#include "segkit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace segkit {

double cosine_similarity(std::span<double const> a, std::span<double const> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

MaskEmbedding mask_pooled_embedding(FeatureMap const& features, InstanceMask const& mask) {
    auto const& m = mask.mask;
    if (m.width() <= 0 || m.height() <= 0) {
        throw ArgumentError("mask '" + mask.instance_id + "' has an empty canvas");
    }
    int const fh = features.fh(), fw = features.fw(), channels = features.channels();
    std::vector<double> sum(static_cast<std::size_t>(channels), 0.0);
    std::size_t count = 0;
    for (int r = 0; r < fh; ++r) {
        int const y = std::min(m.height() - 1, static_cast<int>(((2LL * r + 1) * m.height()) / (2LL * fh)));
        for (int c = 0; c < fw; ++c) {
            int const x = std::min(m.width() - 1, static_cast<int>(((2LL * c + 1) * m.width()) / (2LL * fw)));
            if (!m(x, y)) continue;
            ++count;
            for (int ch = 0; ch < channels; ++ch) {
                sum[static_cast<std::size_t>(ch)] += features.at(ch, r, c);
            }
        }
    }
    if (count == 0) {
        double cx = 0.0, cy = 0.0;
        std::size_t n = 0;
        for (int y = 0; y < m.height(); ++y) {
            for (int x = 0; x < m.width(); ++x) {
                if (m(x, y)) {
                    cx += x + 0.5;
                    cy += y + 0.5;
                    ++n;
                }
            }
        }
        if (n == 0) {
            // empty mask: fall back to the canvas center
            cx = m.width() / 2.0;
            cy = m.height() / 2.0;
        } else {
            cx /= static_cast<double>(n);
            cy /= static_cast<double>(n);
        }
        int const r = features.row_of(cy, m.height());
        int const c = features.col_of(cx, m.width());
        return {features.cell(r, c), mask.instance_id};
    }
    for (auto& v : sum) {
        v /= static_cast<double>(count);
    }
    return {std::move(sum), mask.instance_id};
}

ConfidenceMap confidence_map(FeatureMap const& features, MaskEmbedding const& embedding) {
    if (embedding.vector.size() != static_cast<std::size_t>(features.channels())) {
        throw ArgumentError(fmt::format("embedding has {} channels, feature map has {}",
                                        embedding.vector.size(), features.channels()));
    }
    ConfidenceMap map;
    map.fh = features.fh();
    map.fw = features.fw();
    map.values.resize(static_cast<std::size_t>(map.fh) * map.fw);
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < map.fh; ++r) {
        for (int c = 0; c < map.fw; ++c) {
            auto const cell = features.cell(r, c);
            double const s = cosine_similarity(cell, embedding.vector);
            map.values[static_cast<std::size_t>(r) * map.fw + c] = s;
            if (s > best) {
                best = s;
                map.argmax_cell = {r, c};
            }
        }
    }
    return map;
}

LocationPrior location_prior(ConfidenceMap const& map, int canvas_w, int canvas_h) {
    auto const [row, col] = map.argmax_cell;
    double const x = (col + 0.5) * canvas_w / map.fw - 0.5;
    double const y = (row + 0.5) * canvas_h / map.fh - 0.5;
    LocationPrior p;
    p.x = std::clamp(static_cast<int>(std::round(x)), 0, canvas_w - 1);
    p.y = std::clamp(static_cast<int>(std::round(y)), 0, canvas_h - 1);
    p.confidence = map.at(row, col);
    return p;
}

} // namespace segkit
