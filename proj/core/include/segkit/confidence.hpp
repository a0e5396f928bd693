#pragma once

#include "segkit/dataset.hpp"
#include "segkit/feature_map.hpp"

#include <span>
#include <string>
#include <vector>

namespace segkit {

struct MaskEmbedding {
    std::vector<double> vector;
    std::string source_instance;
};

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(Cell const&, Cell const&) = default;
};

struct ConfidenceMap {
    int fh = 0;
    int fw = 0;
    std::vector<double> values; ///< row-major, each in [-1, 1]
    Cell argmax_cell;

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * fw + col]; }
};

struct LocationPrior {
    int x = 0;
    int y = 0;
    double confidence = 0.0;
};

double cosine_similarity(std::span<double const> a, std::span<double const> b);

/// Average feature vector over the mask's foreground cells. The mask is
/// sampled at cell centers; if that empties it, the cell nearest the mask
/// centroid is used instead.
MaskEmbedding mask_pooled_embedding(FeatureMap const& features, InstanceMask const& mask);

/// Per-cell cosine similarity to the embedding. Zero-norm cells score 0;
/// ties in the argmax go to the lowest row-major cell.
ConfidenceMap confidence_map(FeatureMap const& features, MaskEmbedding const& embedding);

/// Maps the argmax cell center onto the canvas, rounding half away from zero.
LocationPrior location_prior(ConfidenceMap const& map, int canvas_w, int canvas_h);

} // namespace segkit
