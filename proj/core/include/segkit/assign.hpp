#pragma once

#include "segkit/confidence.hpp"
#include "segkit/grid.hpp"

#include <vector>

namespace segkit {

/// Location prior of one ground-truth mask: pooled embedding, confidence map,
/// argmax mapped to the canvas.
LocationPrior mask_location_prior(FeatureMap const& features, InstanceMask const& mask,
                                  Canvas canvas);

/// Prompt point for one mask: its location prior snapped to the grid.
Assignment assign_mask(FeatureMap const& features, InstanceMask const& mask,
                       PointGrid const& grid);

/// One assignment per mask, in manifest order. Every image must share the
/// grid's canvas.
std::vector<Assignment> assign_dataset(Manifest const& manifest, FeatureProvider const& features,
                                       PointGrid const& grid, unsigned threads = 1);

} // namespace segkit
