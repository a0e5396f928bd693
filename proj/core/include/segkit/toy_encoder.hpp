#pragma once

#include "segkit/feature_map.hpp"

namespace segkit {

/// Desk-scale stand-in for a pretrained image encoder. Produces five channels
/// per cell: box-averaged R, G, B mapped to [-1, 1], then the cell center's
/// x and y mapped to [-1, 1].
class ToyEncoder final : public FeatureProvider {
  public:
    static constexpr int kChannels = 5;

    explicit ToyEncoder(int stride = 1);

    FeatureMap encode(ImageFrame const& frame) const;
    FeatureMap features_for(ImageRecord const& image) const override { return encode(image.frame); }

    int stride() const { return stride_; }

  private:
    int stride_;
};

} // namespace segkit
