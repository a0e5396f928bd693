#include "segkit/assign.hpp"

#include "segkit/error.hpp"
#include "segkit/parallel.hpp"

#include <fmt/format.h>


namespace segkit {

LocationPrior mask_location_prior(FeatureMap const& features, InstanceMask const& mask,
                                  Canvas canvas) {
    auto const embedding = mask_pooled_embedding(features, mask);
    auto const map = confidence_map(features, embedding);
    return location_prior(map, canvas.width, canvas.height);
}

Assignment assign_mask(FeatureMap const& features, InstanceMask const& mask,
                       PointGrid const& grid) {
    auto const prior = mask_location_prior(features, mask, grid.canvas());
    auto a = nearest_neighbour_assign({static_cast<double>(prior.x), static_cast<double>(prior.y)},
                                      grid);
    a.instance_id = mask.instance_id;
    return a;
}

std::vector<Assignment> assign_dataset(Manifest const& manifest, FeatureProvider const& features,
                                       PointGrid const& grid, unsigned threads) {
    std::vector<std::vector<Assignment>> per_image(manifest.images.size());
    parallel_for(manifest.images.size(), threads, [&](std::size_t i) {
        auto const& img = manifest.images[i];
        if (img.frame.canvas() != grid.canvas()) {
            throw ArgumentError(fmt::format("image '{}' is {}x{} but the grid canvas is {}x{}",
                                            img.id(), img.frame.width, img.frame.height,
                                            grid.width(), grid.height()));
        }
        FeatureMap fmap;
        try {
            fmap = features.features_for(img);
        } catch (Error const& e) {
            throw LoadError("features for image '" + img.id() + "': " + e.what());
        }
        for (auto const& m : img.masks) {
            per_image[i].push_back(assign_mask(fmap, m, grid));
        }
    });
    std::vector<Assignment> out;
    for (auto& v : per_image) {
        for (auto& a : v) out.push_back(std::move(a));
    }
    return out;
}

} // namespace segkit
