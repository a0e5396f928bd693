#include "segkit/toy_encoder.hpp"

#include "segkit/error.hpp"

#include <algorithm>

namespace segkit {

ToyEncoder::ToyEncoder(int stride) : stride_(stride) {
    if (stride < 1) {
        throw ArgumentError("toy encoder stride must be at least 1");
    }
}

FeatureMap ToyEncoder::encode(ImageFrame const& frame) const {
    frame.validate();
    int const fh = std::max(1, frame.height / stride_);
    int const fw = std::max(1, frame.width / stride_);
    std::size_t const plane = static_cast<std::size_t>(fh) * fw;
    std::vector<double> sums(3 * plane, 0.0);
    std::vector<double> counts(plane, 0.0);
    for (int y = 0; y < frame.height; ++y) {
        int const r = std::min(fh - 1, static_cast<int>(static_cast<long long>(y) * fh / frame.height));
        for (int x = 0; x < frame.width; ++x) {
            int const c = std::min(fw - 1, static_cast<int>(static_cast<long long>(x) * fw / frame.width));
            std::size_t const cell = static_cast<std::size_t>(r) * fw + c;
            counts[cell] += 1.0;
            for (int ch = 0; ch < 3; ++ch) {
                sums[ch * plane + cell] += frame.at(x, y, ch);
            }
        }
    }
    std::vector<float> values(kChannels * plane);
    for (std::size_t cell = 0; cell < plane; ++cell) {
        for (int ch = 0; ch < 3; ++ch) {
            double const mean = sums[ch * plane + cell] / counts[cell];
            values[ch * plane + cell] = static_cast<float>(mean / 127.5 - 1.0);
        }
        auto const r = static_cast<double>(cell / static_cast<std::size_t>(fw));
        auto const c = static_cast<double>(cell % static_cast<std::size_t>(fw));
        values[3 * plane + cell] = static_cast<float>((c + 0.5) / fw * 2.0 - 1.0);
        values[4 * plane + cell] = static_cast<float>((r + 0.5) / fh * 2.0 - 1.0);
    }
    return FeatureMap(frame.id, kChannels, fh, fw, std::move(values), FeatureSource::toy_encoder);
}

} // namespace segkit
