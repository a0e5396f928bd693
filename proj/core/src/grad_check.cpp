#include "segkit/grad_check.hpp"

#include "segkit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace segkit {

GradCheckResult grad_check(DifferentiableFn const& fn, std::span<double const> point, double step) {
    std::vector<double> analytic;
    double const f0 = fn(point, &analytic);
    if (!std::isfinite(f0)) {
        throw Error("loss is not finite at the base point");
    }
    if (analytic.size() != point.size()) {
        throw ArgumentError(fmt::format("analytic gradient has {} entries for {} parameters",
                                        analytic.size(), point.size()));
    }
    std::vector<double> x(point.begin(), point.end());
    GradCheckResult result;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double const saved = x[i];
        x[i] = saved + step;
        double const fp = fn(x, nullptr);
        x[i] = saved - step;
        double const fm = fn(x, nullptr);
        x[i] = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw Error(fmt::format("loss is not finite when probing coordinate {}", i));
        }
        double const numeric = (fp - fm) / (2.0 * step);
        double const a = analytic[i];
        double const err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
        if (err > result.max_rel_error) {
            result.max_rel_error = err;
            result.worst_coordinate = i;
        }
    }
    return result;
}

} // namespace segkit
