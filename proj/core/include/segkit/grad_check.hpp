#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace segkit {

/// Scalar function of a parameter vector. When `gradient` is non-null the
/// function also writes its analytic gradient there.
using DifferentiableFn = std::function<double(std::span<double const> x, std::vector<double>* gradient)>;

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_coordinate = 0;
};

/// Compares the analytic gradient against central finite differences. The
/// per-coordinate error is |a - f| / max(1, |a|, |f|); the maximum is returned.
/// Throws Error naming the coordinate when a probe is not finite.
GradCheckResult grad_check(DifferentiableFn const& fn, std::span<double const> point,
                           double step = 1e-5);

} // namespace segkit
