#pragma once

#include "segkit/grad_check.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace segkit {

struct LossCheck {
    std::string name;
    GradCheckResult result;
};

/// Finite-difference checks of every analytic loss gradient at one random
/// point: dice, focal, binary cross-entropy, classifier cross-entropy (w.r.t.
/// the classifier weights and bias) and the full head loss (w.r.t. all head
/// parameters). Deterministic for a seed.
std::vector<LossCheck> check_loss_gradients(std::uint64_t seed);

/// Dice with its analytic gradient negated, at a point where the true gradient
/// is large; a working harness reports an error of at least 0.5.
LossCheck sign_flipped_dice_check(std::uint64_t seed);

} // namespace segkit
