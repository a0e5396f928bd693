#include "segkit/error.hpp"
#include "segkit/grad_check.hpp"
#include "segkit/loss_checks.hpp"
#include "segkit/losses.hpp"
#include "segkit/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace segkit;

namespace {

using Bits = std::vector<std::uint8_t>;
using Reals = std::vector<double>;

} // namespace

TEST(Dice, PerfectPredictionIsZero) {
    Bits const g{1, 0, 1, 1, 0};
    Reals const p{1, 0, 1, 1, 0};
    EXPECT_LE(dice_loss(p, g).value, 1e-6);
}

TEST(Dice, DisjointIsOne) {
    EXPECT_NEAR(dice_loss(Reals{1, 1, 0, 0}, Bits{0, 0, 1, 1}).value, 1.0, 1e-6);
}

TEST(Dice, TwoTwoOneOverlapIsHalf) {
    // |pred| = 2, |gt| = 2, overlap 1
    EXPECT_NEAR(dice_loss(Reals{1, 1, 0}, Bits{0, 1, 1}).value, 0.5, 1e-6);
}

TEST(Dice, BoundedOnRandomInputs) {
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        Reals p(20);
        Bits g(20);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = rng.uniform();
            g[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
        }
        double const v = dice_loss(p, g).value;
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 2e-6);
    }
}

TEST(Dice, ShapeMismatchIsArgumentError) {
    EXPECT_THROW(dice_loss(Reals{0.5}, Bits{1, 0}), ArgumentError);
    EXPECT_THROW(focal_loss(Reals{0.5}, Bits{1, 0}), ArgumentError);
}

TEST(Focal, HalfProbabilityPositivePixel) {
    EXPECT_NEAR(focal_loss(Reals{0.5}, Bits{1}).value, 0.043322, 1e-6);
    EXPECT_NEAR(focal_loss(Reals{0.5}, Bits{1}).value, 0.25 * 0.25 * std::log(2.0), 1e-15);
}

TEST(Focal, GammaZeroHalfAlphaIsHalfBce) {
    Rng rng(2);
    for (int t = 0; t < 100; ++t) {
        Reals p(16);
        Bits g(16);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = rng.uniform();
            g[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 1));
        }
        EXPECT_NEAR(focal_loss(p, g, 0.5, 0.0).value, 0.5 * binary_cross_entropy(p, g).value, 1e-9);
    }
}

TEST(Focal, ConfidentCorrectApproachesZero) {
    EXPECT_LT(focal_loss(Reals{1.0, 0.0, 1.0 - 1e-9}, Bits{1, 0, 1}).value, 1e-12);
}

TEST(Focal, SaturatedProbabilitiesStayFinite) {
    auto const v = focal_loss(Reals{0.0, 1.0}, Bits{1, 0});
    EXPECT_TRUE(std::isfinite(v.value));
    for (double g : v.gradient) EXPECT_TRUE(std::isfinite(g));
}

TEST(CrossEntropy, Uniform54) {
    Reals const logits(54, 0.3);
    EXPECT_NEAR(cross_entropy(logits, 17).value, 3.98898, 1e-5);
    EXPECT_NEAR(cross_entropy(logits, 17).value, std::log(54.0), 1e-12);
}

TEST(CrossEntropy, TwoClassZeroLogits) {
    EXPECT_NEAR(cross_entropy(Reals{0, 0}, 0).value, 0.693147, 1e-6);
}

TEST(CrossEntropy, HugeMarginIsNearZero) {
    EXPECT_LT(cross_entropy(Reals{-50, 60, -50}, 1).value, 1e-6);
}

TEST(CrossEntropy, ShiftInvariantAndStable) {
    Reals const a{0.3, -1.2, 2.5, 0.0};
    Reals b = a;
    for (auto& v : b) v += 1000.0;
    EXPECT_NEAR(cross_entropy(a, 2).value, cross_entropy(b, 2).value, 1e-9);
}

TEST(CrossEntropy, LabelOutOfRange) { EXPECT_THROW(cross_entropy(Reals{0, 0}, 2), ArgumentError); }

TEST(Combined, WeightedSum) {
    EXPECT_NEAR(combined_loss(0.1, 0.2, 0.3), 0.6, 1e-15);
    EXPECT_DOUBLE_EQ(combined_loss(0.1, 0.2, 0.3, {0, 0, 1}), 0.3);
    EXPECT_DOUBLE_EQ(combined_loss(0, 0, 0), 0.0);
    auto const r = make_loss_report(0.4, 0.5, 0.6, {2, 0.5, 1});
    EXPECT_NEAR(r.total, 2 * 0.4 + 0.5 * 0.5 + 0.6, 1e-9);
}

TEST(GradCheck, AllLossesPassOverHundredSeeds) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (auto const& c : check_loss_gradients(seed)) {
            ASSERT_LT(c.result.max_rel_error, 1e-6) << c.name << " seed " << seed;
        }
    }
}

TEST(GradCheck, SignFlipIsFlagged) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_GE(sign_flipped_dice_check(seed).result.max_rel_error, 0.5);
    }
}

TEST(GradCheck, QuadraticIsExact) {
    DifferentiableFn fn = [](std::span<double const> x, std::vector<double>* g) {
        if (g) *g = {2 * x[0], 6 * x[1]};
        return x[0] * x[0] + 3 * x[1] * x[1];
    };
    Reals const at{1.5, -0.25};
    EXPECT_LT(grad_check(fn, at).max_rel_error, 1e-9);
}

TEST(GradCheck, NonFiniteProbeNamesCoordinate) {
    DifferentiableFn fn = [](std::span<double const> x, std::vector<double>* g) {
        if (g) *g = {0.0, 1.0 / (2.0 * std::sqrt(x[1]))};
        return std::sqrt(x[1]);
    };
    Reals const at{1.0, 0.0};
    try {
        grad_check(fn, at);
        FAIL() << "expected an error";
    } catch (Error const& e) {
        EXPECT_NE(std::string(e.what()).find("coordinate 1"), std::string::npos) << e.what();
    }
}
