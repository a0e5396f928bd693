#include "segkit/postprocess.hpp"
#include "segkit/random.hpp"

#include <algorithm>

#include "pipeline_case.hpp"
#include "test_util.hpp"

using namespace segkit;
using segkit::testing::rect_mask;

namespace {

MaskCandidate cand(double pred_iou, BinaryMask mask, double tag) {
    MaskCandidate c;
    c.mask = std::move(mask);
    c.predicted_iou = pred_iou;
    c.prompt_point = {tag, 0};
    return c;
}

std::vector<double> tags(std::vector<MaskCandidate> const& cs) {
    std::vector<double> out;
    for (auto const& c : cs) out.push_back(c.prompt_point.x);
    return out;
}

void paint(BinaryMask& m, int x0, int y0, int x1, int y1, std::uint8_t v) {
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) m(x, y) = v;
    }
}

BinaryMask random_mask(Rng& rng, int w, int h) {
    BinaryMask m(w, h);
    double const density = rng.uniform(0.1, 0.9);
    for (auto& v : m.values()) v = rng.uniform() < density ? 1 : 0;
    // a few solid blocks so components of many sizes appear
    for (int k = 0; k < 4; ++k) {
        int const x0 = static_cast<int>(rng.uniform_int(0, w - 1));
        int const y0 = static_cast<int>(rng.uniform_int(0, h - 1));
        paint(m, x0, y0, std::min(w, x0 + static_cast<int>(rng.uniform_int(1, 16))),
              std::min(h, y0 + static_cast<int>(rng.uniform_int(1, 16))), static_cast<std::uint8_t>(k % 2));
    }
    return m;
}

} // namespace

TEST(Threshold, KeepsAtOrAbove) {
    std::vector<MaskCandidate> c{cand(0.2, BinaryMask(2, 2), 0), cand(0.3, BinaryMask(2, 2), 1),
                                 cand(0.9, BinaryMask(2, 2), 2)};
    EXPECT_EQ(tags(threshold_by_pred_iou(c, 0.3)), (std::vector<double>{1, 2}));
    EXPECT_EQ(threshold_by_pred_iou(c, 0.0).size(), 3u);
    EXPECT_TRUE(threshold_by_pred_iou({}, {}).empty());
}

TEST(BoxIou, HandCases) {
    EXPECT_DOUBLE_EQ(box_iou({0, 0, 10, 10}, {5, 0, 15, 10}), 50.0 / 150.0);
    EXPECT_DOUBLE_EQ(box_iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
    EXPECT_DOUBLE_EQ(box_iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
}

TEST(BoxNms, IdenticalBoxesKeepHigherScore) {
    std::vector<MaskCandidate> c{cand(0.8, rect_mask(20, 20, 0, 0, 10, 10), 0),
                                 cand(0.9, rect_mask(20, 20, 0, 0, 10, 10), 1)};
    EXPECT_EQ(tags(box_nms(c, 0.3)), (std::vector<double>{1}));
}

TEST(BoxNms, DisjointBoxesBothSurvive) {
    std::vector<MaskCandidate> c{cand(0.8, rect_mask(20, 20, 0, 0, 5, 5), 0),
                                 cand(0.9, rect_mask(20, 20, 10, 10, 20, 20), 1)};
    EXPECT_EQ(box_nms(c, 0.3).size(), 2u);
}

TEST(BoxNms, ThirdOverlapSuppressedAtPointThree) {
    std::vector<MaskCandidate> c{cand(0.9, rect_mask(20, 20, 0, 0, 10, 10), 0),
                                 cand(0.8, rect_mask(20, 20, 5, 0, 15, 10), 1)};
    EXPECT_EQ(tags(box_nms(c, 0.3)), (std::vector<double>{0}));
    EXPECT_EQ(box_nms(c, 0.34).size(), 2u);
}

TEST(BoxNms, TiesBreakByAreaThenIndex) {
    std::vector<MaskCandidate> c{cand(0.5, rect_mask(20, 20, 0, 0, 8, 8), 0),
                                 cand(0.5, rect_mask(20, 20, 0, 0, 9, 9), 1),
                                 cand(0.5, rect_mask(20, 20, 0, 0, 9, 9), 2)};
    EXPECT_EQ(tags(box_nms(c, 0.3)), (std::vector<double>{1}));
}

TEST(BoxNms, KeptPairsBelowCutoff) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<MaskCandidate> c;
        for (int i = 0; i < 30; ++i) {
            int const x0 = static_cast<int>(rng.uniform_int(0, 50));
            int const y0 = static_cast<int>(rng.uniform_int(0, 50));
            int const x1 = x0 + static_cast<int>(rng.uniform_int(1, 14));
            int const y1 = y0 + static_cast<int>(rng.uniform_int(1, 14));
            c.push_back(cand(rng.uniform(), rect_mask(64, 64, x0, y0, x1, y1), i));
        }
        double const cutoff = rng.uniform(0.1, 0.9);
        auto const kept = box_nms(c, cutoff);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j) {
                EXPECT_LT(box_iou(*bounding_box(kept[i].mask), *bounding_box(kept[j].mask)), cutoff);
            }
        }
    }
}

TEST(CleanRegions, RemovesSmallIsland) {
    auto m = rect_mask(40, 40, 0, 0, 20, 10); // 200 px
    paint(m, 30, 30, 40, 40, 1);              // 100 px island
    auto const out = clean_regions(m, 150);
    EXPECT_EQ(out, rect_mask(40, 40, 0, 0, 20, 10));
}

TEST(CleanRegions, FillsSmallHole) {
    auto m = rect_mask(40, 40, 5, 5, 35, 35);
    paint(m, 15, 15, 25, 25, 0); // 100 px hole
    EXPECT_EQ(clean_regions(m, 150), rect_mask(40, 40, 5, 5, 35, 35));
}

TEST(CleanRegions, ExactlyMinAreaIsKept) {
    auto const m = rect_mask(40, 40, 0, 0, 15, 10); // 150 px
    EXPECT_EQ(clean_regions(m, 150), m);
}

TEST(CleanRegions, DiagonalPixelsAreConnected) {
    BinaryMask m(6, 6);
    m(0, 0) = m(1, 1) = m(2, 2) = 1;
    EXPECT_EQ(clean_regions(m, 3), m);
    EXPECT_TRUE(clean_regions(m, 4).empty());
}

TEST(CleanRegions, Idempotent) {
    Rng rng(12);
    for (int t = 0; t < 1000; ++t) {
        auto const m = random_mask(rng, 32, 32);
        auto const area = static_cast<std::size_t>(rng.uniform_int(0, 60));
        auto const once = clean_regions(m, area);
        ASSERT_EQ(clean_regions(once, area), once) << "trial " << t;
    }
}

TEST(Components, EightConnectedLabels) {
    BinaryMask m(5, 3, {1, 0, 0, 0, 1,
                        0, 1, 0, 0, 1,
                        0, 0, 0, 1, 0});
    auto const c = connected_components(m, 1);
    ASSERT_EQ(c.areas.size(), 3u);
    EXPECT_EQ(c.areas[1], 2u);
    EXPECT_EQ(c.areas[2], 3u);
}

TEST(Pipeline, EmptyAndSingle) {
    EXPECT_TRUE(run_pipeline({}, {}).empty());
    std::vector<MaskCandidate> one{cand(0.9, rect_mask(30, 30, 5, 5, 25, 25), 0)};
    auto const out = run_pipeline(one, {});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].mask, one[0].mask);
}

TEST(Pipeline, NoOpSettingsKeepEverything) {
    Rng rng(8);
    std::vector<MaskCandidate> c;
    for (int i = 0; i < 12; ++i) {
        c.push_back(cand(rng.uniform(), rect_mask(40, 40, i, i, i + 10, i + 3), i));
    }
    EXPECT_EQ(run_pipeline(c, {0.0, 1.0, 0}).size(), c.size() - 0);
}

TEST(Pipeline, StagesAreNonIncreasing) {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        std::vector<MaskCandidate> c;
        for (int i = 0; i < 15; ++i) c.push_back(cand(rng.uniform(), random_mask(rng, 24, 24), i));
        FilterConfig const f{rng.uniform(0, 0.5), rng.uniform(0.2, 0.8), static_cast<std::size_t>(rng.uniform_int(0, 30))};
        auto const a = threshold_by_pred_iou(c, f.pred_iou_threshold);
        auto const b = drop_empty(a);
        auto const out = run_pipeline(c, f);
        EXPECT_LE(a.size(), c.size());
        EXPECT_LE(b.size(), a.size());
        EXPECT_LE(out.size(), b.size());
    }
}

TEST(Counts, SumsAndRenders) {
    std::vector<std::size_t> const n{2, 0, 5};
    auto const r = count_masks("filtered", n);
    EXPECT_EQ(r.total, 7u);
    EXPECT_EQ(r.image_count, 3u);
    EXPECT_EQ(count_masks("none", std::vector<std::size_t>{}).total, 0u);
    std::vector<MaskCountReport> const reports{r};
    EXPECT_EQ(mask_counts_from_json(mask_counts_to_json(reports))[0].per_image, n);
}

TEST(Counts, ReferenceTotalsTable) {
    std::vector<MaskCountReport> const r{mask_count_from_total("vanilla", 168691, 6500),
                                         mask_count_from_total("semantic", 66280, 6500),
                                         mask_count_from_total("filtered", 31015, 6500)};
    auto const text = render_mask_counts(r);
    EXPECT_NE(text.find("168691"), std::string::npos);
    EXPECT_NE(text.find("66280"), std::string::npos);
    EXPECT_NE(text.find("31015"), std::string::npos);
    EXPECT_NE(text.find("-81.6%"), std::string::npos) << text; // (31015 - 168691) / 168691
}

TEST(Pipeline, MatchesHandTracedOracle) {
    auto const pc = segkit::testing::make_pipeline_case();
    auto const out = run_pipeline(pc.candidates, FilterConfig::filtered());
    EXPECT_EQ(tags(out), pc.expected_order);
    ASSERT_EQ(out.size(), pc.expected_masks.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].mask, pc.expected_masks[i]) << i;
}

TEST(Pipeline, StageByStageTrace) {
    auto const pc = segkit::testing::make_pipeline_case();
    auto const f = FilterConfig::filtered();
    auto const a = threshold_by_pred_iou(pc.candidates, f.pred_iou_threshold);
    EXPECT_EQ(tags(a), (std::vector<double>{0, 1, 3, 4, 5, 6, 7, 8, 9}));
    auto const b = drop_empty(a);
    EXPECT_EQ(tags(b), (std::vector<double>{0, 1, 3, 5, 6, 7, 8, 9}));
    EXPECT_TRUE(clean_regions(pc.candidates[7].mask, 150).empty());
    EXPECT_EQ(clean_regions(pc.candidates[5].mask, 150), segkit::testing::case_rect(30, 30, 50, 50));
    EXPECT_EQ(clean_regions(pc.candidates[6].mask, 150), segkit::testing::case_rect(30, 60, 50, 80));
    // without cleanup c8 would survive next to the island-extended c5
    auto const uncleaned = tags(box_nms(b, f.box_iou_cutoff));
    EXPECT_NE(std::find(uncleaned.begin(), uncleaned.end(), 8.0), uncleaned.end());
}
