#include "segkit/error.hpp"
#include "segkit/metrics.hpp"
#include "segkit/random.hpp"
#include "segkit/toy_encoder.hpp"

#include "test_util.hpp"

#include <algorithm>

using namespace segkit;
using segkit::testing::rect_mask;

namespace {

MaskCandidate pred(BinaryMask m, Point at, double score, std::vector<double> labels = {}) {
    MaskCandidate c;
    c.mask = std::move(m);
    c.prompt_point = at;
    c.predicted_iou = score;
    c.label_logits = std::move(labels);
    return c;
}

struct Counts {
    std::size_t inter = 0, uni = 0, gt = 0, correct = 0, total = 0;
};

Counts count_pixels(BinaryMask const& p, BinaryMask const& g) {
    Counts c;
    for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) {
            bool const a = p(x, y), b = g(x, y);
            c.inter += a && b;
            c.uni += a || b;
            c.gt += b;
            c.correct += a == b;
            ++c.total;
        }
    }
    return c;
}

InstanceEval make_eval(std::string id, std::size_t cls, double iou, double acc, std::optional<std::size_t> label) {
    InstanceEval e;
    e.instance_id = std::move(id);
    e.class_index = cls;
    e.iou = iou;
    e.acc = acc;
    e.predicted_label = label;
    e.matched = true;
    return e;
}

} // namespace

TEST(InstanceIouAcc, IdentityIsPerfect) {
    auto const g = rect_mask(10, 10, 2, 2, 6, 9);
    std::vector<MaskCandidate> const ps{pred(g, {3, 3}, 0.9)};
    auto const e = instance_iou_acc({g, 0, "g", ""}, ps, Point{3, 3});
    EXPECT_TRUE(e.matched);
    EXPECT_DOUBLE_EQ(e.iou, 1.0);
    EXPECT_DOUBLE_EQ(e.acc, 1.0);
}

TEST(InstanceIouAcc, HalfOfGroundTruth) {
    auto const g = rect_mask(20, 20, 0, 0, 10, 10);
    std::vector<MaskCandidate> const ps{pred(rect_mask(20, 20, 0, 0, 10, 5), {1, 1}, 0.5)};
    auto const e = instance_iou_acc({g, 0, "g", ""}, ps, Point{1, 1});
    EXPECT_DOUBLE_EQ(e.iou, 0.5);
    EXPECT_DOUBLE_EQ(e.acc, 0.5);
}

TEST(InstanceIouAcc, SupersetOfTwiceTheArea) {
    auto const g = rect_mask(20, 20, 0, 0, 10, 10);
    std::vector<MaskCandidate> const ps{pred(rect_mask(20, 20, 0, 0, 10, 20), {1, 1}, 0.5)};
    auto const e = instance_iou_acc({g, 0, "g", ""}, ps, Point{1, 1});
    EXPECT_DOUBLE_EQ(e.iou, 0.5);
    EXPECT_DOUBLE_EQ(e.acc, 1.0);
}

TEST(InstanceIouAcc, MostConfidentAtThePointWins) {
    auto const g = rect_mask(20, 20, 0, 0, 10, 10);
    std::vector<MaskCandidate> const ps{pred(rect_mask(20, 20, 0, 0, 10, 10), {5, 5}, 0.99, {0, 1}),
                                        pred(rect_mask(20, 20, 0, 0, 5, 10), {1, 1}, 0.6, {1, 0}),
                                        pred(rect_mask(20, 20, 0, 0, 10, 10), {1, 1}, 0.4, {0, 1})};
    auto const e = instance_iou_acc({g, 0, "g", ""}, ps, Point{1, 1});
    EXPECT_DOUBLE_EQ(e.iou, 0.5);
    EXPECT_EQ(e.predicted_label, 0u);
}

TEST(InstanceIouAcc, NoPredictionAtPointIsUnmatchedZero) {
    auto const g = rect_mask(8, 8, 0, 0, 4, 4);
    std::vector<MaskCandidate> const ps{pred(g, {6, 6}, 0.9)};
    auto const e = instance_iou_acc({g, 0, "g", ""}, ps, Point{1, 1});
    EXPECT_FALSE(e.matched);
    EXPECT_EQ(e.iou, 0.0);
    EXPECT_EQ(e.acc, 0.0);
}

TEST(InstanceIouAcc, GridPathUsesAssignedPoint) {
    auto frame = make_frame("img", 32, 32);
    std::fill(frame.pixels.begin(), frame.pixels.end(), 128);
    auto const g = rect_mask(32, 32, 4, 4, 12, 12);
    for (int y = 4; y < 12; ++y) {
        for (int x = 4; x < 12; ++x) frame.at(x, y, 0) = 255;
    }
    auto const f = ToyEncoder{}.encode(frame);
    auto const grid = build_grid(4, 32, 32);
    std::vector<MaskCandidate> ps;
    for (auto const& p : grid.points()) ps.push_back(pred(g, p, 0.5));
    InstanceMask const gt{g, 0, "g", ""};
    auto const e = instance_iou_acc(gt, ps, grid, f);
    EXPECT_TRUE(e.matched);
    EXPECT_DOUBLE_EQ(e.iou, 1.0);
}

TEST(PixelOracle, ExhaustiveRectanglePairsOn6x6) {
    std::vector<BinaryMask> rects;
    for (int x0 = 0; x0 < 6; ++x0)
        for (int x1 = x0 + 1; x1 <= 6; ++x1)
            for (int y0 = 0; y0 < 6; ++y0)
                for (int y1 = y0 + 1; y1 <= 6; ++y1) rects.push_back(rect_mask(6, 6, x0, y0, x1, y1));
    rects.emplace_back(6, 6);
    for (auto const& p : rects) {
        for (auto const& g : rects) {
            auto const c = count_pixels(p, g);
            auto const r = pixel_iou_acc(p, g);
            auto const px = pixel_iou_acc(p, g, AccuracyDefinition::pixel_accuracy);
            double const iou = c.uni ? static_cast<double>(c.inter) / c.uni : 0.0;
            double const acc = c.gt ? static_cast<double>(c.inter) / c.gt : 0.0;
            ASSERT_EQ(r.iou, iou);
            ASSERT_EQ(r.acc, acc);
            ASSERT_EQ(px.acc, static_cast<double>(c.correct) / c.total);
            ASSERT_GE(r.acc, r.iou);
            ASSERT_GE(px.acc, px.iou);
        }
    }
}

TEST(PixelOracle, ExhaustiveAllMasksOn3x3) {
    for (unsigned a = 0; a < 512; ++a) {
        BinaryMask p(3, 3);
        for (int i = 0; i < 9; ++i) p.values()[i] = (a >> i) & 1u;
        for (unsigned b = 0; b < 512; ++b) {
            BinaryMask g(3, 3);
            for (int i = 0; i < 9; ++i) g.values()[i] = (b >> i) & 1u;
            auto const c = count_pixels(p, g);
            auto const r = pixel_iou_acc(p, g);
            ASSERT_EQ(r.iou, c.uni ? static_cast<double>(c.inter) / c.uni : 0.0);
            ASSERT_EQ(r.acc, c.gt ? static_cast<double>(c.inter) / c.gt : 0.0);
            ASSERT_GE(r.acc, r.iou);
        }
    }
}

TEST(PixelOracle, RandomPairsOn64x64) {
    Rng rng(99);
    for (int t = 0; t < 1000; ++t) {
        BinaryMask p(64, 64), g(64, 64);
        double const dp = rng.uniform(), dg = rng.uniform();
        for (auto& v : p.values()) v = rng.uniform() < dp;
        for (auto& v : g.values()) v = rng.uniform() < dg;
        auto const c = count_pixels(p, g);
        auto const r = pixel_iou_acc(p, g);
        ASSERT_EQ(r.iou, c.uni ? static_cast<double>(c.inter) / c.uni : 0.0);
        ASSERT_EQ(r.acc, c.gt ? static_cast<double>(c.inter) / c.gt : 0.0);
        ASSERT_GE(r.acc, r.iou);
    }
}

TEST(Aggregate, ClassMeansAndUnweightedMiou) {
    auto const table = ClassTable::toy(3);
    std::vector<InstanceEval> const evals{make_eval("a", 0, 0.2, 0.3, 0), make_eval("b", 0, 0.6, 0.7, 1),
                                          make_eval("c", 2, 0.8, 0.9, 2)};
    auto const r = per_class_aggregate(evals, table);
    ASSERT_EQ(r.per_class.size(), 2u);
    EXPECT_DOUBLE_EQ(r.per_class[0].iou, 0.4);
    EXPECT_EQ(r.per_class[0].count, 2u);
    EXPECT_DOUBLE_EQ(r.per_class[0].cls_acc, 0.5);
    EXPECT_DOUBLE_EQ(r.miou, (0.4 + 0.8) / 2);
    EXPECT_DOUBLE_EQ(r.mean_cls_acc, 0.75);
}

TEST(Aggregate, TwoClassesWeighEqually) {
    auto const table = ClassTable::toy(2);
    std::vector<InstanceEval> evals{make_eval("x", 1, 0.8, 0.8, 1)};
    for (int i = 0; i < 9; ++i) evals.push_back(make_eval("y" + std::to_string(i), 0, 0.2, 0.2, 0));
    EXPECT_DOUBLE_EQ(per_class_aggregate(evals, table).miou, 0.5);
}

TEST(Aggregate, EmptyInput) {
    auto const r = per_class_aggregate({}, ClassTable::toy(3));
    EXPECT_TRUE(r.per_class.empty());
    EXPECT_EQ(r.miou, 0.0);
    EXPECT_EQ(r.macc, 0.0);
}

TEST(Aggregate, PermutationInvariant) {
    auto const table = ClassTable::toy(5);
    Rng rng(3);
    std::vector<InstanceEval> evals;
    for (int i = 0; i < 40; ++i) {
        double const iou = rng.uniform();
        evals.push_back(make_eval(std::to_string(i), static_cast<std::size_t>(rng.uniform_int(0, 4)), iou,
                                  std::min(1.0, iou + rng.uniform(0, 0.2)),
                                  static_cast<std::size_t>(rng.uniform_int(0, 4))));
    }
    auto const base = report_to_json(per_class_aggregate(evals, table));
    for (int t = 0; t < 50; ++t) {
        for (std::size_t i = evals.size() - 1; i > 0; --i) {
            std::swap(evals[i], evals[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long long>(i)))]);
        }
        ASSERT_EQ(report_to_json(per_class_aggregate(evals, table)), base);
    }
}

TEST(ClassAccuracy, AllCorrectAndUnmatched) {
    auto const table = ClassTable::toy(2);
    std::vector<InstanceEval> evals{make_eval("a", 0, 1, 1, 0), make_eval("b", 1, 1, 1, 1)};
    auto r = classification_accuracy(evals, table);
    EXPECT_DOUBLE_EQ(r.mean, 1.0);
    evals[1].matched = false;
    evals[1].predicted_label.reset();
    r = classification_accuracy(evals, table);
    EXPECT_DOUBLE_EQ(r.per_class[1].second, 0.0);
    EXPECT_DOUBLE_EQ(r.mean, 0.5);
}

TEST(Render, ReferenceRowAndZeroDeltas) {
    EvalReport r;
    r.per_class.push_back({"GarbageCan", 1494, 0.7986, 0.914, 0.67});
    r.miou = 0.7986;
    r.macc = 0.914;
    r.mean_cls_acc = 0.67;
    auto const out = render_report(r);
    auto const row = out.text.substr(out.text.find("GarbageCan"));
    EXPECT_NE(row.find("1494"), std::string::npos);
    EXPECT_NE(row.find("79.86"), std::string::npos);
    EXPECT_NE(row.find("91.40"), std::string::npos);
    EXPECT_NE(row.find("0.67"), std::string::npos);
    // one data row plus the summary row after the header
    EXPECT_EQ(std::count(out.text.begin(), out.text.end(), '\n'), 3);

    auto const diff = render_report(r, &r);
    EXPECT_NE(diff.text.find("+0.00"), std::string::npos);
    EXPECT_EQ(diff.text.find("-0.0"), std::string::npos);
    EXPECT_EQ(diff.text.find("+0.01"), std::string::npos);
}

TEST(Render, JsonRoundTrip) {
    EvalReport r;
    r.per_class.push_back({"Mug", 3, 0.25, 0.5, 1.0 / 3});
    r.per_class.push_back({"Sofa", 1, 0.75, 1.0, 0.0});
    r.miou = 0.5;
    r.macc = 0.75;
    r.mean_cls_acc = 1.0 / 6;
    auto const back = report_from_json(report_to_json(r));
    ASSERT_EQ(back.per_class.size(), 2u);
    EXPECT_EQ(back.per_class[0].name, "Mug");
    EXPECT_EQ(back.per_class[0].count, 3u);
    EXPECT_EQ(back.per_class[0].cls_acc, 1.0 / 3);
    EXPECT_EQ(back.miou, 0.5);
    EXPECT_EQ(report_to_json(back), report_to_json(r));
}
