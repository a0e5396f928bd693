#include "segkit/assign.hpp"
#include "segkit/error.hpp"
#include "segkit/everything.hpp"
#include "segkit/synth.hpp"
#include "segkit/toy_encoder.hpp"
#include "segkit/trainer.hpp"

#include "test_util.hpp"

using namespace segkit;

namespace {

Manifest scene(std::size_t n, std::uint64_t seed, std::string prefix) {
    SynthConfig cfg;
    cfg.image_count = n;
    cfg.width = cfg.height = 64;
    cfg.min_extent = 16;
    cfg.max_extent = 30;
    cfg.min_visible_area = 120;
    cfg.class_table = ClassTable::toy(4);
    cfg.seed = seed;
    cfg.id_prefix = std::move(prefix);
    return synth_generate(cfg);
}

} // namespace

TEST(Everything, SinglePointGridGivesAtMostThree) {
    auto const m = scene(3, 1, "e");
    EverythingConfig cfg;
    cfg.grid_per_side = 1;
    auto const r = run_everything_mode(ToyHead::random(5, 4, 2), m, ToyEncoder{}, cfg);
    ASSERT_EQ(r.images.size(), 3u);
    for (auto const& img : r.images) {
        EXPECT_LE(img.raw_candidates, 3u);
        EXPECT_LE(img.survivors[0].size(), 3u);
    }
    EXPECT_EQ(r.counts.front().pipeline, "raw");
}

TEST(Everything, OneEvalPerMaskAndDeterministic) {
    auto const m = scene(4, 2, "e");
    EverythingConfig cfg;
    cfg.grid_per_side = 8;
    cfg.pipelines.push_back({"vanilla", FilterConfig::vanilla()});
    auto const head = ToyHead::random(5, 4, 5);
    auto const a = run_everything_mode(head, m, ToyEncoder{}, cfg);
    cfg.threads = 3;
    auto const b = run_everything_mode(head, m, ToyEncoder{}, cfg);
    std::size_t evals = 0;
    for (auto const& img : a.images) evals += img.evals.size();
    EXPECT_EQ(evals, m.mask_count());
    EXPECT_EQ(report_to_json(a.report), report_to_json(b.report));
    EXPECT_EQ(mask_counts_to_json(a.counts), mask_counts_to_json(b.counts));
    ASSERT_EQ(a.counts.size(), 3u);
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        EXPECT_EQ(a.images[i].raw_candidates, 3u * 64u);
        EXPECT_LE(a.images[i].survivors[0].size(), a.images[i].raw_candidates);
        for (auto const& s : a.images[i].survivors[0]) {
            EXPECT_TRUE(s.logits.empty());
            EXPECT_FALSE(s.mask.empty());
        }
    }
}

TEST(Everything, TrainedHeadBeatsRandomBaseline) {
    auto const train_set = scene(16, 3, "t");
    auto const eval_set = scene(6, 4, "v");
    ToyEncoder const enc;
    auto const grid = build_grid(16, 64, 64);
    auto const as = assign_dataset(train_set, enc, grid);
    TrainConfig tc;
    tc.epochs = 30;
    auto const start = ToyHead::random(5, 4, 0);
    auto const trained = train(start, train_set, as, enc, tc).head;
    EverythingConfig cfg;
    cfg.grid_per_side = 16;
    auto const before = run_everything_mode(start, eval_set, enc, cfg).report.miou;
    auto const after = run_everything_mode(trained, eval_set, enc, cfg).report.miou;
    EXPECT_GT(after, before);
}

TEST(Everything, MissingFeaturesNameTheImage) {
    auto const m = scene(2, 5, "e");
    segkit::testing::TempDir dir;
    FeatureDirectory const feats(dir.path());
    try {
        run_everything_mode(ToyHead::random(5, 4, 1), m, feats, {});
        FAIL() << "expected LoadError";
    } catch (LoadError const& e) {
        EXPECT_NE(std::string(e.what()).find("e0000"), std::string::npos) << e.what();
    }
}

TEST(Everything, RejectsEmptyPipelineList) {
    EverythingConfig cfg;
    cfg.pipelines.clear();
    EXPECT_THROW(run_everything_mode(ToyHead::random(5, 4, 1), scene(1, 1, "e"), ToyEncoder{}, cfg), ArgumentError);
}
