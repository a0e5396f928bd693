#include "segkit/everything.hpp"
#include "segkit/grid.hpp"
#include "segkit/head.hpp"
#include "segkit/postprocess.hpp"
#include "segkit/random.hpp"
#include "segkit/synth.hpp"
#include "segkit/toy_encoder.hpp"

#include <benchmark/benchmark.h>

using namespace segkit;

namespace {

BinaryMask blob_mask(Rng& rng, int side) {
    BinaryMask m(side, side);
    double const cx = rng.uniform(0, side), cy = rng.uniform(0, side), r = rng.uniform(side / 8.0, side / 3.0);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            double const dx = x - cx, dy = y - cy;
            m(x, y) = dx * dx + dy * dy < r * r || rng.uniform() < 0.01;
        }
    return m;
}

void BM_NearestAssign(benchmark::State& state) {
    auto const grid = build_grid(static_cast<int>(state.range(0)), 1024, 1024);
    Rng rng(1);
    std::vector<Point> points;
    for (int i = 0; i < 1000; ++i) points.push_back({rng.uniform(0, 1024), rng.uniform(0, 1024)});
    for (auto _ : state) {
        for (auto const& p : points) benchmark::DoNotOptimize(nearest_neighbour_assign(p, grid));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_NearestAssign)->Arg(32)->Arg(64);

void BM_CleanRegions(benchmark::State& state) {
    Rng rng(2);
    auto const mask = blob_mask(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(clean_regions(mask, 150));
}
BENCHMARK(BM_CleanRegions)->Arg(128)->Arg(1024);

void BM_BoxNms(benchmark::State& state) {
    Rng rng(3);
    std::vector<MaskCandidate> candidates;
    for (int i = 0; i < state.range(0); ++i) {
        MaskCandidate c;
        c.mask = blob_mask(rng, 128);
        c.predicted_iou = rng.uniform();
        candidates.push_back(std::move(c));
    }
    for (auto _ : state) benchmark::DoNotOptimize(box_nms(candidates, 0.3));
}
BENCHMARK(BM_BoxNms)->Arg(256)->Arg(2048);

void BM_PredictCandidates(benchmark::State& state) {
    SynthConfig cfg;
    cfg.image_count = 1;
    auto const m = synth_generate(cfg);
    ToyEncoder const enc;
    auto const features = enc.encode(m.images[0].frame);
    auto const head = ToyHead::random(ToyEncoder::kChannels, 8, 0);
    auto const canvas = m.images[0].frame.canvas();
    for (auto _ : state) benchmark::DoNotOptimize(predict_candidates(head, features, canvas, {64, 64}));
}
BENCHMARK(BM_PredictCandidates);

} // namespace
BENCHMARK_MAIN();
