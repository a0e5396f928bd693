#pragma once

#include "segkit/postprocess.hpp"

#include <vector>

namespace segkit::testing {

/// Ten candidates on a 100x100 canvas exercising every pipeline stage under
/// the default filter (0.3, 0.3, 150). Each candidate's prompt_point.x holds
/// its index so survivors can be identified.
///
/// Hand trace:
///   threshold   drops c2 (0.25 < 0.3); c3 (exactly 0.3) stays
///   drop empty  drops c4
///   cleanup     c5 loses its 100 px island, c6 gets its 25 px hole filled,
///               c7 (a lone 100 px blob) empties and is dropped
///   nms order   c0 .95, c1 .90, c5 .70, c8 .65, c9 .60 (484 px), c6 .60 (400 px), c3 .30
///               c1 vs c0 box IoU 300/500 = 0.6  -> suppressed
///               c8 vs cleaned c5 box IoU 324/476 = 0.68 -> suppressed
///               (with c5's island intact the IoU would be 324/2576 and c8 would survive)
///   survivors   c0, c5, c9, c6, c3
struct PipelineCase {
    std::vector<MaskCandidate> candidates;
    std::vector<double> expected_order;
    std::vector<BinaryMask> expected_masks;
};

inline BinaryMask case_rect(int x0, int y0, int x1, int y1) {
    BinaryMask m(100, 100);
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) m(x, y) = 1;
    return m;
}

inline PipelineCase make_pipeline_case() {
    auto add = [](BinaryMask a, BinaryMask const& b) {
        for (std::size_t i = 0; i < a.values().size(); ++i) a.values()[i] |= b.values()[i];
        return a;
    };
    auto cut = [](BinaryMask a, BinaryMask const& b) {
        for (std::size_t i = 0; i < a.values().size(); ++i) a.values()[i] &= !b.values()[i];
        return a;
    };
    std::vector<std::pair<double, BinaryMask>> const raw{
        {0.95, case_rect(0, 0, 20, 20)},
        {0.90, case_rect(5, 0, 25, 20)},
        {0.25, case_rect(60, 60, 80, 80)},
        {0.30, case_rect(60, 60, 80, 80)},
        {0.80, BinaryMask(100, 100)},
        {0.70, add(case_rect(30, 30, 50, 50), case_rect(0, 0, 10, 10))},
        {0.60, cut(case_rect(30, 60, 50, 80), case_rect(38, 68, 43, 73))},
        {0.50, case_rect(85, 5, 95, 15)},
        {0.65, case_rect(32, 32, 52, 52)},
        {0.60, case_rect(0, 40, 22, 62)},
    };
    PipelineCase pc;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        MaskCandidate c;
        c.mask = raw[i].second;
        c.predicted_iou = raw[i].first;
        c.prompt_point = {static_cast<double>(i), 0.0};
        pc.candidates.push_back(std::move(c));
    }
    pc.expected_order = {0, 5, 9, 6, 3};
    pc.expected_masks = {case_rect(0, 0, 20, 20), case_rect(30, 30, 50, 50), case_rect(0, 40, 22, 62),
                         case_rect(30, 60, 50, 80), case_rect(60, 60, 80, 80)};
    return pc;
}

} // namespace segkit::testing
