#include "segkit/atomic_file.hpp"
#include "segkit/confidence.hpp"
#include "segkit/error.hpp"
#include "segkit/random.hpp"
#include "segkit/toy_encoder.hpp"

#include "test_util.hpp"

#include <cmath>
#include <cstring>

using namespace segkit;
using segkit::testing::rect_mask;
using segkit::testing::TempDir;

namespace {

// features laid out [c][row][col]
FeatureMap map_from(int c, int fh, int fw, std::vector<float> v) {
    return FeatureMap("img", c, fh, fw, std::move(v), FeatureSource::bridge_export);
}

InstanceMask instance(BinaryMask m) { return {std::move(m), 0, "inst", ""}; }

FeatureMap random_map(std::uint64_t seed, int c, int fh, int fw) {
    Rng rng(seed);
    std::vector<float> v(static_cast<std::size_t>(c) * fh * fw);
    for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
    return map_from(c, fh, fw, v);
}

} // namespace

TEST(FeatureMap, RejectsNonFiniteAndBadShape) {
    EXPECT_THROW(map_from(1, 1, 2, {1.0f, NAN}), ValidationError);
    EXPECT_THROW(map_from(1, 2, 2, {1.0f}), ValidationError);
    EXPECT_THROW(map_from(1, 0, 2, {}), ValidationError);
}

TEST(Embedding, ConstantMapGivesConstant) {
    std::vector<float> v(2 * 4 * 4);
    std::fill(v.begin(), v.begin() + 16, 0.5f);
    std::fill(v.begin() + 16, v.end(), -2.0f);
    auto const f = map_from(2, 4, 4, v);
    for (auto const& m : {rect_mask(16, 16, 0, 0, 16, 16), rect_mask(16, 16, 5, 9, 7, 12)}) {
        auto const e = mask_pooled_embedding(f, instance(m));
        EXPECT_DOUBLE_EQ(e.vector[0], 0.5);
        EXPECT_DOUBLE_EQ(e.vector[1], -2.0);
    }
}

TEST(Embedding, SingleCellMaskGivesThatCell) {
    auto const f = random_map(3, 4, 4, 4);
    // cell (1, 2) spans x in [8,12), y in [4,8) on a 16x16 canvas
    auto const e = mask_pooled_embedding(f, instance(rect_mask(16, 16, 8, 4, 12, 8)));
    auto const cell = f.cell(1, 2);
    for (std::size_t c = 0; c < cell.size(); ++c) EXPECT_DOUBLE_EQ(e.vector[c], cell[c]);
}

TEST(Embedding, TwoCellAverage) {
    // channel-major: ch0 = (1, 0), ch1 = (0, 1) over a 1x2 map
    auto const f = map_from(2, 1, 2, {1, 0, 0, 1});
    auto const e = mask_pooled_embedding(f, instance(rect_mask(2, 1, 0, 0, 2, 1)));
    EXPECT_DOUBLE_EQ(e.vector[0], 0.5);
    EXPECT_DOUBLE_EQ(e.vector[1], 0.5);
}

TEST(Embedding, TinyMaskFallsBackToCentroidCell) {
    auto const f = random_map(4, 3, 4, 4);
    // one pixel at (1,1) never hits a cell center on a 16x16 canvas (centers at 2,6,10,14)
    auto const e = mask_pooled_embedding(f, instance(rect_mask(16, 16, 1, 1, 2, 2)));
    auto const cell = f.cell(0, 0);
    for (std::size_t c = 0; c < cell.size(); ++c) EXPECT_DOUBLE_EQ(e.vector[c], cell[c]);
}

TEST(Cosine, HandCases) {
    std::vector<double> const a{1, 0};
    EXPECT_DOUBLE_EQ(cosine_similarity(a, std::vector<double>{0.6, 0.8}), 0.6);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, std::vector<double>{0, 3}), 0.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, std::vector<double>{0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(a, a), 1.0);
}

TEST(ConfidenceMap, IdenticalCellsGiveOne) {
    auto const f = map_from(2, 2, 2, {1, 1, 1, 1, 2, 2, 2, 2});
    auto const s = confidence_map(f, {{1, 2}, "x"});
    for (double v : s.values) EXPECT_NEAR(v, 1.0, 1e-15);
    EXPECT_EQ(s.argmax_cell, (Cell{0, 0}));
}

TEST(ConfidenceMap, OrthogonalAndZeroCellsScoreZero) {
    // cells: (1,0), (0,1), (0,0), (0.6,0.8)
    auto const f = map_from(2, 2, 2, {1, 0, 0, 0.6f, 0, 1, 0, 0.8f});
    auto const s = confidence_map(f, {{1, 0}, "x"});
    EXPECT_DOUBLE_EQ(s.at(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(s.at(0, 1), 0.0);
    EXPECT_DOUBLE_EQ(s.at(1, 0), 0.0);
    EXPECT_NEAR(s.at(1, 1), 0.6, 1e-7);
    EXPECT_EQ(s.argmax_cell, (Cell{0, 0}));
}

TEST(ConfidenceMap, ChannelMismatchIsArgumentError) {
    auto const f = random_map(1, 3, 2, 2);
    EXPECT_THROW(confidence_map(f, {{1, 0}, "x"}), ArgumentError);
}

TEST(ConfidenceMap, BoundedAndScaleInvariant) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto const f = random_map(seed, 6, 7, 9);
        auto const e = mask_pooled_embedding(f, instance(rect_mask(36, 28, 4, 4, 20, 15)));
        auto const s = confidence_map(f, e);
        std::vector<float> scaled(f.values().begin(), f.values().end());
        for (auto& v : scaled) v *= 3.7f;
        auto const s2 = confidence_map(map_from(6, 7, 9, scaled), e);
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            EXPECT_LE(std::abs(s.values[i]), 1.0);
            EXPECT_NEAR(s.values[i], s2.values[i], 1e-6);
        }
        EXPECT_EQ(s.argmax_cell, s2.argmax_cell);
    }
}

TEST(LocationPrior, IdentityMapping) {
    ConfidenceMap m{8, 8, std::vector<double>(64, 0.0), {3, 5}};
    m.values[3 * 8 + 5] = 1.0;
    auto const p = location_prior(m, 8, 8);
    EXPECT_EQ(p.x, 5);
    EXPECT_EQ(p.y, 3);
}

TEST(LocationPrior, UpscaledRoundsHalfAway) {
    ConfidenceMap m{64, 64, std::vector<double>(64 * 64, 0.0), {3, 5}};
    auto const p = location_prior(m, 1024, 1024);
    EXPECT_EQ(p.x, 88);
    EXPECT_EQ(p.y, 56);
}

TEST(LocationPrior, UniformMapPicksFirstCell) {
    auto const f = map_from(1, 4, 4, std::vector<float>(16, 1.0f));
    auto const s = confidence_map(f, {{1.0}, "x"});
    EXPECT_EQ(s.argmax_cell, (Cell{0, 0}));
    auto const p = location_prior(s, 64, 64);
    EXPECT_EQ(p.x, 8);
    EXPECT_EQ(p.y, 8);
}

TEST(LocationPrior, LandsOnTheMatchingCell) {
    // one cell equals the embedding, the rest are orthogonal to it
    int const fh = 6, fw = 5;
    std::vector<float> v(2 * fh * fw, 0.0f);
    for (int i = 0; i < fh * fw; ++i) v[fh * fw + i] = 1.0f;
    int const row = 4, col = 1;
    v[row * fw + col] = 1.0f;
    v[fh * fw + row * fw + col] = 0.0f;
    auto const s = confidence_map(map_from(2, fh, fw, v), {{1, 0}, "x"});
    EXPECT_EQ(s.argmax_cell, (Cell{row, col}));
    auto const p = location_prior(s, 50, 60);
    EXPECT_EQ(p.x, 15);
    EXPECT_EQ(p.y, 45);
}

TEST(ToyEncoder, ChannelsAndRange) {
    auto f = make_frame("x", 8, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 8; ++x) {
            f.at(x, y, 0) = 255;
            f.at(x, y, 1) = 0;
            f.at(x, y, 2) = static_cast<std::uint8_t>(x < 4 ? 0 : 255);
        }
    }
    auto const m = ToyEncoder(2).encode(f);
    EXPECT_EQ(m.channels(), 5);
    EXPECT_EQ(m.fh(), 2);
    EXPECT_EQ(m.fw(), 4);
    EXPECT_FLOAT_EQ(m.at(0, 0, 0), 1.0f);
    EXPECT_FLOAT_EQ(m.at(1, 0, 0), -1.0f);
    EXPECT_FLOAT_EQ(m.at(2, 0, 0), -1.0f);
    EXPECT_FLOAT_EQ(m.at(2, 0, 3), 1.0f);
    EXPECT_LT(m.at(3, 0, 0), m.at(3, 0, 3));
    EXPECT_LT(m.at(4, 0, 0), m.at(4, 1, 0));
    for (float v : m.values()) {
        EXPECT_GE(v, -1.0f);
        EXPECT_LE(v, 1.0f);
    }
}

TEST(Feat, HeaderLayoutIsLittleEndian) {
    Tensor const t{{1, 2}, {1.0f, -2.5f}};
    auto const bytes = encode_tensor(t);
    ASSERT_EQ(bytes.size(), 4u + 4 + 4 + 2 * 4 + 2 * 4);
    EXPECT_EQ(std::memcmp(bytes.data(), "FEAT", 4), 0);
    auto u8 = [&](std::size_t i) { return std::to_integer<unsigned>(bytes[i]); };
    EXPECT_EQ(u8(4), 1u); // version
    EXPECT_EQ(u8(8), 2u); // rank
    EXPECT_EQ(u8(12), 1u);
    EXPECT_EQ(u8(16), 2u);
    // 1.0f = 0x3f800000
    EXPECT_EQ(u8(20), 0x00u);
    EXPECT_EQ(u8(23), 0x3fu);
    EXPECT_EQ(decode_tensor(bytes), t);
}

TEST(Feat, FileRoundTripIsByteIdentical) {
    TempDir dir;
    auto const f = random_map(9, 3, 5, 7);
    write_feat(dir.path() / "a.feat", f);
    auto const back = read_feat(dir.path() / "a.feat", "img");
    EXPECT_EQ(back.channels(), 3);
    EXPECT_EQ(back.fh(), 5);
    EXPECT_EQ(back.fw(), 7);
    EXPECT_TRUE(std::equal(back.values().begin(), back.values().end(), f.values().begin()));
    write_feat(dir.path() / "b.feat", back);
    EXPECT_EQ(read_binary_file(dir.path() / "a.feat"), read_binary_file(dir.path() / "b.feat"));
}

TEST(Feat, TruncationNamesMissingBytes) {
    auto bytes = encode_tensor({{2, 3}, std::vector<float>(6, 1.0f)});
    bytes.resize(bytes.size() - 5);
    try {
        decode_tensor(bytes);
        FAIL() << "expected LoadError";
    } catch (LoadError const& e) {
        EXPECT_NE(std::string(e.what()).find("5"), std::string::npos) << e.what();
    }
}

TEST(Feat, BadMagicAndVersion) {
    auto bytes = encode_tensor({{1}, {0.0f}});
    auto bad = bytes;
    bad[0] = std::byte{'X'};
    EXPECT_THROW(decode_tensor(bad), LoadError);
    bad = bytes;
    bad[4] = std::byte{2};
    EXPECT_THROW(decode_tensor(bad), LoadError);
}

TEST(Feat, DirectoryProviderNamesMissingImage) {
    TempDir dir;
    FeatureDirectory const provider(dir.path());
    ImageRecord img{make_frame("ghost", 4, 4), "", {}};
    try {
        provider.features_for(img);
        FAIL() << "expected LoadError";
    } catch (LoadError const& e) {
        EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    }
    EXPECT_THROW(provider.require(std::span<ImageRecord const>(&img, 1)), LoadError);
}
