#include "doctest.h"

#include <cmath>

#include "hab/features/patch.hpp"

using namespace hab;
using namespace hab::feat;

namespace {

PatchImage make_patch(std::uint16_t h, std::uint16_t w, std::uint16_t c) {
    PatchImage p;
    p.height = h;
    p.width = w;
    p.channels = c;
    p.present = true;
    p.pixels.assign(std::size_t{h} * w * c, 0);
    return p;
}

}  // namespace

TEST_CASE("scale_to_u8 examples") {
    SUBCASE("constant input maps to zeros") {
        std::vector<double> v(12, 7.3);
        auto out = scale_to_u8(v, 2, 2, 3);
        for (auto b : out) CHECK(b == 0);
    }
    SUBCASE("half point rounds away from zero") {
        std::vector<double> v = {0.0, 0.5, 1.0};
        auto out = scale_to_u8(v, 1, 3, 1);
        CHECK(out == std::vector<std::uint8_t>{0, 128, 255});
    }
    SUBCASE("two values hit the extremes") {
        std::vector<double> v = {10.0, 20.0};
        auto out = scale_to_u8(v, 1, 2, 1);
        CHECK(out == std::vector<std::uint8_t>{0, 255});
    }
    SUBCASE("non-finite input rejected") {
        std::vector<double> v = {0.0, std::nan("")};
        CHECK_THROWS_AS(scale_to_u8(v, 1, 2, 1), InputError);
    }
}

TEST_CASE("scale_to_u8 is invariant under positive affine transforms") {
    SplitMix64 rng(99);
    std::vector<double> v(64);
    for (auto& x : v) x = rng.next_unit() * 1000.0 - 200.0;
    auto base = scale_to_u8(v, 8, 8, 1);
    for (double a : {2.0, 0.25, 17.5}) {
        for (double b : {-3.0, 0.0, 1234.5}) {
            std::vector<double> t(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) t[i] = a * v[i] + b;
            CHECK(scale_to_u8(t, 8, 8, 1) == base);
        }
    }
}

TEST_CASE("per-channel scaling mode scales channels independently") {
    // channel 0 spans {0,1}, channel 1 spans {10,30}
    std::vector<double> v = {0.0, 10.0, 1.0, 30.0};
    auto joint = scale_to_u8(v, 1, 2, 2, ScaleMode::Joint);
    auto per = scale_to_u8(v, 1, 2, 2, ScaleMode::PerChannel);
    CHECK(per == std::vector<std::uint8_t>{0, 0, 255, 255});
    CHECK(joint != per);
}

TEST_CASE("center_crop keeps rows and columns 16..47") {
    PatchImage p = make_patch(64, 64, 2);
    for (std::size_t r = 0; r < 64; ++r)
        for (std::size_t c = 0; c < 64; ++c)
            for (std::size_t ch = 0; ch < 2; ++ch)
                p.pixels[(r * 64 + c) * 2 + ch] = static_cast<std::uint8_t>(r);
    PatchImage out = center_crop(p);
    CHECK(out.height == 32);
    CHECK(out.width == 32);
    CHECK(out.channels == 2);
    CHECK(out.at(0, 0, 0) == 16);
    CHECK(out.at(31, 31, 1) == 47);

    PatchImage uniform = make_patch(64, 64, 1);
    std::fill(uniform.pixels.begin(), uniform.pixels.end(), std::uint8_t{9});
    PatchImage u = center_crop(uniform);
    for (auto px : u.pixels) CHECK(px == 9);

    PatchImage bad = make_patch(33, 64, 1);
    CHECK_THROWS_AS(center_crop(bad), InputError);
}

TEST_CASE("channel_stats on constant and tiled channels") {
    PatchImage p = make_patch(32, 32, 2);
    // channel 0: constant 5; channel 1: {1,2,3,4} tiled evenly
    for (std::size_t px = 0; px < 1024; ++px) {
        p.pixels[px * 2 + 0] = 5;
        p.pixels[px * 2 + 1] = static_cast<std::uint8_t>(1 + px % 4);
    }
    auto stats = channel_stats(p);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].mean == 5.0);
    CHECK(stats[0].median == 5.0);
    CHECK(stats[0].stddev == 0.0);
    // oracle: mean of {1,2,3,4} = 2.5, median = 2.5, population std = sqrt(1.25)
    CHECK(stats[1].mean == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(stats[1].median == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(stats[1].stddev == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
}

TEST_CASE("channel_stats of an absent patch is all sentinels") {
    PatchImage p;
    p.channels = 7;
    p.present = false;
    auto stats = channel_stats(p);
    REQUIRE(stats.size() == 7);
    for (const auto& s : stats) {
        CHECK(s.mean == kSentinel);
        CHECK(s.median == kSentinel);
        CHECK(s.stddev == kSentinel);
    }
}

TEST_CASE("channel_stats is order-free") {
    SplitMix64 rng(123);
    PatchImage p = make_patch(32, 32, 1);
    for (auto& px : p.pixels) px = static_cast<std::uint8_t>(rng.bounded(256));
    auto before = channel_stats(p);
    // Deterministic pixel permutation: reverse.
    PatchImage q = p;
    std::reverse(q.pixels.begin(), q.pixels.end());
    auto after = channel_stats(q);
    CHECK(before[0].mean == after[0].mean);
    CHECK(before[0].median == after[0].median);
    CHECK(before[0].stddev == after[0].stddev);
}

TEST_CASE("band_index") {
    CHECK(band_index(100.0, 100.0) == 0.0);
    CHECK(band_index(3.0, 1.0) == 0.5);
    CHECK(band_index(0.0, 0.0) == kSentinel);
    CHECK(band_index(kSentinel, 5.0) == kSentinel);
    CHECK(band_index(5.0, kSentinel) == kSentinel);
}

TEST_CASE("band_index is antisymmetric where defined") {
    SplitMix64 rng(5);
    for (int i = 0; i < 100; ++i) {
        double a = rng.next_unit() * 255.0;
        double b = rng.next_unit() * 255.0;
        if (a + b == 0.0) continue;
        CHECK(band_index(a, b) == doctest::Approx(-band_index(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("synth_mean_image broadcasts per-channel means") {
    PatchImage a = make_patch(32, 32, 1);
    PatchImage b = make_patch(32, 32, 1);
    std::fill(a.pixels.begin(), a.pixels.end(), std::uint8_t{10});
    std::fill(b.pixels.begin(), b.pixels.end(), std::uint8_t{20});

    SUBCASE("single patch broadcasts itself") {
        const PatchImage* one[] = {&a};
        PatchImage synth = synth_mean_image(one);
        for (auto px : synth.pixels) CHECK(px == 10);
    }
    SUBCASE("two constant patches average") {
        const PatchImage* two[] = {&a, &b};
        PatchImage synth = synth_mean_image(two);
        for (auto px : synth.pixels) CHECK(px == 15);
        auto stats = channel_stats(synth);
        CHECK(stats[0].stddev == 0.0);
        CHECK(stats[0].mean == 15.0);
    }
    SUBCASE("absent patches are skipped; none present is an error") {
        PatchImage absent;
        absent.present = false;
        const PatchImage* mixed[] = {&absent, &a};
        PatchImage synth = synth_mean_image(mixed);
        for (auto px : synth.pixels) CHECK(px == 10);
        const PatchImage* none[] = {&absent};
        CHECK_THROWS_AS(synth_mean_image(none), InputError);
    }
}
