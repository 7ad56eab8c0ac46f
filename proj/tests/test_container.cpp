#include "doctest.h"

#include <cmath>

#include "hab/io/container.hpp"
#include "support/fixtures.hpp"

using namespace hab;

namespace {

io::PatchDataset tiny_patch_dataset() {
    io::PatchDataset d;
    d.height = 2;
    d.width = 2;
    d.channels = 1;
    d.uids = {"a"};
    d.present = {1};
    d.pixels = {{0, 255, 17, 42}};
    return d;
}

}  // namespace

TEST_CASE("patch container byte-exact round trip") {
    habtest::TempDir dir("habp");
    auto data = tiny_patch_dataset();
    io::write_patch_container(dir.file("p.habp"), data);
    auto back = io::read_patch_container(dir.file("p.habp"));
    CHECK(back.uids == data.uids);
    CHECK(back.pixels[0] == std::vector<std::uint8_t>{0, 255, 17, 42});

    // write . read . write = identity on bytes
    io::write_patch_container(dir.file("p2.habp"), back);
    CHECK(habtest::read_bytes(dir.file("p.habp")) == habtest::read_bytes(dir.file("p2.habp")));
}

TEST_CASE("all-absent presence bitmap yields uids but no payload") {
    habtest::TempDir dir("habp_absent");
    io::PatchDataset d;
    d.height = 4;
    d.width = 4;
    d.channels = 2;
    d.uids = {"a", "b", "c"};
    d.present = {0, 0, 0};
    d.pixels = {{}, {}, {}};
    io::write_patch_container(dir.file("p.habp"), d);
    auto back = io::read_patch_container(dir.file("p.habp"));
    CHECK(back.uids.size() == 3);
    for (auto p : back.present) CHECK(p == 0);
    for (const auto& px : back.pixels) CHECK(px.empty());
}

TEST_CASE("container failure modes carry byte offsets") {
    habtest::TempDir dir("habp_err");
    auto data = tiny_patch_dataset();
    io::write_patch_container(dir.file("p.habp"), data);
    auto bytes = habtest::read_bytes(dir.file("p.habp"));

    SUBCASE("bad magic") {
        bytes[0] = 'X';
        io::write_file_bytes(dir.file("bad.habp"), bytes);
        try {
            io::read_patch_container(dir.file("bad.habp"));
            FAIL("expected ContainerError");
        } catch (const ContainerError& e) {
            CHECK(e.offset() == 0);
            CHECK(std::string(e.what()).find("magic") != std::string::npos);
        }
    }
    SUBCASE("version mismatch") {
        bytes[4] = 9;
        io::write_file_bytes(dir.file("bad.habp"), bytes);
        try {
            io::read_patch_container(dir.file("bad.habp"));
            FAIL("expected ContainerError");
        } catch (const ContainerError& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SUBCASE("truncated payload") {
        bytes.pop_back();
        io::write_file_bytes(dir.file("bad.habp"), bytes);
        CHECK_THROWS_AS(io::read_patch_container(dir.file("bad.habp")), ContainerError);
    }
    SUBCASE("trailing bytes rejected") {
        bytes.push_back(0);
        io::write_file_bytes(dir.file("bad.habp"), bytes);
        CHECK_THROWS_AS(io::read_patch_container(dir.file("bad.habp")), ContainerError);
    }
    SUBCASE("declared payload larger than the file") {
        // Bump n_samples to lie about the payload size; the reader must
        // detect truncation instead of allocating the declared amount.
        bytes[6] = 0xFF;
        bytes[7] = 0xFF;
        io::write_file_bytes(dir.file("bad.habp"), bytes);
        CHECK_THROWS_AS(io::read_patch_container(dir.file("bad.habp")), ContainerError);
    }
}

TEST_CASE("climate container enforces 28x5 and NaN cells survive") {
    habtest::TempDir dir("habc");
    io::ClimateDataset d;
    d.uids = {"a", "b"};
    d.present = {1, 0};
    d.series.resize(2);
    d.series[0].resize(140, 1.5f);
    d.series[0][7] = std::nanf("");
    io::write_climate_container(dir.file("c.habc"), d);
    auto back = io::read_climate_container(dir.file("c.habc"));
    CHECK(back.present == std::vector<std::uint8_t>{1, 0});
    CHECK(back.series[0].size() == 140);
    CHECK(std::isnan(back.series[0][7]));
    CHECK(back.series[0][8] == 1.5f);

    io::ClimateDataset bad = d;
    bad.series[0].resize(139);
    CHECK_THROWS_AS(io::write_climate_container(dir.file("bad.habc"), bad), InputError);
}

TEST_CASE("dem container checks altitude finiteness for present samples") {
    habtest::TempDir dir("habd");
    io::DemDataset d;
    d.uids = {"a", "b"};
    d.present = {1, 0};
    d.altitude = {321.5f, std::nanf("")};
    d.pixels.resize(2);
    d.pixels[0].assign(32 * 32, 100);
    io::write_dem_container(dir.file("d.habd"), d);
    auto back = io::read_dem_container(dir.file("d.habd"));
    CHECK(back.altitude[0] == 321.5f);
    CHECK(std::isnan(back.altitude[1]));
    CHECK(back.pixels[0][0] == 100);

    io::DemDataset bad = d;
    bad.altitude[0] = std::nanf("");
    CHECK_THROWS_AS(io::write_dem_container(dir.file("bad.habd"), bad), InputError);
}

TEST_CASE("randomized container round trips are byte-identical") {
    habtest::TempDir dir("cont_prop");
    SplitMix64 rng(20240101);
    for (int iter = 0; iter < 40; ++iter) {
        std::size_t n = rng.bounded(6);
        {
            io::PatchDataset d;
            d.height = static_cast<std::uint16_t>(1 + rng.bounded(5));
            d.width = static_cast<std::uint16_t>(1 + rng.bounded(5));
            d.channels = static_cast<std::uint16_t>(1 + rng.bounded(3));
            std::size_t bytes_per = std::size_t{d.height} * d.width * d.channels;
            for (std::size_t i = 0; i < n; ++i) {
                d.uids.push_back("u" + std::to_string(rng.next() % 1000) + "_" +
                                 std::to_string(i));
                bool present = rng.bounded(2) == 1;
                d.present.push_back(present);
                std::vector<std::uint8_t> px;
                if (present)
                    for (std::size_t b = 0; b < bytes_per; ++b)
                        px.push_back(static_cast<std::uint8_t>(rng.bounded(256)));
                d.pixels.push_back(std::move(px));
            }
            auto p = dir.file("r.habp");
            io::write_patch_container(p, d);
            auto first = habtest::read_bytes(p);
            io::write_patch_container(p, io::read_patch_container(p));
            CHECK(habtest::read_bytes(p) == first);
        }
        {
            io::ClimateDataset d;
            for (std::size_t i = 0; i < n; ++i) {
                d.uids.push_back("c" + std::to_string(i));
                bool present = rng.bounded(2) == 1;
                d.present.push_back(present);
                std::vector<float> vals;
                if (present)
                    for (int v = 0; v < 140; ++v)
                        vals.push_back(rng.bounded(4) == 0
                                           ? std::nanf("")
                                           : static_cast<float>(rng.next_unit() * 50));
                d.series.push_back(std::move(vals));
            }
            auto p = dir.file("r.habc");
            io::write_climate_container(p, d);
            auto first = habtest::read_bytes(p);
            io::write_climate_container(p, io::read_climate_container(p));
            CHECK(habtest::read_bytes(p) == first);
        }
        {
            io::DemDataset d;
            for (std::size_t i = 0; i < n; ++i) {
                d.uids.push_back("d" + std::to_string(i));
                bool present = rng.bounded(2) == 1;
                d.present.push_back(present);
                d.altitude.push_back(present ? static_cast<float>(rng.next_unit() * 3000)
                                             : std::nanf(""));
                std::vector<std::uint8_t> px;
                if (present)
                    for (int b = 0; b < 32 * 32; ++b)
                        px.push_back(static_cast<std::uint8_t>(rng.bounded(256)));
                d.pixels.push_back(std::move(px));
            }
            auto p = dir.file("r.habd");
            io::write_dem_container(p, d);
            auto first = habtest::read_bytes(p);
            io::write_dem_container(p, io::read_dem_container(p));
            CHECK(habtest::read_bytes(p) == first);
        }
    }
}

TEST_CASE("uid order is stable under round trip") {
    habtest::TempDir dir("uid_order");
    io::PatchDataset d;
    d.height = d.width = d.channels = 1;
    d.uids = {"zz", "aa", "mm"};
    d.present = {1, 1, 1};
    d.pixels = {{1}, {2}, {3}};
    io::write_patch_container(dir.file("o.habp"), d);
    auto back = io::read_patch_container(dir.file("o.habp"));
    CHECK(back.uids == std::vector<std::string>{"zz", "aa", "mm"});
}
