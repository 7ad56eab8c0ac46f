#include "doctest.h"

#include <cmath>

#include "hab/types.hpp"

using namespace hab;

TEST_CASE("target_transform basics") {
    CHECK(target_transform(0.0) == 0.0);
    CHECK(target_transform(10000.0) == 100.0);
    // 2926^2, inverted back through the transform.
    CHECK(target_transform(8561476.0) == doctest::Approx(2926.0).epsilon(1e-12));
    CHECK_THROWS_AS(target_transform(-1.0), InputError);
    CHECK_THROWS_AS(target_transform(std::nan("")), InputError);
    CHECK_THROWS_AS(target_transform(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("target_transform is monotone and round-trips") {
    SplitMix64 rng(7);
    double prev_x = 0.0, prev_t = 0.0;
    for (int i = 0; i < 200; ++i) {
        double x = prev_x + rng.next_unit() * 1e10 + 1e-6;
        double t = target_transform(x);
        CHECK(t > prev_t);
        CHECK(t * t == doctest::Approx(x).epsilon(1e-12));
        prev_x = x;
        prev_t = t;
    }
}

TEST_CASE("region weights match the reference constants") {
    CHECK(region_weight(Region::Northeast, WeightScheme::Gbdt) == 1.98);
    CHECK(region_weight(Region::South, WeightScheme::Gbdt) == 1.11);
    CHECK(region_weight(Region::Midwest, WeightScheme::Gbdt) == 1.51);
    CHECK(region_weight(Region::West, WeightScheme::Gbdt) == 1.3);

    CHECK(region_weight(Region::Midwest, WeightScheme::Nn) == 0.86);
    CHECK(region_weight(Region::Northeast, WeightScheme::Nn) == 1.12);
    CHECK(region_weight(Region::South, WeightScheme::Nn) == 0.58);
    CHECK(region_weight(Region::West, WeightScheme::Nn) == 0.71);

    for (Region r : kAllRegions) CHECK(region_weight(r, WeightScheme::Rf) == 1.0);
    CHECK_THROWS_AS(parse_weight_scheme("xgb"), InputError);
}

TEST_CASE("region parsing is case-insensitive and total") {
    CHECK(parse_region("midwest") == Region::Midwest);
    CHECK(parse_region("MidWest") == Region::Midwest);
    CHECK(parse_region("NORTHEAST") == Region::Northeast);
    CHECK_THROWS_AS(parse_region("europe"), InputError);
    for (Region r : kAllRegions) CHECK(parse_region(std::string(region_name(r))) == r);
}

TEST_CASE("date parsing and weekday arithmetic") {
    Date d = parse_date("2024-10-10");
    CHECK(d.year == 2024);
    CHECK(d.month == 10);
    CHECK(d.day == 10);
    CHECK(day_of_week(d) == 3);  // Thursday

    CHECK(day_of_week(parse_date("2013-01-04")) == 4);  // Friday
    CHECK(day_of_week(parse_date("2021-12-14")) == 1);  // Tuesday
    CHECK(day_of_week(parse_date("1970-01-01")) == 3);  // Thursday

    CHECK(parse_date("2024-02-29").day == 29);  // leap year
    CHECK_THROWS_AS(parse_date("2023-02-29"), InputError);
    CHECK_THROWS_AS(parse_date("2024-13-01"), InputError);
    CHECK_THROWS_AS(parse_date("2024-00-10"), InputError);
    CHECK_THROWS_AS(parse_date("2024/10/10"), InputError);
    CHECK_THROWS_AS(parse_date("20241010"), InputError);
    CHECK(format_date(d) == "2024-10-10");
}

TEST_CASE("prediction sets reject duplicates and non-finite values") {
    PredictionSet set("m");
    set.add("a", 0, 181.5);
    set.add("b", PredictionSet::kTestFold, 300.0);
    CHECK(set.value("a") == 181.5);
    CHECK(set.fold("b") == PredictionSet::kTestFold);
    CHECK_THROWS_AS(set.add("a", 1, 2.0), InputError);
    CHECK_THROWS_AS(set.add("c", 0, std::nan("")), InputError);
    CHECK_THROWS_AS(set.value("zz"), InputError);
    CHECK(set.uids() == std::vector<std::string>{"a", "b"});
}
