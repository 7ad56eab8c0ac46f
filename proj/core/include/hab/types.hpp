#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hab/common.hpp"

namespace hab {

// ---------------------------------------------------------------------------
// Regions and training-weight schemes.
// ---------------------------------------------------------------------------

enum class Region : std::uint8_t { West = 0, Midwest = 1, South = 2, Northeast = 3 };

inline constexpr std::array<Region, 4> kAllRegions = {Region::West, Region::Midwest,
                                                      Region::South, Region::Northeast};

/// Canonical lowercase name ("west", "midwest", "south", "northeast").
std::string_view region_name(Region region);

/// Case-insensitive parse; InputError on unknown names.
Region parse_region(std::string_view text);

enum class WeightScheme : std::uint8_t { Rf, Gbdt, Nn };

WeightScheme parse_weight_scheme(std::string_view text);
std::string_view weight_scheme_name(WeightScheme scheme);

/// Fixed per-region training weight of the named scheme. The RF scheme is
/// uniform 1.0; GBDT and NN carry fixed tuned constants.
double region_weight(Region region, WeightScheme scheme);

// ---------------------------------------------------------------------------
// Calendar dates (date-only, proleptic Gregorian arithmetic).
// ---------------------------------------------------------------------------

struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..days_in_month

    auto operator<=>(const Date&) const = default;
};

/// Strict ISO-8601 YYYY-MM-DD with real calendar validation.
Date parse_date(std::string_view text);

std::string format_date(const Date& date);

/// Days since 1970-01-01 (negative before).
std::int64_t days_from_civil(const Date& date);

/// Monday = 0 .. Sunday = 6.
int day_of_week(const Date& date);

// ---------------------------------------------------------------------------
// Samples, labels, targets.
// ---------------------------------------------------------------------------

enum class Split : std::uint8_t { Train, Test };

Split parse_split(std::string_view text);
std::string_view split_name(Split split);

struct SampleMeta {
    std::string uid;
    double latitude = 0.0;   // [-90, 90]
    double longitude = 0.0;  // [-180, 180]
    Date date;
    Split split = Split::Train;
};

struct Label {
    std::string uid;
    Region region = Region::West;
    int severity = 1;      // 1..5
    double density = 0.0;  // >= 0
};

/// sqrt(density); the regression target. InputError on negative or
/// non-finite input.
double target_transform(double density);

// ---------------------------------------------------------------------------
// Continuous predictions on the sqrt-density axis, keyed by uid. OOF entries
// carry their fold id; test entries carry kTestFold. Insertion order is
/// preserved so serialized output is deterministic.
// ---------------------------------------------------------------------------

class PredictionSet {
public:
    static constexpr int kTestFold = -1;

    PredictionSet() = default;
    explicit PredictionSet(std::string model_id) : model_id_(std::move(model_id)) {}

    const std::string& model_id() const { return model_id_; }
    void set_model_id(std::string id) { model_id_ = std::move(id); }

    /// InputError on duplicate uid, non-finite value, or fold < kTestFold.
    void add(const std::string& uid, int fold, double value);

    bool contains(const std::string& uid) const { return entries_.count(uid) != 0; }
    int fold(const std::string& uid) const;
    double value(const std::string& uid) const;

    std::size_t size() const { return uids_.size(); }
    const std::vector<std::string>& uids() const { return uids_; }

private:
    std::string model_id_;
    std::vector<std::string> uids_;
    std::unordered_map<std::string, std::pair<int, double>> entries_;
};

}  // namespace hab
