#include "hab/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace hab {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string_view region_name(Region region) {
    switch (region) {
        case Region::West: return "west";
        case Region::Midwest: return "midwest";
        case Region::South: return "south";
        case Region::Northeast: return "northeast";
    }
    return "west";
}

Region parse_region(std::string_view text) {
    std::string t = lower(text);
    if (t == "west") return Region::West;
    if (t == "midwest") return Region::Midwest;
    if (t == "south") return Region::South;
    if (t == "northeast") return Region::Northeast;
    throw InputError("unknown region '" + std::string(text) + "'");
}

WeightScheme parse_weight_scheme(std::string_view text) {
    std::string t = lower(text);
    if (t == "rf") return WeightScheme::Rf;
    if (t == "gbdt") return WeightScheme::Gbdt;
    if (t == "nn") return WeightScheme::Nn;
    throw InputError("unknown weight scheme '" + std::string(text) + "'");
}

std::string_view weight_scheme_name(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::Rf: return "rf";
        case WeightScheme::Gbdt: return "gbdt";
        case WeightScheme::Nn: return "nn";
    }
    return "rf";
}

double region_weight(Region region, WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::Rf:
            return 1.0;
        case WeightScheme::Gbdt:
            switch (region) {
                case Region::Midwest: return 1.51;
                case Region::Northeast: return 1.98;
                case Region::South: return 1.11;
                case Region::West: return 1.3;
            }
            break;
        case WeightScheme::Nn:
            switch (region) {
                case Region::Midwest: return 0.86;
                case Region::Northeast: return 1.12;
                case Region::South: return 0.58;
                case Region::West: return 0.71;
            }
            break;
    }
    throw InputError("invalid region/scheme combination");
}

namespace {

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return kDays[month - 1];
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Date parse_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("date '" + std::string(text) + "' is not YYYY-MM-DD");
    std::string_view ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds))
        throw InputError("date '" + std::string(text) + "' is not YYYY-MM-DD");
    Date d;
    d.year = std::stoi(std::string(ys));
    d.month = std::stoi(std::string(ms));
    d.day = std::stoi(std::string(ds));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw InputError("date '" + std::string(text) + "' is not a valid calendar date");
    return d;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
    return buf;
}

// Howard Hinnant's civil-days algorithm; exact integer arithmetic.
std::int64_t days_from_civil(const Date& date) {
    std::int64_t y = date.year;
    const int m = date.month;
    const int d = date.day;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int day_of_week(const Date& date) {
    // 1970-01-01 was a Thursday (index 3 on the Monday=0 scale).
    std::int64_t days = days_from_civil(date);
    return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

Split parse_split(std::string_view text) {
    std::string t = lower(text);
    if (t == "train") return Split::Train;
    if (t == "test") return Split::Test;
    throw InputError("unknown split '" + std::string(text) + "'");
}

std::string_view split_name(Split split) {
    return split == Split::Train ? "train" : "test";
}

double target_transform(double density) {
    if (!std::isfinite(density) || density < 0.0)
        throw InputError("density must be finite and non-negative");
    return std::sqrt(density);
}

void PredictionSet::add(const std::string& uid, int fold, double value) {
    if (!std::isfinite(value))
        throw InputError("non-finite prediction for uid '" + uid + "'");
    if (fold < kTestFold)
        throw InputError("invalid fold id for uid '" + uid + "'");
    auto [it, inserted] = entries_.emplace(uid, std::make_pair(fold, value));
    (void)it;
    if (!inserted) throw InputError("duplicate prediction for uid '" + uid + "'");
    uids_.push_back(uid);
}

int PredictionSet::fold(const std::string& uid) const {
    auto it = entries_.find(uid);
    if (it == entries_.end()) throw InputError("no prediction for uid '" + uid + "'");
    return it->second.first;
}

double PredictionSet::value(const std::string& uid) const {
    auto it = entries_.find(uid);
    if (it == entries_.end()) throw InputError("no prediction for uid '" + uid + "'");
    return it->second.second;
}

}  // namespace hab
