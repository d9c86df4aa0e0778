#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace netfx {

/// Calendar date at day resolution, stored as days since 1970-01-01.
/// All analysis in this library runs on daily series, so this is the only
/// time type; intraday timestamps are truncated to dates on ingestion.
class Date {
public:
    constexpr Date() = default;

    static constexpr Date from_days(std::int32_t days) {
        Date d;
        d.days_ = days;
        return d;
    }

    static Date from_ymd(int year, int month, int day);

    /// Parses "YYYY-MM-DD". A trailing "T<time>" suffix is accepted and
    /// truncated. Returns nullopt for anything else.
    static std::optional<Date> parse(std::string_view text);

    constexpr std::int32_t days() const { return days_; }

    struct Ymd {
        int year;
        int month;
        int day;
    };
    Ymd ymd() const;

    std::string to_string() const;

    constexpr auto operator<=>(const Date&) const = default;

    constexpr Date operator+(std::int32_t n) const { return from_days(days_ + n); }
    constexpr Date operator-(std::int32_t n) const { return from_days(days_ - n); }
    constexpr std::int32_t operator-(Date other) const { return days_ - other.days_; }

    Date& operator++() {
        ++days_;
        return *this;
    }

private:
    std::int32_t days_ = 0;
};

/// Inclusive day range [from, to].
struct DateRange {
    Date from;
    Date to;

    constexpr bool empty() const { return from > to; }
    constexpr std::int32_t day_count() const { return empty() ? 0 : to - from + 1; }
    constexpr bool contains(Date d) const { return d >= from && d <= to; }
};

struct YearMonth {
    int year = 1970;
    int month = 1;

    static std::optional<YearMonth> parse(std::string_view text);  // "YYYY-MM"
    static YearMonth containing(Date d);

    Date first_day() const;
    Date last_day() const;
    int day_count() const;
    YearMonth next() const;
    std::string to_string() const;

    auto operator<=>(const YearMonth&) const = default;
};

bool is_leap_year(int year);
int days_in_month(int year, int month);

}  // namespace netfx
