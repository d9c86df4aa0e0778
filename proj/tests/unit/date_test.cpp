#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netfx/date.hpp"

using namespace netfx;

TEST_CASE("civil round trip over several centuries") {
    // brute-force walk: increment one day at a time and re-derive the civil
    // date from the serial number
    Date d = Date::from_ymd(1970, 1, 1);
    CHECK(d.days() == 0);
    int prev_year = 1970, prev_month = 1, prev_day = 0;
    for (int i = 0; i < 200 * 365; ++i) {
        const auto ymd = d.ymd();
        if (ymd.month == prev_month && ymd.year == prev_year) {
            CHECK(ymd.day == prev_day + 1);
        } else {
            CHECK(ymd.day == 1);
        }
        CHECK(Date::from_ymd(ymd.year, ymd.month, ymd.day) == d);
        prev_year = ymd.year;
        prev_month = ymd.month;
        prev_day = ymd.day;
        ++d;
    }
}

TEST_CASE("parsing") {
    CHECK(Date::parse("2020-07-01") == Date::from_ymd(2020, 7, 1));
    CHECK(Date::parse("2020-07-01T12:34:56") == Date::from_ymd(2020, 7, 1));
    CHECK(Date::parse("2020-02-29") == Date::from_ymd(2020, 2, 29));
    CHECK_FALSE(Date::parse("2021-02-29").has_value());
    CHECK_FALSE(Date::parse("2020-13-01").has_value());
    CHECK_FALSE(Date::parse("2020-07-32").has_value());
    CHECK_FALSE(Date::parse("2020/07/01").has_value());
    CHECK_FALSE(Date::parse("20-07-01").has_value());
    CHECK(Date::from_ymd(2020, 7, 1).to_string() == "2020-07-01");
}

TEST_CASE("arithmetic and ranges") {
    const Date d = Date::from_ymd(2020, 12, 31);
    CHECK((d + 1).to_string() == "2021-01-01");
    CHECK(d - Date::from_ymd(2020, 7, 1) == 183);

    const DateRange window{Date::from_ymd(2020, 7, 1), Date::from_ymd(2020, 12, 31)};
    CHECK(window.day_count() == 184);
    CHECK(window.contains(Date::from_ymd(2020, 9, 15)));
    CHECK_FALSE(window.contains(Date::from_ymd(2021, 1, 1)));

    const DateRange empty{Date::from_ymd(2020, 7, 2), Date::from_ymd(2020, 7, 1)};
    CHECK(empty.empty());
    CHECK(empty.day_count() == 0);
}

TEST_CASE("year-month helpers") {
    const auto ym = YearMonth::parse("2020-02");
    REQUIRE(ym.has_value());
    CHECK(ym->day_count() == 29);
    CHECK(ym->first_day() == Date::from_ymd(2020, 2, 1));
    CHECK(ym->last_day() == Date::from_ymd(2020, 2, 29));
    CHECK(ym->next() == YearMonth{2020, 3});
    CHECK(YearMonth{2020, 12}.next() == YearMonth{2021, 1});
    CHECK(YearMonth::containing(Date::from_ymd(2020, 7, 15)).to_string() == "2020-07");
    CHECK_FALSE(YearMonth::parse("2020-7").has_value());
}
