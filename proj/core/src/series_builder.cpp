#include "netfx/series_builder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "netfx/error.hpp"

namespace netfx {

namespace {

std::vector<double> cumulative_membership(const std::vector<Date>& qualification_dates,
                                          DateRange window) {
    std::vector<Date> sorted = qualification_dates;
    std::sort(sorted.begin(), sorted.end());

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(window.day_count()));
    std::size_t idx = 0;
    // members qualified before the window already count on day one
    double count = 0.0;
    for (Date day = window.from; day <= window.to; ++day) {
        while (idx < sorted.size() && sorted[idx] <= day) {
            count += 1.0;
            ++idx;
        }
        values.push_back(count);
    }
    return values;
}

std::vector<Date> first_event_dates(const EventStore& store, EventKind kind) {
    std::map<std::string, Date> firsts;
    for (const auto& rec : store.records()) {
        if (rec.kind == kind) firsts.try_emplace(*rec.user_id, rec.timestamp);
    }
    std::vector<Date> dates;
    dates.reserve(firsts.size());
    for (const auto& [user, date] : firsts) dates.push_back(date);
    return dates;
}

std::string format_value(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

TimeSeries build_driver_series(const EventStore& store, DriverKind driver, DateRange window,
                               const UserCohort* super_user_cohort) {
    if (window.empty()) throw Error(Errc::EmptyWindow, "window has no days");
    if (driver == DriverKind::SuperUser && super_user_cohort == nullptr) {
        throw Error(Errc::MissingCohort, "SuperUser series needs the computed cohort");
    }

    TimeSeries series;
    series.driver = driver;
    series.start_date = window.from;
    const auto days = static_cast<std::size_t>(window.day_count());

    switch (driver) {
        case DriverKind::User:
            series.values = cumulative_membership(first_event_dates(store, EventKind::SignUp), window);
            return series;
        case DriverKind::GreatUser:
            series.values = cumulative_membership(
                first_event_dates(store, EventKind::GreatUserGranted), window);
            return series;
        case DriverKind::SuperUser: {
            std::vector<Date> dates;
            dates.reserve(super_user_cohort->members.size());
            for (const auto& [user, date] : super_user_cohort->members) dates.push_back(date);
            series.values = cumulative_membership(dates, window);
            return series;
        }
        default:
            break;
    }

    series.values.assign(days, 0.0);
    auto day_slot = [&](Date d) { return static_cast<std::size_t>(d - window.from); };

    if (driver == DriverKind::RemainedCredit) {
        // Carry the last snapshot forward; snapshots before the window seed
        // the opening value, and days before the first snapshot stay 0.
        double carried = 0.0;
        auto it = store.records().begin();
        for (; it != store.records().end() && it->timestamp < window.from; ++it) {
            if (it->kind == EventKind::BalanceSnapshot) carried = *it->amount;
        }
        for (Date day = window.from; day <= window.to; ++day) {
            for (; it != store.records().end() && it->timestamp == day; ++it) {
                if (it->kind == EventKind::BalanceSnapshot) carried = *it->amount;
            }
            series.values[day_slot(day)] = carried;
        }
        return series;
    }

    for (const auto& rec : store.records()) {
        if (!window.contains(rec.timestamp)) continue;
        switch (driver) {
            case DriverKind::Credit:
                if (rec.kind == EventKind::CreditPaid) {
                    series.values[day_slot(rec.timestamp)] += *rec.amount;
                }
                break;
            case DriverKind::Withdraw:
                if (rec.kind == EventKind::Withdrawal) {
                    series.values[day_slot(rec.timestamp)] += *rec.amount;
                }
                break;
            case DriverKind::Project:
                if (rec.kind == EventKind::ProjectOpened) {
                    series.values[day_slot(rec.timestamp)] += 1.0;
                }
                break;
            default:
                break;
        }
    }
    return series;
}

SymbolSeries discretize(const TimeSeries& series, const DiscretizationScheme& scheme) {
    SymbolSeries result;
    result.source_driver = series.driver;

    if (scheme.mode == DiscretizationScheme::Mode::SlopeSign) {
        if (series.values.size() < 2) {
            throw Error(Errc::SeriesTooShort, "slope discretization needs >= 2 values");
        }
        if (scheme.flat_epsilon < 0.0) {
            throw Error(Errc::InvalidArgument, "flat_epsilon must be >= 0");
        }
        result.alphabet_size = 3;
        result.symbols.reserve(series.values.size() - 1);
        for (std::size_t i = 1; i < series.values.size(); ++i) {
            const double d = series.values[i] - series.values[i - 1];
            std::uint16_t symbol = 1;  // flat
            if (d < -scheme.flat_epsilon) {
                symbol = 0;
            } else if (d > scheme.flat_epsilon) {
                symbol = 2;
            }
            result.symbols.push_back(symbol);
        }
        return result;
    }

    if (scheme.bin_count < 2) {
        throw Error(Errc::InvalidArgument, "bin_count must be >= 2");
    }
    if (series.values.size() < static_cast<std::size_t>(scheme.bin_count)) {
        throw Error(Errc::SeriesTooShort, "quantile discretization needs >= bin_count values");
    }

    // Empirical quantile boundaries at p = (b+1)/bins, lower convention; a
    // value equal to a boundary lands in the lower bin.
    std::vector<double> sorted = series.values;
    std::sort(sorted.begin(), sorted.end());
    const auto n = sorted.size();
    std::vector<double> boundaries;
    boundaries.reserve(static_cast<std::size_t>(scheme.bin_count - 1));
    for (int b = 0; b + 1 < scheme.bin_count; ++b) {
        const double p = static_cast<double>(b + 1) / static_cast<double>(scheme.bin_count);
        auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
        if (rank > 0) --rank;
        boundaries.push_back(sorted[rank]);
    }

    result.alphabet_size = static_cast<std::uint32_t>(scheme.bin_count);
    result.symbols.reserve(series.values.size());
    for (double v : series.values) {
        std::uint16_t bin = static_cast<std::uint16_t>(scheme.bin_count - 1);
        for (std::size_t b = 0; b < boundaries.size(); ++b) {
            if (v <= boundaries[b]) {
                bin = static_cast<std::uint16_t>(b);
                break;
            }
        }
        result.symbols.push_back(bin);
    }
    return result;
}

std::string series_to_csv(const TimeSeries& series) {
    std::string out = "date,";
    out += driver_key(series.driver);
    out += '\n';
    Date day = series.start_date;
    for (double v : series.values) {
        out += day.to_string();
        out += ',';
        out += format_value(v);
        out += '\n';
        ++day;
    }
    return out;
}

}  // namespace netfx
