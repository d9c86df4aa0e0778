#pragma once

#include <cstdint>
#include <vector>

#include "netfx/cohorts.hpp"
#include "netfx/date.hpp"
#include "netfx/event_model.hpp"

namespace netfx {

/// One value per consecutive day over the analysis window.
struct TimeSeries {
    DriverKind driver = DriverKind::User;
    Date start_date;
    std::vector<double> values;
};

/// Discretized series ready for entropy estimation. Every symbol is
/// < alphabet_size.
struct SymbolSeries {
    std::vector<std::uint16_t> symbols;
    std::uint32_t alphabet_size = 0;
    DriverKind source_driver = DriverKind::User;

    std::size_t size() const { return symbols.size(); }
};

struct DiscretizationScheme {
    enum class Mode { SlopeSign, QuantileBins };

    Mode mode = Mode::SlopeSign;
    double flat_epsilon = 0.0;  // SlopeSign: |diff| <= epsilon counts as flat
    int bin_count = 2;          // QuantileBins only

    static DiscretizationScheme slope_sign(double epsilon = 0.0) {
        return {Mode::SlopeSign, epsilon, 2};
    }
    static DiscretizationScheme quantile(int bins) {
        return {Mode::QuantileBins, 0.0, bins};
    }
};

/// Daily driver values over the window:
///   User / GreatUser / SuperUser  cumulative count of users qualified by day
///   Credit / Withdraw             sum of that day's paid / withdrawn amounts
///   RemainedCredit                last balance snapshot on or before the day
///   Project                       count of projects opened that day
/// SuperUser needs the computed cohort (qualification dates).
TimeSeries build_driver_series(const EventStore& store, DriverKind driver, DateRange window,
                               const UserCohort* super_user_cohort = nullptr);

/// SlopeSign maps first differences to {0 down, 1 flat, 2 up} and shortens
/// the series by one; QuantileBins maps raw values to empirical-quantile bin
/// indices (ties toward the lower bin) and preserves length.
SymbolSeries discretize(const TimeSeries& series, const DiscretizationScheme& scheme);

std::string series_to_csv(const TimeSeries& series);  // header: date,<driver key>

}  // namespace netfx
