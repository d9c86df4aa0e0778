#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netfx/date.hpp"
#include "netfx/event_model.hpp"

namespace netfx {

/// Directed influence to plant in the generated log: the destination
/// driver's daily intensity at day t is scaled by the source driver's
/// (mean-normalized) value at t - lag, mixed in proportionally to strength.
struct Coupling {
    DriverKind source = DriverKind::Credit;
    DriverKind destination = DriverKind::Project;
    double strength = 0.0;  // in [0, 1]
    int lag = 1;            // days, >= 1
};

struct PopulationSpec {
    int workers = 200;
    int customers = 5;
    double power_worker_fraction = 0.1;
};

/// Per-driver event intensities. Worker submission behavior is split into a
/// casual and a "power" profile; the generator labels power workers in the
/// ground-truth sidecar so selection quality can be scored against them.
struct BaseRates {
    double signups_per_day = 5.0;
    double grants_per_day = 0.2;
    double projects_per_day = 6.0;
    double credit_events_per_day = 30.0;
    double withdrawals_per_day = 8.0;
    double casual_submissions_per_day = 0.8;
    double power_submissions_per_day = 2.5;
    double review_probability = 0.35;
    double casual_pass_rate = 0.6;
    double power_pass_rate = 0.92;
    double payment_amount = 120.0;
};

struct CouplingSpec {
    std::vector<Coupling> pairs;
    BaseRates base_rates;
    PopulationSpec population;
    std::uint64_t seed = 1;
};

/// Everything the generator knows that the pipeline must rediscover. Written
/// as a sidecar next to the event log, never embedded in it.
struct GroundTruth {
    std::uint64_t seed = 0;
    DateRange window;
    std::vector<Coupling> couplings;
    std::vector<std::string> power_workers;
    std::array<std::size_t, kEventKindCount> emitted_by_kind{};
    /// Realized daily driver values, indexed by DriverKind then day. The
    /// SuperUser slot holds the generator's internal proxy (cumulative power
    /// workers signed up) used only for coupling modulation.
    std::array<std::vector<double>, kDriverCount> daily_values;
    /// month key "YYYY-MM" -> user -> distinct submission days that month.
    std::map<std::string, std::map<std::string, int>> active_days_by_month;
};

struct SynthResult {
    EventStore store;
    GroundTruth truth;
};

/// Generates a schema-valid event log over the window, deterministic per
/// seed. Window must span at least 30 days.
SynthResult generate(const CouplingSpec& spec, DateRange window);

CouplingSpec parse_coupling_spec(const std::string& json_text);
CouplingSpec parse_coupling_spec_file(const std::string& path,
                                      DateRange* window_out = nullptr);
std::string coupling_spec_to_json(const CouplingSpec& spec, DateRange window);
std::string truth_to_json(const GroundTruth& truth);

}  // namespace netfx
