#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "netfx/error.hpp"
#include "netfx/impact_analysis.hpp"
#include "netfx/series_builder.hpp"
#include "netfx/synthgen.hpp"
#include "netfx/te_core.hpp"

using namespace netfx;

namespace {

const DateRange kHalfYear{Date::from_ymd(2020, 7, 1), Date::from_ymd(2020, 12, 31)};

std::map<DriverKind, SymbolSeries> discretized_drivers(const EventStore& store,
                                                       DateRange window) {
    SuperUserCriteria criteria;
    criteria.reference_date = window.to;
    const auto super_cohort = select_super_users(store, criteria);

    std::map<DriverKind, SymbolSeries> symbols;
    for (auto driver : kDriverOrder) {
        const auto series = build_driver_series(
            store, driver, window,
            driver == DriverKind::SuperUser ? &super_cohort : nullptr);
        symbols.emplace(driver, discretize(series, DiscretizationScheme::slope_sign()));
    }
    return symbols;
}

}  // namespace

TEST_CASE("invalid specs are rejected") {
    CouplingSpec spec;
    CHECK_THROWS_AS(generate(spec, {Date::from_ymd(2020, 7, 1), Date::from_ymd(2020, 7, 20)}),
                    Error);  // window under 30 days

    spec.population.workers = 0;
    CHECK_THROWS_AS(generate(spec, kHalfYear), Error);

    spec.population.workers = 10;
    spec.pairs.push_back({DriverKind::Credit, DriverKind::Credit, 0.5, 1});
    CHECK_THROWS_AS(generate(spec, kHalfYear), Error);  // self-coupling

    spec.pairs = {{DriverKind::Credit, DriverKind::Project, 1.5, 1}};
    CHECK_THROWS_AS(generate(spec, kHalfYear), Error);  // strength out of range

    spec.pairs = {{DriverKind::Credit, DriverKind::Project, 0.5, 0}};
    CHECK_THROWS_AS(generate(spec, kHalfYear), Error);  // lag < 1
}

TEST_CASE("generated stores are schema-valid with zero violations") {
    for (std::uint64_t seed : {1ull, 9ull, 1234ull}) {
        CouplingSpec spec;
        spec.seed = seed;
        spec.population.workers = 70;
        spec.pairs = {{DriverKind::Credit, DriverKind::Project, 0.8, 1}};
        const auto synth = generate(spec, kHalfYear);
        const auto report = validate_store(synth.store);
        CHECK(report.ok());
    }
}

TEST_CASE("same spec and seed give byte-identical logs and sidecars") {
    CouplingSpec spec;
    spec.seed = 555;
    spec.population.workers = 50;
    spec.pairs = {{DriverKind::Credit, DriverKind::Project, 0.9, 1}};

    const auto first = generate(spec, kHalfYear);
    const auto second = generate(spec, kHalfYear);
    CHECK(to_jsonl(first.store) == to_jsonl(second.store));
    CHECK(truth_to_json(first.truth) == truth_to_json(second.truth));

    spec.seed = 556;
    const auto different = generate(spec, kHalfYear);
    CHECK(to_jsonl(first.store) != to_jsonl(different.store));
}

TEST_CASE("power worker labels line up with the population fraction") {
    CouplingSpec spec;
    spec.seed = 4;
    spec.population.workers = 200;
    spec.population.power_worker_fraction = 0.15;
    const auto synth = generate(spec, kHalfYear);
    CHECK(synth.truth.power_workers.size() == 30);
}

TEST_CASE("a strong planted coupling dominates the estimated matrix") {
    CouplingSpec spec;
    spec.seed = 8080;
    spec.population.workers = 60;
    spec.pairs = {{DriverKind::Credit, DriverKind::Project, 0.9, 1}};
    const DateRange decade{Date::from_ymd(2015, 1, 1), Date::from_ymd(2024, 12, 30)};
    REQUIRE(decade.day_count() == 3652);

    const auto synth = generate(spec, decade);
    const auto matrix =
        compute_matrix(discretized_drivers(synth.store, decade), {1, 1, LogBase::Bits});
    const auto ranking = normalize_impact(matrix);
    CHECK(ranking.entries.front().source == DriverKind::Credit);
    CHECK(ranking.entries.front().destination == DriverKind::Project);
}

TEST_CASE("mean estimated influence grows with coupling strength") {
    const DateRange window{Date::from_ymd(2019, 1, 1), Date::from_ymd(2020, 12, 31)};
    double previous = -1.0;
    for (double strength : {0.2, 0.5, 0.9}) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            CouplingSpec spec;
            spec.seed = seed;
            spec.population.workers = 60;
            spec.pairs = {{DriverKind::Credit, DriverKind::Project, strength, 1}};
            const auto synth = generate(spec, window);
            const auto symbols = discretized_drivers(synth.store, window);
            total += transfer_entropy(symbols.at(DriverKind::Project),
                                      symbols.at(DriverKind::Credit), {1, 1, LogBase::Bits})
                         .value;
        }
        const double mean = total / 5.0;
        CHECK(mean >= previous);
        previous = mean;
    }
}

TEST_CASE("coupling spec json round trip") {
    CouplingSpec spec;
    spec.seed = 31;
    spec.population.workers = 42;
    spec.population.power_worker_fraction = 0.2;
    spec.base_rates.projects_per_day = 11.5;
    spec.pairs = {{DriverKind::SuperUser, DriverKind::User, 0.4, 2}};

    const auto json = coupling_spec_to_json(spec, kHalfYear);
    const auto parsed = parse_coupling_spec(json);
    CHECK(parsed.seed == 31);
    CHECK(parsed.population.workers == 42);
    CHECK(parsed.population.power_worker_fraction == 0.2);
    CHECK(parsed.base_rates.projects_per_day == 11.5);
    REQUIRE(parsed.pairs.size() == 1);
    CHECK(parsed.pairs[0].source == DriverKind::SuperUser);
    CHECK(parsed.pairs[0].destination == DriverKind::User);
    CHECK(parsed.pairs[0].lag == 2);

    CHECK_THROWS_AS(parse_coupling_spec("not json"), Error);
    CHECK_THROWS_AS(parse_coupling_spec(R"({"couplings":[{"source":"nope"}]})"), Error);
}

TEST_CASE("truth sidecar carries the oracle tallies") {
    CouplingSpec spec;
    spec.seed = 3;
    spec.population.workers = 30;
    const auto synth = generate(spec, kHalfYear);
    const auto json = truth_to_json(synth.truth);
    CHECK(json.find("\"daily_values\"") != std::string::npos);
    CHECK(json.find("\"power_workers\"") != std::string::npos);
    CHECK(json.find("\"active_days_by_month\"") != std::string::npos);

    // flows accounted: sum of daily project counts equals emitted events
    double projects = 0;
    for (double v : synth.truth.daily_values[static_cast<std::size_t>(DriverKind::Project)]) {
        projects += v;
    }
    CHECK(projects ==
          synth.truth.emitted_by_kind[static_cast<std::size_t>(EventKind::ProjectOpened)]);
}
