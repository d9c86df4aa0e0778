#include "netfx/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "netfx/error.hpp"
#include "netfx/rng.hpp"

namespace netfx {

namespace {

constexpr int kMinWindowDays = 30;

double round_cents(double v) {
    return static_cast<double>(std::llround(v * 100.0)) / 100.0;
}

std::string worker_id(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "w%05zu", index);
    return buf;
}

std::string project_id(std::size_t seq) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%05zu", seq);
    return buf;
}

void check_rate(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw Error(Errc::InvalidSpec, std::string(name) + " must be a finite value >= 0");
    }
}

void check_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(Errc::InvalidSpec, std::string(name) + " must be in [0, 1]");
    }
}

void validate_spec(const CouplingSpec& spec, DateRange window) {
    if (window.day_count() < kMinWindowDays) {
        throw Error(Errc::InvalidSpec, "window must span at least 30 days");
    }
    if (spec.population.workers < 1) {
        throw Error(Errc::InvalidSpec, "population.workers must be >= 1");
    }
    if (spec.population.customers < 1) {
        throw Error(Errc::InvalidSpec, "population.customers must be >= 1");
    }
    check_probability(spec.population.power_worker_fraction, "power_worker_fraction");
    const auto& r = spec.base_rates;
    check_rate(r.signups_per_day, "signups_per_day");
    check_rate(r.grants_per_day, "grants_per_day");
    check_rate(r.projects_per_day, "projects_per_day");
    check_rate(r.credit_events_per_day, "credit_events_per_day");
    check_rate(r.withdrawals_per_day, "withdrawals_per_day");
    check_rate(r.casual_submissions_per_day, "casual_submissions_per_day");
    check_rate(r.power_submissions_per_day, "power_submissions_per_day");
    check_rate(r.payment_amount, "payment_amount");
    check_probability(r.review_probability, "review_probability");
    check_probability(r.casual_pass_rate, "casual_pass_rate");
    check_probability(r.power_pass_rate, "power_pass_rate");
    for (const auto& c : spec.pairs) {
        if (c.source == c.destination) {
            throw Error(Errc::InvalidSpec, "self-coupling is not allowed");
        }
        if (!(c.strength >= 0.0 && c.strength <= 1.0)) {
            throw Error(Errc::InvalidSpec, "coupling strength must be in [0, 1]");
        }
        if (c.lag < 1) throw Error(Errc::InvalidSpec, "coupling lag must be >= 1 day");
    }
}

}  // namespace

SynthResult generate(const CouplingSpec& spec, DateRange window) {
    validate_spec(spec, window);

    Rng rng(spec.seed);
    const auto days = static_cast<std::size_t>(window.day_count());
    const auto n_workers = static_cast<std::size_t>(spec.population.workers);
    const auto n_power = static_cast<std::size_t>(
        std::llround(spec.population.power_worker_fraction * static_cast<double>(n_workers)));

    SynthResult result;
    auto& truth = result.truth;
    truth.seed = spec.seed;
    truth.window = window;
    truth.couplings = spec.pairs;
    for (auto& series : truth.daily_values) series.assign(days, 0.0);

    // Workers 0..n_power-1 carry the power profile; signup order is shuffled
    // so the label does not correlate with tenure.
    std::vector<std::size_t> signup_order(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) signup_order[i] = i;
    rng.shuffle(signup_order);
    for (std::size_t i = 0; i < n_power; ++i) truth.power_workers.push_back(worker_id(i));
    std::sort(truth.power_workers.begin(), truth.power_workers.end());

    std::vector<std::size_t> active;          // signed-up worker indexes, signup order
    std::vector<std::size_t> grantable;       // signed-up workers without a grant
    std::vector<std::string> open_projects;
    std::size_t signup_cursor = 0;
    std::size_t project_seq = 0;
    std::size_t power_signed = 0;
    // The reported balance runs as its own mean-reverting process rather
    // than as paid-minus-withdrawn bookkeeping: a derived balance would
    // share each day's payment term with the Credit series and leak real
    // information flow into the zero-coupling case.
    const double balance_anchor =
        spec.base_rates.payment_amount * std::max(1.0, spec.base_rates.credit_events_per_day) * 2.0;
    double balance = balance_anchor;

    // Running prefix sums of realized values, for mean-normalized coupling
    // modulation.
    std::array<double, kDriverCount> value_sums{};
    auto modulation = [&](DriverKind destination, std::size_t t) {
        double m = 1.0;
        for (const auto& c : spec.pairs) {
            if (c.destination != destination || c.strength == 0.0) continue;
            const auto lag = static_cast<std::size_t>(c.lag);
            if (t < lag || t == 0) continue;
            const auto src = static_cast<std::size_t>(c.source);
            const double mean = value_sums[src] / static_cast<double>(t);
            if (!(mean > 1e-12)) continue;
            const double norm =
                std::clamp(truth.daily_values[src][t - lag] / mean, 0.0, 3.0);
            m *= (1.0 - c.strength) + c.strength * norm;
        }
        return std::clamp(m, 0.0, 10.0);
    };

    std::vector<EventRecord> records;
    auto emit = [&](EventRecord rec) {
        ++truth.emitted_by_kind[static_cast<std::size_t>(rec.kind)];
        records.push_back(std::move(rec));
    };
    auto value_of = [&](DriverKind d, std::size_t t) -> double& {
        return truth.daily_values[static_cast<std::size_t>(d)][t];
    };

    for (std::size_t t = 0; t < days; ++t) {
        const Date day = window.from + static_cast<std::int32_t>(t);
        const std::string month_key = YearMonth::containing(day).to_string();

        // signups, capped by the remaining pool
        std::size_t signups = rng.poisson(spec.base_rates.signups_per_day *
                                          modulation(DriverKind::User, t));
        signups = std::min(signups, n_workers - signup_cursor);
        for (std::size_t s = 0; s < signups; ++s) {
            const auto w = signup_order[signup_cursor++];
            active.push_back(w);
            grantable.push_back(w);
            if (w < n_power) ++power_signed;
            emit({day, EventKind::SignUp, worker_id(w), {}, {}, {}});
        }

        // staff grants to workers without one
        const auto grants = rng.poisson(spec.base_rates.grants_per_day *
                                        modulation(DriverKind::GreatUser, t));
        for (std::uint32_t g = 0; g < grants && !grantable.empty(); ++g) {
            const auto pick = rng.below(grantable.size());
            const auto w = grantable[pick];
            grantable[pick] = grantable.back();
            grantable.pop_back();
            emit({day, EventKind::GreatUserGranted, worker_id(w), {}, {}, {}});
        }

        // project openings
        const auto projects =
            rng.poisson(spec.base_rates.projects_per_day * modulation(DriverKind::Project, t));
        for (std::uint32_t p = 0; p < projects; ++p) {
            open_projects.push_back(project_id(project_seq++));
            emit({day, EventKind::ProjectOpened, {}, {}, {}, open_projects.back()});
        }
        value_of(DriverKind::Project, t) = projects;

        // submissions and same-day reviews
        if (!open_projects.empty()) {
            const double power_mod = modulation(DriverKind::SuperUser, t);
            for (const auto w : active) {
                const bool is_power = w < n_power;
                const double rate = is_power
                                        ? spec.base_rates.power_submissions_per_day * power_mod
                                        : spec.base_rates.casual_submissions_per_day;
                const auto submissions = rng.poisson(rate);
                if (submissions == 0) continue;
                const auto id = worker_id(w);
                for (std::uint32_t s = 0; s < submissions; ++s) {
                    const auto& project = open_projects[rng.below(open_projects.size())];
                    emit({day, EventKind::TaskSubmitted, id, {}, {}, project});
                    if (rng.bernoulli(spec.base_rates.review_probability)) {
                        const double pass_rate = is_power ? spec.base_rates.power_pass_rate
                                                          : spec.base_rates.casual_pass_rate;
                        emit({day, EventKind::TaskReviewed, id, {}, rng.bernoulli(pass_rate),
                              project});
                    }
                }
                ++truth.active_days_by_month[month_key][id];
            }
        }

        // credit payments; the per-day amount scale flips between a low and
        // a high regime so the Credit series has strong slope structure
        const double regime = rng.bernoulli(0.5) ? 1.6 : 0.4;
        const double credit_mod = modulation(DriverKind::Credit, t);
        const auto payments = rng.poisson(spec.base_rates.credit_events_per_day);
        double paid_total = 0.0;
        for (std::uint32_t p = 0; p < payments && !active.empty(); ++p) {
            const auto w = active[rng.below(active.size())];
            const double amount = round_cents(spec.base_rates.payment_amount * regime *
                                              credit_mod * (0.5 + rng.u01()));
            if (amount <= 0.0) continue;
            emit({day, EventKind::CreditPaid, worker_id(w), amount, {}, {}});
            paid_total += amount;
        }
        value_of(DriverKind::Credit, t) = paid_total;

        const auto withdrawals = rng.poisson(spec.base_rates.withdrawals_per_day *
                                             modulation(DriverKind::Withdraw, t));
        double withdrawn_total = 0.0;
        for (std::uint32_t wd = 0; wd < withdrawals && !active.empty(); ++wd) {
            const auto w = active[rng.below(active.size())];
            const double amount =
                round_cents(spec.base_rates.payment_amount * (0.3 + rng.u01()));
            if (amount <= 0.0) continue;
            emit({day, EventKind::Withdrawal, worker_id(w), amount, {}, {}});
            withdrawn_total += amount;
        }
        value_of(DriverKind::Withdraw, t) = withdrawn_total;

        const double balance_mod = modulation(DriverKind::RemainedCredit, t);
        const double reversion = 0.05 * (balance_anchor - balance);
        const double wobble = balance_anchor * 0.25 * (rng.u01() * 2.0 - 1.0);
        balance = std::max(
            0.0, round_cents(balance + reversion + wobble +
                             (balance_mod - 1.0) * spec.base_rates.payment_amount));
        emit({day, EventKind::BalanceSnapshot, {}, balance, {}, {}});
        value_of(DriverKind::RemainedCredit, t) = balance;

        value_of(DriverKind::User, t) = static_cast<double>(active.size());
        value_of(DriverKind::GreatUser, t) =
            static_cast<double>(active.size() - grantable.size());
        value_of(DriverKind::SuperUser, t) = static_cast<double>(power_signed);

        for (std::size_t d = 0; d < kDriverCount; ++d) {
            value_sums[d] += truth.daily_values[d][t];
        }
    }

    result.store = EventStore::from_records(std::move(records));
    return result;
}

namespace {

double get_or(const nlohmann::json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw Error(Errc::InvalidSpec, std::string(key) + " must be a number");
    }
    return obj[key].get<double>();
}

}  // namespace

CouplingSpec parse_coupling_spec(const std::string& json_text) try {
    const auto doc = nlohmann::json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::InvalidSpec, "coupling spec is not a JSON object");
    }

    CouplingSpec spec;
    if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();

    if (doc.contains("population")) {
        const auto& pop = doc["population"];
        spec.population.workers =
            static_cast<int>(get_or(pop, "workers", spec.population.workers));
        spec.population.customers =
            static_cast<int>(get_or(pop, "customers", spec.population.customers));
        spec.population.power_worker_fraction =
            get_or(pop, "power_worker_fraction", spec.population.power_worker_fraction);
    }
    if (doc.contains("base_rates")) {
        const auto& rates = doc["base_rates"];
        auto& r = spec.base_rates;
        r.signups_per_day = get_or(rates, "signups_per_day", r.signups_per_day);
        r.grants_per_day = get_or(rates, "grants_per_day", r.grants_per_day);
        r.projects_per_day = get_or(rates, "projects_per_day", r.projects_per_day);
        r.credit_events_per_day = get_or(rates, "credit_events_per_day", r.credit_events_per_day);
        r.withdrawals_per_day = get_or(rates, "withdrawals_per_day", r.withdrawals_per_day);
        r.casual_submissions_per_day =
            get_or(rates, "casual_submissions_per_day", r.casual_submissions_per_day);
        r.power_submissions_per_day =
            get_or(rates, "power_submissions_per_day", r.power_submissions_per_day);
        r.review_probability = get_or(rates, "review_probability", r.review_probability);
        r.casual_pass_rate = get_or(rates, "casual_pass_rate", r.casual_pass_rate);
        r.power_pass_rate = get_or(rates, "power_pass_rate", r.power_pass_rate);
        r.payment_amount = get_or(rates, "payment_amount", r.payment_amount);
    }
    if (doc.contains("couplings")) {
        if (!doc["couplings"].is_array()) {
            throw Error(Errc::InvalidSpec, "couplings must be an array");
        }
        for (const auto& item : doc["couplings"]) {
            Coupling c;
            const auto source = parse_driver(item.value("source", ""));
            const auto destination = parse_driver(item.value("destination", ""));
            if (!source || !destination) {
                throw Error(Errc::InvalidSpec, "coupling source/destination must name drivers");
            }
            c.source = *source;
            c.destination = *destination;
            c.strength = get_or(item, "strength", 0.0);
            c.lag = static_cast<int>(get_or(item, "lag", 1));
            spec.pairs.push_back(c);
        }
    }
    return spec;
} catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidSpec, std::string("malformed coupling spec: ") + e.what());
}

CouplingSpec parse_coupling_spec_file(const std::string& path, DateRange* window_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::UnreadableSource, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto text = buffer.str();
    const auto spec = parse_coupling_spec(text);

    if (window_out) {
        const auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.contains("window")) {
            std::optional<Date> from;
            std::optional<Date> to;
            try {
                from = Date::parse(doc["window"].value("from", ""));
                to = Date::parse(doc["window"].value("to", ""));
            } catch (const nlohmann::json::exception&) {
            }
            if (!from || !to) {
                throw Error(Errc::InvalidSpec, "window.from/window.to must be ISO dates");
            }
            *window_out = {*from, *to};
        }
    }
    return spec;
}

std::string coupling_spec_to_json(const CouplingSpec& spec, DateRange window) {
    nlohmann::ordered_json doc;
    doc["seed"] = spec.seed;
    doc["window"] = {{"from", window.from.to_string()}, {"to", window.to.to_string()}};
    doc["population"] = {{"workers", spec.population.workers},
                         {"customers", spec.population.customers},
                         {"power_worker_fraction", spec.population.power_worker_fraction}};
    const auto& r = spec.base_rates;
    doc["base_rates"] = {{"signups_per_day", r.signups_per_day},
                         {"grants_per_day", r.grants_per_day},
                         {"projects_per_day", r.projects_per_day},
                         {"credit_events_per_day", r.credit_events_per_day},
                         {"withdrawals_per_day", r.withdrawals_per_day},
                         {"casual_submissions_per_day", r.casual_submissions_per_day},
                         {"power_submissions_per_day", r.power_submissions_per_day},
                         {"review_probability", r.review_probability},
                         {"casual_pass_rate", r.casual_pass_rate},
                         {"power_pass_rate", r.power_pass_rate},
                         {"payment_amount", r.payment_amount}};
    auto couplings = nlohmann::ordered_json::array();
    for (const auto& c : spec.pairs) {
        couplings.push_back({{"source", std::string(driver_key(c.source))},
                             {"destination", std::string(driver_key(c.destination))},
                             {"strength", c.strength},
                             {"lag", c.lag}});
    }
    doc["couplings"] = std::move(couplings);
    return doc.dump(2) + "\n";
}

std::string truth_to_json(const GroundTruth& truth) {
    nlohmann::ordered_json doc;
    doc["seed"] = truth.seed;
    doc["window"] = {{"from", truth.window.from.to_string()},
                     {"to", truth.window.to.to_string()}};
    auto couplings = nlohmann::ordered_json::array();
    for (const auto& c : truth.couplings) {
        couplings.push_back({{"source", std::string(driver_key(c.source))},
                             {"destination", std::string(driver_key(c.destination))},
                             {"strength", c.strength},
                             {"lag", c.lag}});
    }
    doc["couplings"] = std::move(couplings);
    doc["power_workers"] = truth.power_workers;

    nlohmann::ordered_json by_kind;
    for (std::size_t i = 0; i < kEventKindCount; ++i) {
        by_kind[std::string(event_kind_key(static_cast<EventKind>(i)))] =
            truth.emitted_by_kind[i];
    }
    doc["emitted_by_kind"] = std::move(by_kind);

    nlohmann::ordered_json daily;
    for (std::size_t d = 0; d < kDriverCount; ++d) {
        daily[std::string(driver_key(static_cast<DriverKind>(d)))] = truth.daily_values[d];
    }
    doc["daily_values"] = std::move(daily);

    nlohmann::ordered_json months;
    for (const auto& [month, users] : truth.active_days_by_month) {
        nlohmann::ordered_json user_days;
        for (const auto& [user, count] : users) user_days[user] = count;
        months[month] = std::move(user_days);
    }
    doc["active_days_by_month"] = std::move(months);
    return doc.dump(2) + "\n";
}

}  // namespace netfx
