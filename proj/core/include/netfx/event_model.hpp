#pragma once

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netfx/date.hpp"

namespace netfx {

enum class EventKind : std::uint8_t {
    SignUp,
    GreatUserGranted,
    CreditPaid,
    Withdrawal,
    BalanceSnapshot,
    TaskSubmitted,
    TaskReviewed,
    ProjectOpened,
};

inline constexpr std::size_t kEventKindCount = 8;

std::string_view event_kind_key(EventKind kind);  // wire string, e.g. "credit_paid"
std::optional<EventKind> parse_event_kind(std::string_view key);

/// The seven daily analysis drivers, in the fixed table order used by all
/// rendered outputs.
enum class DriverKind : std::uint8_t {
    User,
    GreatUser,
    SuperUser,
    Credit,
    Withdraw,
    RemainedCredit,
    Project,
};

inline constexpr std::size_t kDriverCount = 7;

inline constexpr std::array<DriverKind, kDriverCount> kDriverOrder = {
    DriverKind::User,      DriverKind::GreatUser,      DriverKind::SuperUser,
    DriverKind::Credit,    DriverKind::Withdraw,       DriverKind::RemainedCredit,
    DriverKind::Project,
};

std::string_view driver_display_name(DriverKind driver);  // "Remained Credit"
std::string_view driver_key(DriverKind driver);           // "remained_credit"
std::optional<DriverKind> parse_driver(std::string_view text);  // accepts either form

/// One platform log event. Field presence is tied to the kind:
///   amount     <=> CreditPaid | Withdrawal | BalanceSnapshot, and >= 0
///   passed     <=> TaskReviewed
///   user_id    absent only for ProjectOpened and BalanceSnapshot
///   project_id <=> TaskSubmitted | TaskReviewed | ProjectOpened
struct EventRecord {
    Date timestamp;
    EventKind kind = EventKind::SignUp;
    std::optional<std::string> user_id;
    std::optional<double> amount;
    std::optional<bool> passed;
    std::optional<std::string> project_id;

    /// Schema check; returns a description of the first violation, if any.
    std::optional<std::string> violation() const;

    bool operator==(const EventRecord&) const = default;
};

struct DateSpan {
    Date first;
    Date last;

    bool operator==(const DateSpan&) const = default;
};

/// Immutable, chronologically sorted event log. Construction through
/// from_records() establishes the invariants (sorted by date, stable for
/// equal dates, span = min/max); after that the store is safe to share
/// across any number of concurrent readers.
class EventStore {
public:
    EventStore() = default;

    static EventStore from_records(std::vector<EventRecord> records);

    /// Keeps the given order and span untouched. Exists so audits and tests
    /// can hand validate_store() a store that breaks the invariants.
    static EventStore unchecked(std::vector<EventRecord> records,
                                std::optional<DateSpan> span = std::nullopt);

    const std::vector<EventRecord>& records() const { return records_; }
    std::optional<DateSpan> span() const { return span_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

    bool operator==(const EventStore&) const = default;

private:
    std::vector<EventRecord> records_;
    std::optional<DateSpan> span_;
};

enum class LogFormat { Jsonl, Csv };

struct IngestResult {
    EventStore store;
    std::size_t valid = 0;
    std::size_t skipped = 0;
    std::vector<std::string> skip_reasons;  // first few, for diagnostics
};

/// Reads a JSONL or CSV event log. Malformed records are skipped and
/// counted, never fatal; zero valid records raises EmptyInput.
IngestResult ingest_events(std::istream& in, LogFormat format);
IngestResult ingest_file(const std::string& path, LogFormat format);

struct ValidationReport {
    std::vector<std::string> violations;
    std::array<std::size_t, kEventKindCount> counts_by_kind{};

    bool ok() const { return violations.empty(); }
};

/// Report-only re-check of store invariants (record schemas, ordering,
/// span consistency) plus per-kind counts.
ValidationReport validate_store(const EventStore& store);

std::string to_jsonl(const EventStore& store);
std::string to_csv(const EventStore& store);

}  // namespace netfx
