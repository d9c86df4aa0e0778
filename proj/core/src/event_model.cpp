#include "netfx/event_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "netfx/error.hpp"

namespace netfx {

namespace {

constexpr std::array<std::string_view, kEventKindCount> kKindKeys = {
    "sign_up",        "great_user_granted", "credit_paid",   "withdrawal",
    "balance_snapshot", "task_submitted",   "task_reviewed", "project_opened",
};

constexpr std::array<std::string_view, kDriverCount> kDriverKeys = {
    "user", "great_user", "super_user", "credit", "withdraw", "remained_credit", "project",
};

constexpr std::array<std::string_view, kDriverCount> kDriverNames = {
    "User", "Great User", "Super User", "Credit", "Withdraw", "Remained Credit", "Project",
};

bool amount_required(EventKind kind) {
    return kind == EventKind::CreditPaid || kind == EventKind::Withdrawal ||
           kind == EventKind::BalanceSnapshot;
}

bool user_forbidden(EventKind kind) {
    return kind == EventKind::ProjectOpened || kind == EventKind::BalanceSnapshot;
}

bool project_required(EventKind kind) {
    return kind == EventKind::TaskSubmitted || kind == EventKind::TaskReviewed ||
           kind == EventKind::ProjectOpened;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

// --- CSV helpers (RFC 4180, \n line endings) ---

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

bool split_csv_line(std::string_view line, std::vector<std::string>& fields) {
    fields.clear();
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) return false;
    fields.push_back(std::move(current));
    return true;
}

struct ParsedLine {
    std::optional<EventRecord> record;
    std::string error;
};

ParsedLine parse_jsonl_line(std::string_view line) {
    const auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) return {std::nullopt, "not a JSON object"};

    EventRecord rec;
    if (!doc.contains("ts") || !doc["ts"].is_string()) return {std::nullopt, "missing ts"};
    const auto ts = Date::parse(doc["ts"].get<std::string>());
    if (!ts) return {std::nullopt, "bad ts"};
    rec.timestamp = *ts;

    if (!doc.contains("kind") || !doc["kind"].is_string()) return {std::nullopt, "missing kind"};
    const auto kind = parse_event_kind(doc["kind"].get<std::string>());
    if (!kind) return {std::nullopt, "unknown kind"};
    rec.kind = *kind;

    if (doc.contains("user_id")) {
        if (!doc["user_id"].is_string()) return {std::nullopt, "user_id not a string"};
        rec.user_id = doc["user_id"].get<std::string>();
    }
    if (doc.contains("amount")) {
        if (!doc["amount"].is_number()) return {std::nullopt, "amount not a number"};
        rec.amount = doc["amount"].get<double>();
    }
    if (doc.contains("passed")) {
        if (!doc["passed"].is_boolean()) return {std::nullopt, "passed not a boolean"};
        rec.passed = doc["passed"].get<bool>();
    }
    if (doc.contains("project_id")) {
        if (!doc["project_id"].is_string()) return {std::nullopt, "project_id not a string"};
        rec.project_id = doc["project_id"].get<std::string>();
    }
    return {rec, {}};
}

ParsedLine parse_csv_row(const std::vector<std::string>& fields) {
    if (fields.size() != 6) return {std::nullopt, "expected 6 fields"};

    EventRecord rec;
    const auto ts = Date::parse(fields[0]);
    if (!ts) return {std::nullopt, "bad ts"};
    rec.timestamp = *ts;

    const auto kind = parse_event_kind(fields[1]);
    if (!kind) return {std::nullopt, "unknown kind"};
    rec.kind = *kind;

    if (!fields[2].empty()) rec.user_id = fields[2];
    if (!fields[3].empty()) {
        double v = 0.0;
        const auto* first = fields[3].data();
        const auto* last = first + fields[3].size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) return {std::nullopt, "bad amount"};
        rec.amount = v;
    }
    if (!fields[4].empty()) {
        if (fields[4] == "true") {
            rec.passed = true;
        } else if (fields[4] == "false") {
            rec.passed = false;
        } else {
            return {std::nullopt, "bad passed"};
        }
    }
    if (!fields[5].empty()) rec.project_id = fields[5];
    return {rec, {}};
}

constexpr std::string_view kCsvHeader = "ts,kind,user_id,amount,passed,project_id";
constexpr std::size_t kMaxSkipReasons = 20;

}  // namespace

std::string_view event_kind_key(EventKind kind) {
    return kKindKeys[static_cast<std::size_t>(kind)];
}

std::optional<EventKind> parse_event_kind(std::string_view key) {
    for (std::size_t i = 0; i < kKindKeys.size(); ++i) {
        if (kKindKeys[i] == key) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

std::string_view driver_display_name(DriverKind driver) {
    return kDriverNames[static_cast<std::size_t>(driver)];
}

std::string_view driver_key(DriverKind driver) {
    return kDriverKeys[static_cast<std::size_t>(driver)];
}

std::optional<DriverKind> parse_driver(std::string_view text) {
    for (std::size_t i = 0; i < kDriverCount; ++i) {
        if (kDriverKeys[i] == text || kDriverNames[i] == text) {
            return static_cast<DriverKind>(i);
        }
    }
    return std::nullopt;
}

std::optional<std::string> EventRecord::violation() const {
    const bool wants_amount = amount_required(kind);
    if (amount.has_value() != wants_amount) {
        return std::string(event_kind_key(kind)) +
               (wants_amount ? ": amount missing" : ": amount not allowed");
    }
    if (amount && (!(*amount >= 0.0) || !std::isfinite(*amount))) {
        return std::string(event_kind_key(kind)) + ": amount must be a finite value >= 0";
    }
    const bool wants_passed = kind == EventKind::TaskReviewed;
    if (passed.has_value() != wants_passed) {
        return std::string(event_kind_key(kind)) +
               (wants_passed ? ": passed missing" : ": passed not allowed");
    }
    if (user_forbidden(kind)) {
        if (user_id) return std::string(event_kind_key(kind)) + ": user_id not allowed";
    } else if (!user_id || user_id->empty()) {
        return std::string(event_kind_key(kind)) + ": user_id missing";
    }
    const bool wants_project = project_required(kind);
    if (project_id.has_value() != wants_project) {
        return std::string(event_kind_key(kind)) +
               (wants_project ? ": project_id missing" : ": project_id not allowed");
    }
    if (project_id && project_id->empty()) {
        return std::string(event_kind_key(kind)) + ": project_id empty";
    }
    return std::nullopt;
}

EventStore EventStore::from_records(std::vector<EventRecord> records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    EventStore store;
    if (!records.empty()) {
        store.span_ = DateSpan{records.front().timestamp, records.back().timestamp};
    }
    store.records_ = std::move(records);
    return store;
}

EventStore EventStore::unchecked(std::vector<EventRecord> records,
                                 std::optional<DateSpan> span) {
    EventStore store;
    if (span) {
        store.span_ = span;
    } else if (!records.empty()) {
        Date lo = records.front().timestamp;
        Date hi = lo;
        for (const auto& r : records) {
            lo = std::min(lo, r.timestamp);
            hi = std::max(hi, r.timestamp);
        }
        store.span_ = DateSpan{lo, hi};
    }
    store.records_ = std::move(records);
    return store;
}

IngestResult ingest_events(std::istream& in, LogFormat format) {
    if (!in.good()) throw Error(Errc::UnreadableSource, "cannot read input stream");

    IngestResult result;
    std::vector<EventRecord> records;
    std::string line;
    std::vector<std::string> fields;
    bool saw_header = false;
    std::size_t line_no = 0;

    auto note_skip = [&](const std::string& reason) {
        ++result.skipped;
        if (result.skip_reasons.size() < kMaxSkipReasons) {
            result.skip_reasons.push_back("line " + std::to_string(line_no) + ": " + reason);
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        if (format == LogFormat::Csv && !saw_header) {
            saw_header = true;
            if (line != kCsvHeader) {
                throw Error(Errc::UnreadableSource,
                            "CSV header must be exactly '" + std::string(kCsvHeader) + "'");
            }
            continue;
        }

        ParsedLine parsed;
        if (format == LogFormat::Jsonl) {
            parsed = parse_jsonl_line(line);
        } else if (!split_csv_line(line, fields)) {
            parsed = {std::nullopt, "unterminated quote"};
        } else {
            parsed = parse_csv_row(fields);
        }

        if (!parsed.record) {
            note_skip(parsed.error);
            continue;
        }
        if (auto why = parsed.record->violation()) {
            note_skip(*why);
            continue;
        }
        records.push_back(std::move(*parsed.record));
        ++result.valid;
    }

    if (in.bad()) throw Error(Errc::UnreadableSource, "read failure");
    if (records.empty()) throw Error(Errc::EmptyInput, "no valid records in input");

    result.store = EventStore::from_records(std::move(records));
    return result;
}

IngestResult ingest_file(const std::string& path, LogFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::UnreadableSource, "cannot open " + path);
    return ingest_events(in, format);
}

ValidationReport validate_store(const EventStore& store) {
    ValidationReport report;
    const auto& records = store.records();

    for (std::size_t i = 0; i < records.size(); ++i) {
        ++report.counts_by_kind[static_cast<std::size_t>(records[i].kind)];
        if (auto why = records[i].violation()) {
            report.violations.push_back("record " + std::to_string(i) + ": " + *why);
        }
        if (i > 0 && records[i].timestamp < records[i - 1].timestamp) {
            report.violations.push_back("record " + std::to_string(i) +
                                        ": out of chronological order");
        }
    }

    const auto span = store.span();
    if (records.empty()) {
        if (span) report.violations.push_back("empty store carries a date span");
    } else if (!span) {
        report.violations.push_back("non-empty store is missing its date span");
    } else {
        Date lo = records.front().timestamp;
        Date hi = lo;
        for (const auto& r : records) {
            lo = std::min(lo, r.timestamp);
            hi = std::max(hi, r.timestamp);
        }
        if (span->first != lo || span->last != hi) {
            report.violations.push_back("date span does not match record min/max dates");
        }
    }
    return report;
}

std::string to_jsonl(const EventStore& store) {
    std::string out;
    for (const auto& rec : store.records()) {
        nlohmann::ordered_json obj;
        obj["ts"] = rec.timestamp.to_string();
        obj["kind"] = std::string(event_kind_key(rec.kind));
        if (rec.user_id) obj["user_id"] = *rec.user_id;
        if (rec.amount) obj["amount"] = *rec.amount;
        if (rec.passed) obj["passed"] = *rec.passed;
        if (rec.project_id) obj["project_id"] = *rec.project_id;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::string to_csv(const EventStore& store) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& rec : store.records()) {
        out += rec.timestamp.to_string();
        out += ',';
        out += event_kind_key(rec.kind);
        out += ',';
        if (rec.user_id) out += csv_escape(*rec.user_id);
        out += ',';
        if (rec.amount) out += format_double(*rec.amount);
        out += ',';
        if (rec.passed) out += *rec.passed ? "true" : "false";
        out += ',';
        if (rec.project_id) out += csv_escape(*rec.project_id);
        out += '\n';
    }
    return out;
}

}  // namespace netfx
