#include "netfx/cohorts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netfx/error.hpp"

namespace netfx {

namespace {

struct DayTally {
    Date day;
    std::uint32_t count = 0;
};

struct ReviewTally {
    Date day;
    std::uint32_t reviews = 0;
    std::uint32_t passes = 0;
};

// Per-user activity history plus sweep cursors. The cursors only move
// forward, so a full daily sweep over the span costs O(users x days +
// events) overall.
struct UserActivity {
    std::string id;
    std::vector<DayTally> submission_days;  // distinct days, ascending
    std::vector<ReviewTally> review_days;   // ascending
    bool first_review_passed = false;

    // cursors and absorbed totals, valid up to the sweep's current day
    std::size_t sub_idx = 0;     // first submission-day entry not yet absorbed
    std::size_t recent_idx = 0;  // first absorbed entry still inside the recency window
    std::size_t rev_idx = 0;
    std::uint64_t active_days = 0;
    std::uint64_t total_submissions = 0;
    std::uint64_t total_reviews = 0;
    std::uint64_t total_passes = 0;
};

class SelectionSweep {
public:
    explicit SelectionSweep(const EventStore& store) {
        std::map<std::string, std::size_t> index;
        auto user_slot = [&](const std::string& id) -> UserActivity& {
            auto [it, inserted] = index.try_emplace(id, users_.size());
            if (inserted) {
                users_.emplace_back();
                users_.back().id = id;
            }
            return users_[it->second];
        };

        for (const auto& rec : store.records()) {
            if (rec.kind == EventKind::TaskSubmitted) {
                auto& u = user_slot(*rec.user_id);
                if (!u.submission_days.empty() && u.submission_days.back().day == rec.timestamp) {
                    ++u.submission_days.back().count;
                } else {
                    u.submission_days.push_back({rec.timestamp, 1});
                }
            } else if (rec.kind == EventKind::TaskReviewed) {
                auto& u = user_slot(*rec.user_id);
                if (u.review_days.empty()) u.first_review_passed = *rec.passed;
                if (!u.review_days.empty() && u.review_days.back().day == rec.timestamp) {
                    ++u.review_days.back().reviews;
                    u.review_days.back().passes += *rec.passed ? 1 : 0;
                } else {
                    u.review_days.push_back({rec.timestamp, 1, *rec.passed ? 1u : 0u});
                }
            }
        }
    }

    bool has_submissions() const {
        return std::any_of(users_.begin(), users_.end(),
                           [](const UserActivity& u) { return !u.submission_days.empty(); });
    }

    /// Absorbs all activity on or before `day` and slides the recency window.
    /// Days must be fed in non-decreasing order.
    void advance_to(Date day, int recency_days) {
        const Date window_floor = day - recency_days;  // window is (floor, day]
        for (auto& u : users_) {
            while (u.sub_idx < u.submission_days.size() &&
                   u.submission_days[u.sub_idx].day <= day) {
                ++u.active_days;
                u.total_submissions += u.submission_days[u.sub_idx].count;
                ++u.sub_idx;
            }
            while (u.recent_idx < u.sub_idx &&
                   u.submission_days[u.recent_idx].day <= window_floor) {
                ++u.recent_idx;
            }
            while (u.rev_idx < u.review_days.size() && u.review_days[u.rev_idx].day <= day) {
                u.total_reviews += u.review_days[u.rev_idx].reviews;
                u.total_passes += u.review_days[u.rev_idx].passes;
                ++u.rev_idx;
            }
        }
    }

    /// Runs the three stages against the currently absorbed state.
    void evaluate(const SuperUserCriteria& criteria, StageBreakdown* breakdown,
                  std::vector<std::size_t>* newly_qualified,
                  const std::vector<bool>& already_qualified) {
        std::uint64_t submitter_count = 0;
        std::uint64_t sum_active_days = 0;
        for (const auto& u : users_) {
            if (u.total_submissions > 0) {
                ++submitter_count;
                sum_active_days += u.active_days;
            }
        }
        if (submitter_count == 0) return;
        const double mean_active =
            static_cast<double>(sum_active_days) / static_cast<double>(submitter_count);

        stage1_.clear();
        std::uint64_t stage1_subs = 0;
        double stage1_rate_sum = 0.0;
        std::uint64_t stage1_reviewed = 0;
        for (std::size_t i = 0; i < users_.size(); ++i) {
            const auto& u = users_[i];
            if (u.total_submissions == 0) continue;
            const bool recent = u.recent_idx < u.sub_idx;
            if (!recent || !(static_cast<double>(u.active_days) > mean_active)) continue;
            stage1_.push_back(i);
            stage1_subs += u.total_submissions;
            if (u.total_reviews > 0) {
                stage1_rate_sum += static_cast<double>(u.total_passes) /
                                   static_cast<double>(u.total_reviews);
                ++stage1_reviewed;
            }
        }
        if (breakdown) {
            for (const auto& u : users_) {
                if (u.total_submissions > 0) breakdown->submitters.insert(u.id);
            }
            for (auto i : stage1_) breakdown->stage1.insert(users_[i].id);
        }
        if (stage1_.empty()) return;

        const double mean_workload =
            static_cast<double>(stage1_subs) / static_cast<double>(stage1_.size());
        const bool have_rate_floor = stage1_reviewed > 0;
        const double rate_floor =
            have_rate_floor ? stage1_rate_sum / static_cast<double>(stage1_reviewed) : 0.0;

        for (auto i : stage1_) {
            const auto& u = users_[i];
            if (!(static_cast<double>(u.total_submissions) > mean_workload)) continue;
            if (breakdown) breakdown->stage2.insert(u.id);

            if (u.total_reviews == 0 || !have_rate_floor) continue;
            const double rate =
                static_cast<double>(u.total_passes) / static_cast<double>(u.total_reviews);
            if (!(rate >= rate_floor)) continue;
            if (criteria.require_first_review_pass && !u.first_review_passed) continue;
            if (breakdown) breakdown->stage3.insert(u.id);
            if (newly_qualified && !already_qualified[i]) newly_qualified->push_back(i);
        }
    }

    const std::vector<UserActivity>& users() const { return users_; }

private:
    std::vector<UserActivity> users_;
    std::vector<std::size_t> stage1_;
};

void check_criteria(const SuperUserCriteria& criteria) {
    if (criteria.recency_days < 1) {
        throw Error(Errc::InvalidArgument, "recency_days must be >= 1");
    }
}

}  // namespace

std::string_view cohort_kind_key(CohortKind kind) {
    switch (kind) {
        case CohortKind::GreatUser: return "great_user";
        case CohortKind::SuperUser: return "super_user";
        case CohortKind::AllUsers: return "all_users";
    }
    return "unknown";
}

UserCohort great_user_cohort(const EventStore& store) {
    UserCohort cohort;
    cohort.kind = CohortKind::GreatUser;
    for (const auto& rec : store.records()) {
        if (rec.kind != EventKind::GreatUserGranted) continue;
        cohort.members.try_emplace(*rec.user_id, rec.timestamp);
    }
    return cohort;
}

UserCohort all_users_cohort(const EventStore& store) {
    UserCohort cohort;
    cohort.kind = CohortKind::AllUsers;
    for (const auto& rec : store.records()) {
        if (rec.kind != EventKind::SignUp) continue;
        cohort.members.try_emplace(*rec.user_id, rec.timestamp);
    }
    return cohort;
}

UserCohort select_super_users(const EventStore& store, const SuperUserCriteria& criteria) {
    check_criteria(criteria);
    const auto span = store.span();
    if (!span) throw Error(Errc::EmptyWindow, "store is empty");

    SelectionSweep sweep(store);
    if (!sweep.has_submissions()) {
        throw Error(Errc::NoSubmissions, "store contains no task submissions");
    }
    if (criteria.reference_date < span->first) {
        throw Error(Errc::EmptyWindow, "reference_date precedes the store's span");
    }

    // Past span.last + recency_days - 1 the recency window is empty, so no
    // further day can qualify anyone.
    const Date end =
        std::min(criteria.reference_date, span->last + (criteria.recency_days - 1));

    UserCohort cohort;
    cohort.kind = CohortKind::SuperUser;
    std::vector<bool> qualified(sweep.users().size(), false);
    std::vector<std::size_t> newly;
    for (Date day = span->first; day <= end; ++day) {
        sweep.advance_to(day, criteria.recency_days);
        newly.clear();
        sweep.evaluate(criteria, nullptr, &newly, qualified);
        for (auto i : newly) {
            qualified[i] = true;
            cohort.members.emplace(sweep.users()[i].id, day);
        }
    }
    return cohort;
}

StageBreakdown stage_breakdown(const EventStore& store, const SuperUserCriteria& criteria) {
    check_criteria(criteria);
    const auto span = store.span();
    if (!span) throw Error(Errc::EmptyWindow, "store is empty");

    SelectionSweep sweep(store);
    if (!sweep.has_submissions()) {
        throw Error(Errc::NoSubmissions, "store contains no task submissions");
    }

    StageBreakdown breakdown;
    sweep.advance_to(criteria.reference_date, criteria.recency_days);
    std::vector<bool> qualified(sweep.users().size(), false);
    sweep.evaluate(criteria, &breakdown, nullptr, qualified);
    return breakdown;
}

std::uint64_t PowerUserCurve::total() const {
    return std::accumulate(buckets.begin(), buckets.end(), std::uint64_t{0});
}

PowerUserCurve power_user_curve(const EventStore& store, const UserCohort& cohort,
                                YearMonth month) {
    const auto span = store.span();
    if (!span || month.last_day() < span->first || month.first_day() > span->last) {
        throw Error(Errc::MonthOutOfRange,
                    "month " + month.to_string() + " does not intersect the store span");
    }

    const Date month_first = month.first_day();
    const Date month_last = month.last_day();

    // Distinct submission days per user in the month; the store is sorted,
    // so tracking the last counted day deduplicates.
    std::map<std::string, std::pair<Date, int>> day_counts;
    for (const auto& rec : store.records()) {
        if (rec.kind != EventKind::TaskSubmitted) continue;
        if (rec.timestamp < month_first || rec.timestamp > month_last) continue;
        auto [it, inserted] = day_counts.try_emplace(*rec.user_id, rec.timestamp, 1);
        if (!inserted && it->second.first != rec.timestamp) {
            it->second.first = rec.timestamp;
            ++it->second.second;
        }
    }

    PowerUserCurve curve;
    curve.month = month;
    curve.cohort_kind = cohort.kind;
    curve.buckets.assign(static_cast<std::size_t>(month.day_count()), 0);
    for (const auto& [user, entry] : day_counts) {
        const auto member = cohort.members.find(user);
        if (member == cohort.members.end() || member->second > month_last) continue;
        curve.buckets[static_cast<std::size_t>(entry.second - 1)] += 1;
    }
    return curve;
}

SmileBreakdown smile_breakdown(const PowerUserCurve& curve) {
    const auto total = curve.total();
    if (total == 0) throw Error(Errc::EmptyCurve, "curve has no active users");

    const int day_count = static_cast<int>(curve.buckets.size());
    SmileBreakdown result;
    for (int q = 0; q < 5; ++q) {
        const int lo = q * day_count / 5 + 1;
        const int hi = (q + 1) * day_count / 5;
        result.partition[static_cast<std::size_t>(q)] = {lo, hi};
        std::uint64_t sum = 0;
        for (int d = lo; d <= hi; ++d) sum += curve.count_for_days(d);
        result.masses[static_cast<std::size_t>(q)] =
            static_cast<double>(sum) / static_cast<double>(total);
    }

    const double bottom = result.masses[0];
    const double top = result.masses[4];
    const double interior_min =
        std::min({result.masses[1], result.masses[2], result.masses[3]});
    result.index = bottom + top - 2.0 * interior_min - std::fabs(bottom - top);
    return result;
}

double smile_index(const PowerUserCurve& curve) {
    return smile_breakdown(curve).index;
}

std::string curve_to_csv(const PowerUserCurve& curve) {
    std::string out = "active_days,count\n";
    for (std::size_t d = 0; d < curve.buckets.size(); ++d) {
        out += std::to_string(d + 1);
        out += ',';
        out += std::to_string(curve.buckets[d]);
        out += '\n';
    }
    return out;
}

std::string cohort_to_csv(const UserCohort& cohort) {
    std::string out = "user_id,qualification_date\n";
    for (const auto& [user, date] : cohort.members) {
        out += user;
        out += ',';
        out += date.to_string();
        out += '\n';
    }
    return out;
}

}  // namespace netfx
