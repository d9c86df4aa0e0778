#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netfx/date.hpp"
#include "netfx/event_model.hpp"

namespace netfx {

enum class CohortKind { GreatUser, SuperUser, AllUsers };

std::string_view cohort_kind_key(CohortKind kind);  // "great_user" etc.

/// Rule parameters for Super-user selection. The retention metric is fixed
/// as distinct days with at least one submission, and the pass-rate floor is
/// fixed as the Stage-1 cluster mean; both are part of the rule, not knobs.
struct SuperUserCriteria {
    int recency_days = 14;
    Date reference_date;
    /// Stricter third condition: additionally require the user's first
    /// reviewed task to have passed.
    bool require_first_review_pass = false;
};

/// Selected user set; members map user_id to the day the user first
/// qualified. Membership is permanent once granted.
struct UserCohort {
    CohortKind kind = CohortKind::AllUsers;
    std::map<std::string, Date> members;
};

/// The nested selection stages evaluated at one date:
///   submitters >= stage1 (recent + above-mean retention)
///            >= stage2 (above-mean workload within stage1)
///            >= stage3 (pass rate >= stage1 mean, needs >= 1 review)
struct StageBreakdown {
    std::set<std::string> submitters;
    std::set<std::string> stage1;
    std::set<std::string> stage2;
    std::set<std::string> stage3;
};

/// Monthly active-days histogram: bucket d (1-based) counts cohort members
/// active on exactly d distinct days that month.
struct PowerUserCurve {
    YearMonth month;
    CohortKind cohort_kind = CohortKind::AllUsers;
    std::vector<std::uint32_t> buckets;  // size == days in month; buckets[d-1] is bucket d

    std::uint32_t count_for_days(int d) const {
        return buckets[static_cast<std::size_t>(d - 1)];
    }
    std::uint64_t total() const;
};

/// Quintile decomposition behind a smile index value. The partition splits
/// bucket indices 1..D into five contiguous ranges [lo, hi]; masses are the
/// bucket-count fractions per range. The index is
///   bottom + top - 2 * min(interior masses) - |bottom - top|
/// which is 0 for flat and pure-decay curves and grows toward 2 as mass
/// concentrates evenly on both extremes.
struct SmileBreakdown {
    double index = 0.0;
    std::array<double, 5> masses{};
    std::array<std::pair<int, int>, 5> partition{};
};

UserCohort great_user_cohort(const EventStore& store);

/// Everyone with a SignUp event; qualification is the first sign-up date.
UserCohort all_users_cohort(const EventStore& store);

/// Runs the three-stage rule day by day from the start of the store's span
/// through reference_date; a user's qualification date is the first day all
/// three conditions held.
UserCohort select_super_users(const EventStore& store, const SuperUserCriteria& criteria);

/// One-shot stage evaluation at criteria.reference_date, using only events
/// on or before that date.
StageBreakdown stage_breakdown(const EventStore& store, const SuperUserCriteria& criteria);

PowerUserCurve power_user_curve(const EventStore& store, const UserCohort& cohort,
                                YearMonth month);

SmileBreakdown smile_breakdown(const PowerUserCurve& curve);
double smile_index(const PowerUserCurve& curve);

std::string curve_to_csv(const PowerUserCurve& curve);    // active_days,count
std::string cohort_to_csv(const UserCohort& cohort);      // user_id,qualification_date

}  // namespace netfx
