#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netfx/te_core.hpp"

namespace netfx {

inline constexpr double kAuScale = 10000.0;

/// Pairwise transfer-entropy matrix over the seven drivers, raw (unscaled)
/// units. Row is the influencing source, column the destination; the
/// diagonal is undefined and rendered "-".
struct TEMatrix {
    std::array<std::array<std::optional<double>, kDriverCount>, kDriverCount> cells{};

    std::optional<double>& at(DriverKind source, DriverKind destination) {
        return cells[static_cast<std::size_t>(source)][static_cast<std::size_t>(destination)];
    }
    const std::optional<double>& at(DriverKind source, DriverKind destination) const {
        return cells[static_cast<std::size_t>(source)][static_cast<std::size_t>(destination)];
    }
};

struct ImpactEntry {
    DriverKind source;
    DriverKind destination;
    double score;  // F, in [0, 100]
};

/// All off-diagonal pairs scored as cell / max_cell * 100, sorted by score
/// descending with ties broken by (source, destination) driver order.
struct ImpactRanking {
    std::vector<ImpactEntry> entries;
    double max_cell = 0.0;  // raw TE value used as the denominator
};

/// The eleven source->destination pairs the reference ranking lists, in its
/// printed order; used by the --paper-rows filter.
inline constexpr std::array<std::pair<DriverKind, DriverKind>, 11> kPaperRankingPairs = {{
    {DriverKind::Credit, DriverKind::Project},
    {DriverKind::SuperUser, DriverKind::Project},
    {DriverKind::User, DriverKind::GreatUser},
    {DriverKind::User, DriverKind::RemainedCredit},
    {DriverKind::SuperUser, DriverKind::User},
    {DriverKind::GreatUser, DriverKind::RemainedCredit},
    {DriverKind::GreatUser, DriverKind::Credit},
    {DriverKind::GreatUser, DriverKind::Withdraw},
    {DriverKind::Withdraw, DriverKind::User},
    {DriverKind::RemainedCredit, DriverKind::Project},
    {DriverKind::RemainedCredit, DriverKind::Withdraw},
}};

/// Runs transfer_entropy for every ordered driver pair. All seven symbol
/// series must be present and equally long. Pairs are computed in parallel
/// (threads = 0 picks a sensible default) and assembled in fixed row-major
/// order, so output bytes never depend on the thread count.
TEMatrix compute_matrix(const std::map<DriverKind, SymbolSeries>& series,
                        const HistoryConfig& cfg, unsigned threads = 0);

ImpactRanking normalize_impact(const TEMatrix& matrix);

/// Fixed-layout CSV, cells in A.U. (raw x 10000, half-up to 3 decimals).
std::string render_au_table(const TEMatrix& matrix);

/// Inverse of render_au_table; accepts the same layout and returns raw
/// (unscaled) cells.
TEMatrix parse_au_table(std::string_view csv);
TEMatrix parse_au_table_file(const std::string& path);

/// Two-column ranking ("<src> to <dst>", F at 2 decimals). top_n keeps the
/// first n nonzero rows.
std::string render_ranking(const ImpactRanking& ranking,
                           std::optional<int> top_n = std::nullopt);

/// Optional per-pair surrogate thresholds, used purely as an annotation.
using PairThresholds = std::map<std::pair<DriverKind, DriverKind>, double>;

std::string matrix_to_json(const TEMatrix& matrix,
                           const PairThresholds* thresholds = nullptr);
std::string ranking_to_json(const ImpactRanking& ranking);

ImpactRanking filter_paper_rows(const ImpactRanking& ranking);

std::string format_au(double raw);     // 3-decimal half-up of raw * 10000
std::string format_score(double f);    // 2-decimal half-up

}  // namespace netfx
