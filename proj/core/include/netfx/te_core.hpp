#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>

#include "netfx/series_builder.hpp"

namespace netfx {

enum class LogBase { Bits, Nats };

/// History lengths for the transfer-entropy conditioning: k past symbols of
/// the destination, l past symbols of the source.
struct HistoryConfig {
    int k = 1;
    int l = 1;
    LogBase log_base = LogBase::Bits;
};

/// Sparse empirical counts of (next destination symbol, destination history,
/// source history) triples. Histories are encoded as base-alphabet integers;
/// sum of all counts equals total.
struct JointCounts {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;

    std::uint32_t dest_alphabet = 0;
    std::uint32_t src_alphabet = 0;
    int k = 1;
    int l = 1;
    std::uint64_t dest_hist_space = 1;  // dest_alphabet^k
    std::uint64_t src_hist_space = 1;   // src_alphabet^l

    std::uint64_t pack(std::uint64_t next, std::uint64_t dest_hist,
                       std::uint64_t src_hist) const {
        return (next * dest_hist_space + dest_hist) * src_hist_space + src_hist;
    }

    struct Triple {
        std::uint64_t next;
        std::uint64_t dest_hist;
        std::uint64_t src_hist;
    };
    Triple unpack(std::uint64_t key) const {
        Triple t{};
        t.src_hist = key % src_hist_space;
        key /= src_hist_space;
        t.dest_hist = key % dest_hist_space;
        t.next = key / dest_hist_space;
        return t;
    }

    /// Count for an explicit triple; histories given oldest symbol first.
    std::uint64_t count_of(std::uint16_t next, std::span<const std::uint16_t> dest_hist,
                           std::span<const std::uint16_t> src_hist) const;
};

struct TEResult {
    double value = 0.0;            // in log_base units, >= 0
    std::uint64_t sample_count = 0;  // number of tallied tuples
    DriverKind source = DriverKind::User;
    DriverKind destination = DriverKind::User;
};

/// Tallies one tuple per predicted index u in [max(k,l), N-1]:
/// (dest[u], dest[u-k..u-1], src[u-l..u-1]). total = N - max(k, l).
JointCounts joint_counts(const SymbolSeries& dest, const SymbolSeries& src,
                         const HistoryConfig& cfg);

/// Plug-in transfer entropy from src to dest: the Kullback-Leibler gain of
/// conditioning the next destination symbol on the source history as well as
/// the destination's own history. Zero-probability terms contribute nothing;
/// rounding artifacts within 1e-12 below zero are clamped to 0.
TEResult transfer_entropy(const SymbolSeries& dest, const SymbolSeries& src,
                          const HistoryConfig& cfg);

/// Independent verification path: materializes the dense joint table over
/// all dest_alphabet^(k+1) * src_alphabet^l cells (at most 1e6) and sums the
/// definition directly. Must agree with transfer_entropy within 1e-12.
TEResult brute_force_te_oracle(const SymbolSeries& dest, const SymbolSeries& src,
                               const HistoryConfig& cfg);

/// 95th percentile (nearest-rank) of TE over `trials` seeded random
/// permutations of the source. A small-sample bias floor for annotating
/// reported values, never for zeroing them out.
double shuffle_surrogate_threshold(const SymbolSeries& dest, const SymbolSeries& src,
                                   const HistoryConfig& cfg, int trials, std::uint64_t seed);

}  // namespace netfx
