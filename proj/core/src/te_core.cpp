#include "netfx/te_core.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

#include "netfx/error.hpp"
#include "netfx/rng.hpp"

namespace netfx {

namespace {

constexpr double kNegativeTolerance = 1e-12;
constexpr std::uint64_t kMaxOracleCells = 1'000'000;

double apply_log(double x, LogBase base) {
    return base == LogBase::Bits ? std::log2(x) : std::log(x);
}

double clamp_non_negative(double value) {
    if (value >= 0.0) return value;
    if (value >= -kNegativeTolerance) return 0.0;
    throw Error(Errc::InvalidArgument,
                "transfer entropy came out negative beyond rounding tolerance; "
                "this is a bug");
}

void check_inputs(const SymbolSeries& dest, const SymbolSeries& src,
                  const HistoryConfig& cfg) {
    if (cfg.k < 1 || cfg.l < 1) {
        throw Error(Errc::InvalidArgument, "history lengths k and l must be >= 1");
    }
    if (dest.size() != src.size()) {
        throw Error(Errc::LengthMismatch, "dest and src series must have equal length");
    }
    const auto max_hist = static_cast<std::size_t>(std::max(cfg.k, cfg.l));
    if (dest.size() < max_hist + 1) {
        throw Error(Errc::TooShort, "need at least max(k, l) + 1 symbols");
    }
    if (dest.alphabet_size == 0 || src.alphabet_size == 0) {
        throw Error(Errc::InvalidArgument, "alphabet_size must be positive");
    }
    for (auto s : dest.symbols) {
        if (s >= dest.alphabet_size) {
            throw Error(Errc::InvalidArgument, "destination symbol outside its alphabet");
        }
    }
    for (auto s : src.symbols) {
        if (s >= src.alphabet_size) {
            throw Error(Errc::InvalidArgument, "source symbol outside its alphabet");
        }
    }
}

/// alphabet^exponent with overflow guard.
std::uint64_t power_checked(std::uint64_t base, int exponent) {
    std::uint64_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > std::numeric_limits<std::uint64_t>::max() / base) {
            throw Error(Errc::AlphabetTooLarge, "history code space overflows 64 bits");
        }
        result *= base;
    }
    return result;
}

}  // namespace

std::uint64_t JointCounts::count_of(std::uint16_t next,
                                    std::span<const std::uint16_t> dest_hist,
                                    std::span<const std::uint16_t> src_hist) const {
    std::uint64_t dh = 0;
    for (auto s : dest_hist) dh = dh * dest_alphabet + s;
    std::uint64_t sh = 0;
    for (auto s : src_hist) sh = sh * src_alphabet + s;
    const auto it = counts.find(pack(next, dh, sh));
    return it == counts.end() ? 0 : it->second;
}

JointCounts joint_counts(const SymbolSeries& dest, const SymbolSeries& src,
                         const HistoryConfig& cfg) {
    check_inputs(dest, src, cfg);

    JointCounts jc;
    jc.dest_alphabet = dest.alphabet_size;
    jc.src_alphabet = src.alphabet_size;
    jc.k = cfg.k;
    jc.l = cfg.l;
    jc.dest_hist_space = power_checked(dest.alphabet_size, cfg.k);
    jc.src_hist_space = power_checked(src.alphabet_size, cfg.l);
    // the packed key (next, dest_hist, src_hist) must also fit
    const std::uint64_t next_and_dest = power_checked(dest.alphabet_size, cfg.k + 1);
    if (next_and_dest > std::numeric_limits<std::uint64_t>::max() / jc.src_hist_space) {
        throw Error(Errc::AlphabetTooLarge, "joint key space overflows 64 bits");
    }

    const auto n = dest.size();
    const auto start = static_cast<std::size_t>(std::max(cfg.k, cfg.l));

    // Rolling history codes in base alphabet over the last k (resp. l)
    // symbols ending at u-1.
    std::uint64_t dest_code = 0;
    for (std::size_t i = start - static_cast<std::size_t>(cfg.k); i < start; ++i) {
        dest_code = dest_code * dest.alphabet_size + dest.symbols[i];
    }
    std::uint64_t src_code = 0;
    for (std::size_t i = start - static_cast<std::size_t>(cfg.l); i < start; ++i) {
        src_code = src_code * src.alphabet_size + src.symbols[i];
    }
    const std::uint64_t dest_drop = jc.dest_hist_space / dest.alphabet_size;
    const std::uint64_t src_drop = jc.src_hist_space / src.alphabet_size;

    for (std::size_t u = start; u < n; ++u) {
        ++jc.counts[jc.pack(dest.symbols[u], dest_code, src_code)];
        ++jc.total;
        // slide both histories one step forward: drop the oldest symbol,
        // append symbol u (the next window ends at u)
        dest_code = (dest_code % dest_drop) * dest.alphabet_size + dest.symbols[u];
        src_code = (src_code % src_drop) * src.alphabet_size + src.symbols[u];
    }

    assert(jc.total == n - start);
    return jc;
}

TEResult transfer_entropy(const SymbolSeries& dest, const SymbolSeries& src,
                          const HistoryConfig& cfg) {
    const JointCounts jc = joint_counts(dest, src, cfg);

    // Sparse marginals from the triple counts:
    //   hist_pair  (dest_hist, src_hist)
    //   next_dest  (next, dest_hist)
    //   dest_hist  (dest_hist)
    std::unordered_map<std::uint64_t, std::uint64_t> hist_pair;
    std::unordered_map<std::uint64_t, std::uint64_t> next_dest;
    std::unordered_map<std::uint64_t, std::uint64_t> dest_hist;
    hist_pair.reserve(jc.counts.size());
    next_dest.reserve(jc.counts.size());
    for (const auto& [key, count] : jc.counts) {
        const auto t = jc.unpack(key);
        hist_pair[t.dest_hist * jc.src_hist_space + t.src_hist] += count;
        next_dest[t.next * jc.dest_hist_space + t.dest_hist] += count;
        dest_hist[t.dest_hist] += count;
    }

    // T = sum over observed triples of
    //     p(next, dh, sh) * log[ p(next | dh, sh) / p(next | dh) ]
    // computed from counts; the totals cancel inside the log.
    double sum = 0.0;
    for (const auto& [key, c_triple] : jc.counts) {
        const auto t = jc.unpack(key);
        const auto c_pair = hist_pair[t.dest_hist * jc.src_hist_space + t.src_hist];
        const auto c_nd = next_dest[t.next * jc.dest_hist_space + t.dest_hist];
        const auto c_dh = dest_hist[t.dest_hist];
        const double ratio = (static_cast<double>(c_triple) * static_cast<double>(c_dh)) /
                             (static_cast<double>(c_pair) * static_cast<double>(c_nd));
        sum += static_cast<double>(c_triple) * apply_log(ratio, cfg.log_base);
    }

    TEResult result;
    result.value = clamp_non_negative(sum / static_cast<double>(jc.total));
    result.sample_count = jc.total;
    result.source = src.source_driver;
    result.destination = dest.source_driver;
    return result;
}

TEResult brute_force_te_oracle(const SymbolSeries& dest, const SymbolSeries& src,
                               const HistoryConfig& cfg) {
    check_inputs(dest, src, cfg);

    const std::uint64_t dest_hist_space = power_checked(dest.alphabet_size, cfg.k);
    const std::uint64_t src_hist_space = power_checked(src.alphabet_size, cfg.l);
    const std::uint64_t next_space = dest.alphabet_size;
    if (src_hist_space > kMaxOracleCells / (dest_hist_space * next_space)) {
        throw Error(Errc::AlphabetTooLarge,
                    "dense joint table would exceed the enumerable cell budget");
    }
    const std::uint64_t cells = next_space * dest_hist_space * src_hist_space;

    // Dense tally over every cell, indexed (next, dest_hist, src_hist)
    // row-major, filled by direct enumeration of the sample.
    std::vector<std::uint64_t> table(cells, 0);
    const auto n = dest.size();
    const auto start = static_cast<std::size_t>(std::max(cfg.k, cfg.l));
    const std::uint64_t total = n - start;
    for (std::size_t u = start; u < n; ++u) {
        std::uint64_t dh = 0;
        for (std::size_t i = u - static_cast<std::size_t>(cfg.k); i < u; ++i) {
            dh = dh * dest.alphabet_size + dest.symbols[i];
        }
        std::uint64_t sh = 0;
        for (std::size_t i = u - static_cast<std::size_t>(cfg.l); i < u; ++i) {
            sh = sh * src.alphabet_size + src.symbols[i];
        }
        ++table[(dest.symbols[u] * dest_hist_space + dh) * src_hist_space + sh];
    }

    // Dense marginal tables.
    std::vector<std::uint64_t> pair_table(dest_hist_space * src_hist_space, 0);
    std::vector<std::uint64_t> next_dest_table(next_space * dest_hist_space, 0);
    std::vector<std::uint64_t> dest_hist_table(dest_hist_space, 0);
    for (std::uint64_t next = 0; next < next_space; ++next) {
        for (std::uint64_t dh = 0; dh < dest_hist_space; ++dh) {
            for (std::uint64_t sh = 0; sh < src_hist_space; ++sh) {
                const auto c = table[(next * dest_hist_space + dh) * src_hist_space + sh];
                pair_table[dh * src_hist_space + sh] += c;
                next_dest_table[next * dest_hist_space + dh] += c;
                dest_hist_table[dh] += c;
            }
        }
    }

    // Direct evaluation of the definition over the full probability table.
    double sum = 0.0;
    const auto denom = static_cast<double>(total);
    for (std::uint64_t next = 0; next < next_space; ++next) {
        for (std::uint64_t dh = 0; dh < dest_hist_space; ++dh) {
            for (std::uint64_t sh = 0; sh < src_hist_space; ++sh) {
                const auto c = table[(next * dest_hist_space + dh) * src_hist_space + sh];
                if (c == 0) continue;
                const double p_joint = static_cast<double>(c) / denom;
                const double p_pair =
                    static_cast<double>(pair_table[dh * src_hist_space + sh]) / denom;
                const double p_nd =
                    static_cast<double>(next_dest_table[next * dest_hist_space + dh]) / denom;
                const double p_dh = static_cast<double>(dest_hist_table[dh]) / denom;
                sum += p_joint * apply_log((p_joint * p_dh) / (p_pair * p_nd), cfg.log_base);
            }
        }
    }

    TEResult result;
    result.value = clamp_non_negative(sum);
    result.sample_count = total;
    result.source = src.source_driver;
    result.destination = dest.source_driver;
    return result;
}

double shuffle_surrogate_threshold(const SymbolSeries& dest, const SymbolSeries& src,
                                   const HistoryConfig& cfg, int trials,
                                   std::uint64_t seed) {
    if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
    check_inputs(dest, src, cfg);

    Rng rng(seed);
    SymbolSeries shuffled = src;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        rng.shuffle(shuffled.symbols);
        values.push_back(transfer_entropy(dest, shuffled, cfg).value);
    }
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(trials)));
    return values[rank - 1];
}

}  // namespace netfx
