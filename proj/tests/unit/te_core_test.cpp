#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <utility>

#include "netfx/error.hpp"
#include "netfx/rng.hpp"
#include "netfx/te_core.hpp"

using namespace netfx;

namespace {

SymbolSeries series(std::vector<std::uint16_t> symbols, std::uint32_t alphabet) {
    SymbolSeries s;
    s.symbols = std::move(symbols);
    s.alphabet_size = alphabet;
    return s;
}

SymbolSeries random_series(std::size_t n, std::uint32_t alphabet, Rng& rng) {
    SymbolSeries s;
    s.alphabet_size = alphabet;
    s.symbols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.symbols.push_back(static_cast<std::uint16_t>(rng.below(alphabet)));
    }
    return s;
}

/// Fair binary source plus a one-step copy channel: dest[t+1] = src[t].
std::pair<SymbolSeries, SymbolSeries> copy_channel(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    SymbolSeries src = random_series(n, 2, rng);
    SymbolSeries dest;
    dest.alphabet_size = 2;
    dest.symbols.assign(n, 0);
    for (std::size_t t = 1; t < n; ++t) dest.symbols[t] = src.symbols[t - 1];
    return {dest, src};
}

constexpr HistoryConfig kDefault{1, 1, LogBase::Bits};

}  // namespace

TEST_CASE("joint counts: constant pair produces a single key") {
    const auto dest = series({0, 0, 0, 0}, 2);
    const auto src = series({1, 1, 1, 1}, 2);
    const auto jc = joint_counts(dest, src, kDefault);
    CHECK(jc.total == 3);
    CHECK(jc.counts.size() == 1);
    const std::uint16_t dh[] = {0};
    const std::uint16_t sh[] = {1};
    CHECK(jc.count_of(0, dh, sh) == 3);
}

TEST_CASE("joint counts match a hand enumeration of the three tuples") {
    // dest = src = [0,1,0,1]; predicted indexes u = 1,2,3 give
    //   u=1: (1, [0], [0])   u=2: (0, [1], [1])   u=3: (1, [0], [0])
    const auto dest = series({0, 1, 0, 1}, 2);
    const auto jc = joint_counts(dest, dest, kDefault);
    CHECK(jc.total == 3);
    CHECK(jc.counts.size() == 2);
    const std::uint16_t zero[] = {0};
    const std::uint16_t one[] = {1};
    CHECK(jc.count_of(1, zero, zero) == 2);
    CHECK(jc.count_of(0, one, one) == 1);
}

TEST_CASE("joint counts with k=2, l=1 against direct enumeration") {
    const auto dest = series({0, 1, 1, 0, 1}, 2);
    const auto src = series({1, 0, 1, 1, 0}, 2);
    const auto jc = joint_counts(dest, src, {2, 1, LogBase::Bits});
    CHECK(jc.total == 3);
    // u=2: (1, [0,1], [0]); u=3: (0, [1,1], [1]); u=4: (1, [1,0], [1])
    const std::uint16_t h01[] = {0, 1};
    const std::uint16_t h11[] = {1, 1};
    const std::uint16_t h10[] = {1, 0};
    const std::uint16_t s0[] = {0};
    const std::uint16_t s1[] = {1};
    CHECK(jc.count_of(1, h01, s0) == 1);
    CHECK(jc.count_of(0, h11, s1) == 1);
    CHECK(jc.count_of(1, h10, s1) == 1);
}

TEST_CASE("series as long as max(k,l) is TooShort") {
    const auto dest = series({0, 1}, 2);
    try {
        joint_counts(dest, dest, {2, 1, LogBase::Bits});
        FAIL("expected TooShort");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::TooShort);
    }
    CHECK_THROWS_AS(transfer_entropy(series({0}, 2), series({0}, 2), kDefault), Error);
}

TEST_CASE("length mismatch is rejected") {
    CHECK_THROWS_AS(transfer_entropy(series({0, 1, 0}, 2), series({0, 1}, 2), kDefault), Error);
}

TEST_CASE("marginalizing source history recovers (next, dest_history) counts") {
    Rng rng(404);
    for (int trial = 0; trial < 20; ++trial) {
        const auto n = 10 + rng.below(200);
        const auto dest = random_series(n, 3, rng);
        const auto src = random_series(n, 2, rng);
        const auto jc = joint_counts(dest, src, kDefault);

        std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> marginal;
        for (const auto& [key, count] : jc.counts) {
            const auto t = jc.unpack(key);
            marginal[{t.next, t.dest_hist}] += count;
        }
        // recount directly from the sequences
        std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> expected;
        for (std::size_t u = 1; u < dest.size(); ++u) {
            expected[{dest.symbols[u], dest.symbols[u - 1]}] += 1;
        }
        CHECK(marginal == expected);

        std::uint64_t sum = 0;
        for (const auto& [key, count] : jc.counts) sum += count;
        CHECK(sum == jc.total);
    }
}

TEST_CASE("constant source gives exactly zero") {
    Rng rng(7);
    const auto dest = random_series(500, 3, rng);
    const auto src = series(std::vector<std::uint16_t>(500, 1), 3);
    CHECK(transfer_entropy(dest, src, kDefault).value == 0.0);
    CHECK(brute_force_te_oracle(dest, src, kDefault).value == 0.0);
}

TEST_CASE("deterministic destination gives exactly zero") {
    std::vector<std::uint16_t> alternating;
    for (int i = 0; i < 100; ++i) alternating.push_back(static_cast<std::uint16_t>(i % 2));
    const auto dest = series(alternating, 2);
    CHECK(transfer_entropy(dest, dest, kDefault).value == 0.0);
}

TEST_CASE("copy channel calibrates to one bit and is strongly asymmetric") {
    const auto [dest, src] = copy_channel(100000, 1234);

    const auto forward = transfer_entropy(dest, src, kDefault);
    CHECK(forward.value == doctest::Approx(1.0).epsilon(0.01));
    CHECK(forward.sample_count == 99999);

    const auto reverse = transfer_entropy(src, dest, kDefault);
    CHECK(reverse.value < 0.01);

    CHECK(forward.value - reverse.value > 0.5);

    // the estimator must agree with the dense oracle on the same data
    const auto oracle = brute_force_te_oracle(dest, src, kDefault);
    CHECK(std::fabs(forward.value - oracle.value) <= 1e-12);
}

TEST_CASE("independent sequences sit at the plug-in bias floor") {
    Rng rng(777);
    const auto dest = random_series(100000, 2, rng);
    const auto src = random_series(100000, 2, rng);
    CHECK(transfer_entropy(dest, src, kDefault).value < 0.001);
}

TEST_CASE("nats differ from bits by ln 2") {
    const auto [dest, src] = copy_channel(5000, 99);
    const auto bits = transfer_entropy(dest, src, {1, 1, LogBase::Bits});
    const auto nats = transfer_entropy(dest, src, {1, 1, LogBase::Nats});
    CHECK(nats.value == doctest::Approx(bits.value * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("oracle equivalence over 200 random instances") {
    Rng rng(2025);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 10 + rng.below(491);  // N in [10, 500]
        const auto alphabet = static_cast<std::uint32_t>(2 + rng.below(2));
        const HistoryConfig cfg{static_cast<int>(1 + rng.below(2)),
                                static_cast<int>(1 + rng.below(2)), LogBase::Bits};
        const auto dest = random_series(n, alphabet, rng);
        const auto src = random_series(n, alphabet, rng);

        const auto estimate = transfer_entropy(dest, src, cfg);
        const auto oracle = brute_force_te_oracle(dest, src, cfg);
        REQUIRE(std::fabs(estimate.value - oracle.value) <= 1e-12);
        REQUIRE(estimate.sample_count == oracle.sample_count);
    }
}

TEST_CASE("non-negativity holds over random instances") {
    Rng rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 5 + rng.below(300);
        const auto dest = random_series(n, 2 + static_cast<std::uint32_t>(rng.below(3)), rng);
        const auto src = random_series(n, 2 + static_cast<std::uint32_t>(rng.below(3)), rng);
        CHECK(transfer_entropy(dest, src, kDefault).value >= 0.0);
    }
}

TEST_CASE("oracle rejects alphabets beyond the cell budget") {
    Rng rng(5);
    auto dest = random_series(50, 101, rng);
    auto src = random_series(50, 101, rng);
    try {
        brute_force_te_oracle(dest, src, {2, 1, LogBase::Bits});  // 101^4 > 1e6
        FAIL("expected AlphabetTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AlphabetTooLarge);
    }
}

TEST_CASE("surrogate threshold: one trial is the TE of one seeded permutation") {
    Rng rng(909);
    const auto dest = random_series(184, 3, rng);
    const auto src = random_series(184, 3, rng);

    const double once = shuffle_surrogate_threshold(dest, src, kDefault, 1, 42);
    CHECK(once == shuffle_surrogate_threshold(dest, src, kDefault, 1, 42));

    // white-box mirror of the permutation contract
    Rng shuffler(42);
    auto permuted = src;
    shuffler.shuffle(permuted.symbols);
    CHECK(once == transfer_entropy(dest, permuted, kDefault).value);
}

TEST_CASE("surrogate threshold separates coupled from independent pairs") {
    const auto [dest, src] = copy_channel(20000, 11);
    const double true_te = transfer_entropy(dest, src, kDefault).value;
    const double threshold = shuffle_surrogate_threshold(dest, src, kDefault, 50, 3);
    CHECK(true_te > threshold);

    // independent pair at a half-year daily scale: the threshold should
    // cover the true value for most seeds
    int covered = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng pair_rng(900 + seed);
        const auto d = random_series(184, 2, pair_rng);
        const auto s = random_series(184, 2, pair_rng);
        const double te = transfer_entropy(d, s, kDefault).value;
        const double thr = shuffle_surrogate_threshold(d, s, kDefault, 200, seed);
        if (te <= thr) ++covered;
    }
    CHECK(covered >= 18);
}

TEST_CASE("results are bit-identical across repeated runs") {
    Rng rng(616);
    const auto dest = random_series(2000, 3, rng);
    const auto src = random_series(2000, 3, rng);
    const auto first = transfer_entropy(dest, src, kDefault);
    const auto second = transfer_entropy(dest, src, kDefault);
    CHECK(first.value == second.value);
    CHECK(shuffle_surrogate_threshold(dest, src, kDefault, 25, 8) ==
          shuffle_surrogate_threshold(dest, src, kDefault, 25, 8));
}
