#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "netfx/error.hpp"
#include "netfx/impact_analysis.hpp"
#include "netfx/rng.hpp"

using namespace netfx;

namespace {

TEMatrix fixture_matrix() {
    return parse_au_table_file(std::string(NETFX_TEST_DATA_DIR) + "/reference_matrix.csv");
}

double score_for(const ImpactRanking& ranking, DriverKind source, DriverKind destination) {
    for (const auto& e : ranking.entries) {
        if (e.source == source && e.destination == destination) return e.score;
    }
    FAIL("pair not present in ranking");
    return -1.0;
}

SymbolSeries random_symbols(std::size_t n, DriverKind driver, Rng& rng) {
    SymbolSeries s;
    s.alphabet_size = 3;
    s.source_driver = driver;
    for (std::size_t i = 0; i < n; ++i) {
        s.symbols.push_back(static_cast<std::uint16_t>(rng.below(3)));
    }
    return s;
}

}  // namespace

TEST_CASE("fixture normalization reproduces the reference scores") {
    const auto ranking = normalize_impact(fixture_matrix());
    CHECK(ranking.max_cell == doctest::Approx(142.585 / kAuScale).epsilon(1e-12));

    CHECK(score_for(ranking, DriverKind::Credit, DriverKind::Project) == 100.0);
    CHECK(format_score(score_for(ranking, DriverKind::SuperUser, DriverKind::Project)) ==
          "67.32");
    CHECK(format_score(score_for(ranking, DriverKind::Withdraw, DriverKind::User)) == "4.10");
    CHECK(ranking.entries.front().source == DriverKind::Credit);
    CHECK(ranking.entries.front().destination == DriverKind::Project);
}

TEST_CASE("reading direction: row is the influencing source") {
    const auto matrix = fixture_matrix();
    CHECK(*matrix.at(DriverKind::Credit, DriverKind::Project) ==
          doctest::Approx(142.585 / kAuScale).epsilon(1e-12));
    CHECK(*matrix.at(DriverKind::Project, DriverKind::Credit) == 0.0);

    const auto rendered = render_au_table(matrix);
    std::istringstream lines(rendered);
    std::string line;
    std::getline(lines, line);  // header
    for (int row = 0; row < 4; ++row) std::getline(lines, line);
    CHECK(line == "Credit,0.000,0.000,0.001,-,0.000,0.000,142.585");
}

TEST_CASE("a single nonzero cell scores 100 and everything else 0") {
    TEMatrix matrix;
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s != d) matrix.at(s, d) = 0.0;
        }
    }
    matrix.at(DriverKind::User, DriverKind::Project) = 0.0042;

    const auto ranking = normalize_impact(matrix);
    CHECK(ranking.entries.front().score == 100.0);
    CHECK(ranking.entries.front().source == DriverKind::User);
    for (std::size_t i = 1; i < ranking.entries.size(); ++i) {
        CHECK(ranking.entries[i].score == 0.0);
    }
}

TEST_CASE("all-zero matrix cannot be normalized") {
    TEMatrix matrix;
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s != d) matrix.at(s, d) = 0.0;
        }
    }
    try {
        normalize_impact(matrix);
        FAIL("expected AllZero");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::AllZero);
    }
}

TEST_CASE("au rendering: x10000, three decimals, half-up") {
    CHECK(format_au(0.0142585) == "142.585");
    CHECK(format_au(0.0) == "0.000");
    CHECK(format_au(0.0000001) == "0.001");
    CHECK(format_au(0.00000004) == "0.000");   // below the half-point
    CHECK(format_au(0.00000005) == "0.001");   // at the half-point, rounds up
    CHECK(format_au(0.0095994) == "95.994");
}

TEST_CASE("score rendering: two decimals, half-up") {
    CHECK(format_score(100.0) == "100.00");
    CHECK(format_score(67.3246) == "67.32");
    CHECK(format_score(4.0958) == "4.10");
    CHECK(format_score(0.005) == "0.01");
}

TEST_CASE("render then parse is the identity on 3-decimal A.U. values") {
    const auto matrix = fixture_matrix();
    const auto rendered = render_au_table(matrix);
    const auto reparsed = parse_au_table(rendered);
    CHECK(render_au_table(reparsed) == rendered);

    Rng rng(88);
    TEMatrix random;
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s != d) random.at(s, d) = rng.uniform(0.0, 0.05);
        }
    }
    const auto random_rendered = render_au_table(random);
    CHECK(render_au_table(parse_au_table(random_rendered)) == random_rendered);
}

TEST_CASE("parser rejects malformed tables") {
    CHECK_THROWS_AS(parse_au_table(""), Error);
    CHECK_THROWS_AS(parse_au_table("driver,User\nUser,-\n"), Error);
    const auto good = render_au_table(fixture_matrix());
    auto bad = good;
    bad.replace(bad.find("142.585"), 7, "-142.58");
    CHECK_THROWS_AS(parse_au_table(bad), Error);
}

TEST_CASE("scale invariance: scaling every cell leaves the ranking unchanged") {
    const auto base = normalize_impact(fixture_matrix());
    for (double scale : {1e-6, 0.5, 3.0, 1e6}) {
        auto matrix = fixture_matrix();
        for (auto& row : matrix.cells) {
            for (auto& cell : row) {
                if (cell) *cell *= scale;
            }
        }
        const auto scaled = normalize_impact(matrix);
        REQUIRE(scaled.entries.size() == base.entries.size());
        for (std::size_t i = 0; i < base.entries.size(); ++i) {
            CHECK(scaled.entries[i].source == base.entries[i].source);
            CHECK(scaled.entries[i].destination == base.entries[i].destination);
            CHECK(scaled.entries[i].score ==
                  doctest::Approx(base.entries[i].score).epsilon(1e-9));
        }
    }
}

TEST_CASE("ranking order is total: ties break on driver order and sorting is stable") {
    TEMatrix matrix;
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s != d) matrix.at(s, d) = 0.001;  // all tied
        }
    }
    const auto first = normalize_impact(matrix);
    const auto second = normalize_impact(matrix);
    REQUIRE(first.entries.size() == 42);
    CHECK(first.entries.front().source == DriverKind::User);
    CHECK(first.entries.front().destination == DriverKind::GreatUser);
    for (std::size_t i = 0; i < first.entries.size(); ++i) {
        CHECK(first.entries[i].source == second.entries[i].source);
        CHECK(first.entries[i].destination == second.entries[i].destination);
    }
    // every tied entry scores 100 here
    for (const auto& e : first.entries) CHECK(e.score == 100.0);
}

TEST_CASE("render_ranking truncates to top_n nonzero rows") {
    const auto ranking = normalize_impact(fixture_matrix());
    const auto top1 = render_ranking(ranking, 1);
    CHECK(top1 == "pair,F\nCredit to Project,100.00\n");

    const auto full = render_ranking(ranking);
    CHECK(full.find("Withdraw to User,4.10") != std::string::npos);
    // zero cells appear at the tail of the full rendering
    CHECK(full.find("Project to User,0.00") != std::string::npos);
}

TEST_CASE("paper-rows filter keeps exactly the eleven listed pairs in rank order") {
    const auto filtered = filter_paper_rows(normalize_impact(fixture_matrix()));
    REQUIRE(filtered.entries.size() == 11);
    const std::array<const char*, 11> expected = {
        "100.00", "67.32", "50.61", "29.85", "22.85", "21.42",
        "20.55",  "17.85", "4.10",  "3.46",  "0.92",
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(format_score(filtered.entries[i].score) == expected[i]);
    }
}

TEST_CASE("compute_matrix rejects missing drivers and mismatched lengths") {
    Rng rng(3);
    std::map<DriverKind, SymbolSeries> series;
    for (auto driver : kDriverOrder) {
        series.emplace(driver, random_symbols(50, driver, rng));
    }
    const HistoryConfig cfg{1, 1, LogBase::Bits};

    auto missing = series;
    missing.erase(DriverKind::Project);
    CHECK_THROWS_AS(compute_matrix(missing, cfg), Error);

    auto uneven = series;
    uneven.at(DriverKind::Credit).symbols.pop_back();
    CHECK_THROWS_AS(compute_matrix(uneven, cfg), Error);
}

TEST_CASE("matrix over identical constant series is all zeros") {
    std::map<DriverKind, SymbolSeries> series;
    for (auto driver : kDriverOrder) {
        SymbolSeries s;
        s.alphabet_size = 3;
        s.source_driver = driver;
        s.symbols.assign(100, 1);
        series.emplace(driver, std::move(s));
    }
    const auto matrix = compute_matrix(series, {1, 1, LogBase::Bits});
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s == d) {
                CHECK_FALSE(matrix.at(s, d).has_value());
            } else {
                CHECK(*matrix.at(s, d) == 0.0);
            }
        }
    }
}

TEST_CASE("matrix cells equal the brute-force oracle for every ordered pair") {
    Rng rng(1212);
    std::map<DriverKind, SymbolSeries> series;
    for (auto driver : kDriverOrder) {
        series.emplace(driver, random_symbols(200, driver, rng));
    }
    const HistoryConfig cfg{1, 1, LogBase::Bits};
    const auto matrix = compute_matrix(series, cfg);
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s == d) continue;
            const auto oracle = brute_force_te_oracle(series.at(d), series.at(s), cfg);
            CHECK(std::fabs(*matrix.at(s, d) - oracle.value) <= 1e-12);
        }
    }
}

TEST_CASE("matrix is identical no matter how many workers compute it") {
    Rng rng(77);
    std::map<DriverKind, SymbolSeries> series;
    for (auto driver : kDriverOrder) {
        series.emplace(driver, random_symbols(400, driver, rng));
    }
    const HistoryConfig cfg{1, 1, LogBase::Bits};
    const auto solo = compute_matrix(series, cfg, 1);
    const auto parallel = compute_matrix(series, cfg, 8);
    for (auto s : kDriverOrder) {
        for (auto d : kDriverOrder) {
            if (s == d) continue;
            CHECK(*solo.at(s, d) == *parallel.at(s, d));
        }
    }
}
