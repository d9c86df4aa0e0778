#include "netfx/impact_analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "netfx/error.hpp"

namespace netfx {

namespace {

/// Half-up rounding to `decimals` places, exact via integer milli-units.
/// Values here are non-negative, so "half up" and "half away from zero"
/// coincide.
std::string format_fixed(double value, int decimals) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    const auto scaled = static_cast<long long>(std::llround(value * scale));
    const long long whole = scaled / static_cast<long long>(scale);
    const long long frac = scaled % static_cast<long long>(scale);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%lld.%0*lld", whole, decimals, frac);
    return buf;
}

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

}  // namespace

std::string format_au(double raw) {
    return format_fixed(raw * kAuScale, 3);
}

std::string format_score(double f) {
    return format_fixed(f, 2);
}

TEMatrix compute_matrix(const std::map<DriverKind, SymbolSeries>& series,
                        const HistoryConfig& cfg, unsigned threads) {
    std::array<const SymbolSeries*, kDriverCount> by_driver{};
    std::size_t length = 0;
    for (auto driver : kDriverOrder) {
        const auto it = series.find(driver);
        if (it == series.end()) {
            throw Error(Errc::MissingDriver,
                        "no symbol series for driver " + std::string(driver_key(driver)));
        }
        by_driver[static_cast<std::size_t>(driver)] = &it->second;
        if (length == 0) {
            length = it->second.size();
        } else if (it->second.size() != length) {
            throw Error(Errc::LengthMismatch, "driver symbol series differ in length");
        }
    }

    struct Pair {
        std::size_t source;
        std::size_t destination;
    };
    std::vector<Pair> pairs;
    pairs.reserve(kDriverCount * (kDriverCount - 1));
    for (std::size_t j = 0; j < kDriverCount; ++j) {
        for (std::size_t i = 0; i < kDriverCount; ++i) {
            if (i != j) pairs.push_back({j, i});
        }
    }

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(pairs.size()));

    TEMatrix matrix;
    // Each worker owns a disjoint slice of cells; each cell is computed
    // single-threaded, so results cannot depend on the worker count.
    auto compute_slice = [&](unsigned worker) {
        for (std::size_t p = worker; p < pairs.size(); p += threads) {
            const auto& [j, i] = pairs[p];
            const auto result = transfer_entropy(*by_driver[i], *by_driver[j], cfg);
            matrix.cells[j][i] = result.value;
        }
    };

    if (threads <= 1) {
        compute_slice(0);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) workers.emplace_back(compute_slice, w);
        for (auto& w : workers) w.join();
    }
    return matrix;
}

ImpactRanking normalize_impact(const TEMatrix& matrix) {
    double max_cell = 0.0;
    for (const auto& row : matrix.cells) {
        for (const auto& cell : row) {
            if (cell) max_cell = std::max(max_cell, *cell);
        }
    }
    if (max_cell <= 0.0) {
        throw Error(Errc::AllZero, "all matrix cells are zero; nothing to normalize");
    }

    ImpactRanking ranking;
    ranking.max_cell = max_cell;
    for (std::size_t j = 0; j < kDriverCount; ++j) {
        for (std::size_t i = 0; i < kDriverCount; ++i) {
            const auto& cell = matrix.cells[j][i];
            if (!cell) continue;
            ranking.entries.push_back({static_cast<DriverKind>(j), static_cast<DriverKind>(i),
                                       *cell / max_cell * 100.0});
        }
    }
    std::sort(ranking.entries.begin(), ranking.entries.end(),
              [](const ImpactEntry& a, const ImpactEntry& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.source != b.source) return a.source < b.source;
                  return a.destination < b.destination;
              });
    return ranking;
}

std::string render_au_table(const TEMatrix& matrix) {
    std::string out = "driver";
    for (auto driver : kDriverOrder) {
        out += ',';
        out += driver_display_name(driver);
    }
    out += '\n';
    for (auto source : kDriverOrder) {
        out += driver_display_name(source);
        for (auto destination : kDriverOrder) {
            out += ',';
            const auto& cell = matrix.at(source, destination);
            out += cell ? format_au(*cell) : "-";
        }
        out += '\n';
    }
    return out;
}

TEMatrix parse_au_table(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(Errc::UnreadableSource, "matrix CSV is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_line(line);
    if (header.size() != kDriverCount + 1) {
        throw Error(Errc::UnreadableSource, "matrix CSV header must have 8 columns");
    }
    for (std::size_t i = 0; i < kDriverCount; ++i) {
        const auto expected = driver_display_name(kDriverOrder[i]);
        if (header[i + 1] != expected) {
            throw Error(Errc::UnreadableSource,
                        "matrix CSV column " + std::to_string(i + 1) + " must be '" +
                            std::string(expected) + "'");
        }
    }

    TEMatrix matrix;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row >= kDriverCount) {
            throw Error(Errc::UnreadableSource, "matrix CSV has more than 7 data rows");
        }
        const auto fields = split_line(line);
        if (fields.size() != kDriverCount + 1) {
            throw Error(Errc::UnreadableSource,
                        "matrix CSV row " + std::to_string(row) + " must have 8 columns");
        }
        if (fields[0] != driver_display_name(kDriverOrder[row])) {
            throw Error(Errc::UnreadableSource,
                        "matrix CSV row label must be '" +
                            std::string(driver_display_name(kDriverOrder[row])) + "'");
        }
        for (std::size_t col = 0; col < kDriverCount; ++col) {
            const auto& field = fields[col + 1];
            if (field == "-") {
                if (col != row) {
                    throw Error(Errc::UnreadableSource, "'-' is only valid on the diagonal");
                }
                continue;
            }
            if (col == row) {
                throw Error(Errc::UnreadableSource, "diagonal cells must be '-'");
            }
            double au = 0.0;
            const auto* first = field.data();
            const auto* last = first + field.size();
            auto [ptr, ec] = std::from_chars(first, last, au);
            if (ec != std::errc{} || ptr != last || au < 0.0) {
                throw Error(Errc::UnreadableSource, "bad matrix cell '" + field + "'");
            }
            matrix.cells[row][col] = au / kAuScale;
        }
        ++row;
    }
    if (row != kDriverCount) {
        throw Error(Errc::UnreadableSource, "matrix CSV must have exactly 7 data rows");
    }
    return matrix;
}

TEMatrix parse_au_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::UnreadableSource, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_au_table(buffer.str());
}

std::string render_ranking(const ImpactRanking& ranking, std::optional<int> top_n) {
    std::string out = "pair,F\n";
    int emitted = 0;
    for (const auto& entry : ranking.entries) {
        if (top_n) {
            if (entry.score <= 0.0) break;
            if (emitted >= *top_n) break;
        }
        out += driver_display_name(entry.source);
        out += " to ";
        out += driver_display_name(entry.destination);
        out += ',';
        out += format_score(entry.score);
        out += '\n';
        ++emitted;
    }
    return out;
}

std::string matrix_to_json(const TEMatrix& matrix, const PairThresholds* thresholds) {
    nlohmann::ordered_json doc;
    doc["drivers"] = nlohmann::json::array();
    for (auto driver : kDriverOrder) doc["drivers"].push_back(std::string(driver_key(driver)));
    doc["au_scale"] = kAuScale;
    auto cells = nlohmann::ordered_json::array();
    for (auto source : kDriverOrder) {
        for (auto destination : kDriverOrder) {
            const auto& cell = matrix.at(source, destination);
            if (!cell) continue;
            nlohmann::ordered_json entry;
            entry["source"] = std::string(driver_key(source));
            entry["destination"] = std::string(driver_key(destination));
            entry["raw"] = *cell;
            entry["au"] = format_au(*cell);
            if (thresholds) {
                const auto it = thresholds->find({source, destination});
                if (it != thresholds->end()) entry["surrogate_threshold"] = it->second;
            }
            cells.push_back(std::move(entry));
        }
    }
    doc["cells"] = std::move(cells);
    return doc.dump(2) + "\n";
}

std::string ranking_to_json(const ImpactRanking& ranking) {
    nlohmann::ordered_json doc;
    doc["max_cell_raw"] = ranking.max_cell;
    auto entries = nlohmann::ordered_json::array();
    for (const auto& entry : ranking.entries) {
        nlohmann::ordered_json e;
        e["source"] = std::string(driver_key(entry.source));
        e["destination"] = std::string(driver_key(entry.destination));
        e["F"] = entry.score;
        entries.push_back(std::move(e));
    }
    doc["entries"] = std::move(entries);
    return doc.dump(2) + "\n";
}

ImpactRanking filter_paper_rows(const ImpactRanking& ranking) {
    ImpactRanking filtered;
    filtered.max_cell = ranking.max_cell;
    for (const auto& entry : ranking.entries) {
        const bool listed =
            std::any_of(kPaperRankingPairs.begin(), kPaperRankingPairs.end(),
                        [&](const auto& pair) {
                            return pair.first == entry.source && pair.second == entry.destination;
                        });
        if (listed) filtered.entries.push_back(entry);
    }
    return filtered;
}

}  // namespace netfx
