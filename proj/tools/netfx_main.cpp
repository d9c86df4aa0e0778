// netfx - directed-influence analytics for platform event logs.
//
// Subcommands: analyze (TE matrix + impact ranking), cohort (Great/Super
// user selection), curve (power-user curves), synth (synthetic log
// generator). All outputs are deterministic for a fixed config and seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "netfx/cohorts.hpp"
#include "netfx/error.hpp"
#include "netfx/event_model.hpp"
#include "netfx/impact_analysis.hpp"
#include "netfx/rng.hpp"
#include "netfx/series_builder.hpp"
#include "netfx/synthgen.hpp"
#include "netfx/te_core.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("NETFX_LOG");
        if (!env) return LogLevel::Error;
        const std::string value(env);
        if (value == "debug" || value == "2") return LogLevel::Debug;
        if (value == "info" || value == "1") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::Info) std::cerr << "[netfx] " << message << "\n";
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[netfx:debug] " << message << "\n";
}

unsigned env_threads() {
    const char* env = std::getenv("NETFX_THREADS");
    if (!env) return 0;
    const long value = std::strtol(env, nullptr, 10);
    return value > 0 ? static_cast<unsigned>(value) : 0;
}

struct CommonOptions {
    std::string input;
    bool seed_given = false;
    std::string format = "jsonl";
    std::string from;
    std::string to;
    std::string out = ".";
    int k = 1;
    int l = 1;
    std::string base = "bits";
    std::string disc = "slope";
    double epsilon = 0.0;
    int recency_days = 14;
    std::string reference_date;
    bool au = true;
    bool paper_rows = false;
    int surrogates = 0;
    std::uint64_t seed = 13;
    std::string from_matrix;
    bool dump_series = false;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

netfx::Date parse_date_flag(const std::string& text, const char* flag) {
    const auto date = netfx::Date::parse(text);
    if (!date) throw ConfigError(std::string(flag) + " must be an ISO date (YYYY-MM-DD)");
    return *date;
}

netfx::LogBase parse_base(const std::string& text) {
    if (text == "bits") return netfx::LogBase::Bits;
    if (text == "nats") return netfx::LogBase::Nats;
    throw ConfigError("--base must be 'bits' or 'nats'");
}

netfx::DiscretizationScheme parse_disc(const std::string& text, double epsilon) {
    if (text == "slope") return netfx::DiscretizationScheme::slope_sign(epsilon);
    if (text.rfind("quantile:", 0) == 0) {
        const int bins = std::atoi(text.c_str() + 9);
        if (bins < 2) throw ConfigError("--disc quantile:N needs N >= 2");
        return netfx::DiscretizationScheme::quantile(bins);
    }
    throw ConfigError("--disc must be 'slope' or 'quantile:N'");
}

netfx::LogFormat parse_format(const std::string& text) {
    if (text == "jsonl") return netfx::LogFormat::Jsonl;
    if (text == "csv") return netfx::LogFormat::Csv;
    throw ConfigError("--format must be 'jsonl' or 'csv'");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw netfx::Error(netfx::Errc::UnreadableSource, "cannot write " + path.string());
    out << content;
    log_info("wrote " + path.string());
}

ordered_json config_echo(const CommonOptions& opt) {
    ordered_json cfg;
    cfg["input"] = opt.input;
    cfg["format"] = opt.format;
    cfg["from"] = opt.from;
    cfg["to"] = opt.to;
    cfg["k"] = opt.k;
    cfg["l"] = opt.l;
    cfg["base"] = opt.base;
    cfg["disc"] = opt.disc;
    cfg["epsilon"] = opt.epsilon;
    cfg["recency_days"] = opt.recency_days;
    cfg["reference_date"] = opt.reference_date;
    cfg["au"] = opt.au;
    cfg["paper_rows"] = opt.paper_rows;
    cfg["surrogates"] = opt.surrogates;
    cfg["seed"] = opt.seed;
    cfg["from_matrix"] = opt.from_matrix;
    cfg["out"] = opt.out;
    return cfg;
}

struct LoadedStore {
    netfx::IngestResult ingest;
    netfx::DateRange window;
};

LoadedStore load_store(const CommonOptions& opt) {
    if (opt.input.empty()) throw ConfigError("--input is required");
    // config problems must surface before any I/O
    std::optional<netfx::Date> from;
    std::optional<netfx::Date> to;
    if (!opt.from.empty()) from = parse_date_flag(opt.from, "--from");
    if (!opt.to.empty()) to = parse_date_flag(opt.to, "--to");
    if (from && to && *from > *to) throw ConfigError("--from must not be after --to");
    if (!opt.reference_date.empty()) parse_date_flag(opt.reference_date, "--reference-date");

    auto ingest = netfx::ingest_file(opt.input, parse_format(opt.format));
    log_info("ingested " + std::to_string(ingest.valid) + " records, skipped " +
             std::to_string(ingest.skipped));

    const auto span = ingest.store.span();
    netfx::DateRange window{from.value_or(span->first), to.value_or(span->last)};
    if (window.empty()) throw ConfigError("window has no days");
    return {std::move(ingest), window};
}

netfx::SuperUserCriteria criteria_from(const CommonOptions& opt, netfx::DateRange window) {
    netfx::SuperUserCriteria criteria;
    criteria.recency_days = opt.recency_days;
    criteria.reference_date =
        opt.reference_date.empty() ? window.to
                                   : parse_date_flag(opt.reference_date, "--reference-date");
    return criteria;
}

std::string render_raw_table(const netfx::TEMatrix& matrix) {
    // same layout as the A.U. table but with full-precision raw cells
    std::string out = "driver";
    for (auto driver : netfx::kDriverOrder) {
        out += ',';
        out += netfx::driver_display_name(driver);
    }
    out += '\n';
    for (auto source : netfx::kDriverOrder) {
        out += netfx::driver_display_name(source);
        for (auto destination : netfx::kDriverOrder) {
            out += ',';
            const auto& cell = matrix.at(source, destination);
            if (cell) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", *cell);
                out += buf;
            } else {
                out += "-";
            }
        }
        out += '\n';
    }
    return out;
}

void write_analysis_artifacts(const CommonOptions& opt, const netfx::TEMatrix& matrix,
                              ordered_json manifest,
                              const netfx::PairThresholds* thresholds = nullptr) {
    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);

    auto ranking = netfx::normalize_impact(matrix);
    manifest["max_cell_raw"] = ranking.max_cell;
    const auto rendered_ranking = opt.paper_rows ? netfx::filter_paper_rows(ranking) : ranking;

    write_file(out_dir / "matrix.csv",
               opt.au ? netfx::render_au_table(matrix) : render_raw_table(matrix));
    write_file(out_dir / "ranking.csv", netfx::render_ranking(rendered_ranking));
    write_file(out_dir / "matrix.json", netfx::matrix_to_json(matrix, thresholds));
    write_file(out_dir / "ranking.json", netfx::ranking_to_json(rendered_ranking));

    manifest["outputs"] = {"matrix.csv", "ranking.csv", "matrix.json", "ranking.json"};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_analyze(const CommonOptions& opt) {
    ordered_json manifest;
    manifest["tool"] = "netfx";
    manifest["version"] = kVersion;
    manifest["command"] = "analyze";
    manifest["config"] = config_echo(opt);

    if (!opt.from_matrix.empty()) {
        const auto matrix = netfx::parse_au_table_file(opt.from_matrix);
        manifest["input_mode"] = "matrix_fixture";
        write_analysis_artifacts(opt, matrix, std::move(manifest));
        return 0;
    }

    auto [ingest, window] = load_store(opt);
    manifest["input_mode"] = "event_log";
    manifest["input_stats"] = {{"valid_records", ingest.valid},
                               {"skipped_records", ingest.skipped}};
    manifest["window"] = {{"from", window.from.to_string()}, {"to", window.to.to_string()}};

    const auto criteria = criteria_from(opt, window);
    const auto super_cohort = netfx::select_super_users(ingest.store, criteria);
    log_info("super-user cohort: " + std::to_string(super_cohort.members.size()) + " members");

    const auto scheme = parse_disc(opt.disc, opt.epsilon);
    netfx::HistoryConfig history{opt.k, opt.l, parse_base(opt.base)};

    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);

    std::map<netfx::DriverKind, netfx::SymbolSeries> symbols;
    for (auto driver : netfx::kDriverOrder) {
        const auto series =
            netfx::build_driver_series(ingest.store, driver, window,
                                       driver == netfx::DriverKind::SuperUser ? &super_cohort
                                                                              : nullptr);
        if (opt.dump_series) {
            write_file(out_dir / ("series_" + std::string(netfx::driver_key(driver)) + ".csv"),
                       netfx::series_to_csv(series));
        }
        symbols.emplace(driver, netfx::discretize(series, scheme));
    }

    const auto matrix = netfx::compute_matrix(symbols, history, env_threads());
    log_debug("matrix computed");

    netfx::PairThresholds thresholds;
    if (opt.surrogates > 0) {
        auto echoed = ordered_json::array();
        for (auto source : netfx::kDriverOrder) {
            for (auto destination : netfx::kDriverOrder) {
                if (source == destination) continue;
                const auto pair_seed = netfx::splitmix64(
                    opt.seed ^ (static_cast<std::uint64_t>(source) * 97 +
                                static_cast<std::uint64_t>(destination)));
                const double threshold = netfx::shuffle_surrogate_threshold(
                    symbols.at(destination), symbols.at(source), history, opt.surrogates,
                    pair_seed);
                thresholds.emplace(std::make_pair(source, destination), threshold);
                echoed.push_back({{"source", std::string(netfx::driver_key(source))},
                                  {"destination", std::string(netfx::driver_key(destination))},
                                  {"threshold", threshold}});
            }
        }
        manifest["surrogate_thresholds"] = std::move(echoed);
    }

    write_analysis_artifacts(opt, matrix, std::move(manifest),
                             thresholds.empty() ? nullptr : &thresholds);
    return 0;
}

int cmd_cohort(const CommonOptions& opt) {
    auto [ingest, window] = load_store(opt);
    const auto criteria = criteria_from(opt, window);

    const auto super_cohort = netfx::select_super_users(ingest.store, criteria);
    const auto great_cohort = netfx::great_user_cohort(ingest.store);

    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "cohort_super.csv", netfx::cohort_to_csv(super_cohort));
    write_file(out_dir / "cohort_great.csv", netfx::cohort_to_csv(great_cohort));

    ordered_json manifest;
    manifest["tool"] = "netfx";
    manifest["version"] = kVersion;
    manifest["command"] = "cohort";
    manifest["config"] = config_echo(opt);
    manifest["input_stats"] = {{"valid_records", ingest.valid},
                               {"skipped_records", ingest.skipped}};
    manifest["window"] = {{"from", window.from.to_string()}, {"to", window.to.to_string()}};
    manifest["reference_date"] = criteria.reference_date.to_string();
    manifest["super_user_count"] = super_cohort.members.size();
    manifest["great_user_count"] = great_cohort.members.size();
    manifest["outputs"] = {"cohort_super.csv", "cohort_great.csv"};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int cmd_curve(const CommonOptions& opt) {
    auto [ingest, window] = load_store(opt);
    const auto span = *ingest.store.span();
    const netfx::DateRange effective{std::max(window.from, span.first),
                                     std::min(window.to, span.last)};
    if (effective.empty()) throw ConfigError("window does not intersect the log's dates");

    const auto criteria = criteria_from(opt, window);
    const std::array<netfx::UserCohort, 3> cohorts = {
        netfx::all_users_cohort(ingest.store),
        netfx::great_user_cohort(ingest.store),
        netfx::select_super_users(ingest.store, criteria),
    };

    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);

    ordered_json manifest;
    manifest["tool"] = "netfx";
    manifest["version"] = kVersion;
    manifest["command"] = "curve";
    manifest["config"] = config_echo(opt);
    manifest["window"] = {{"from", effective.from.to_string()},
                          {"to", effective.to.to_string()}};
    auto curves = ordered_json::array();

    for (const auto& cohort : cohorts) {
        auto month = netfx::YearMonth::containing(effective.from);
        const auto last_month = netfx::YearMonth::containing(effective.to);
        while (month <= last_month) {
            const auto curve = netfx::power_user_curve(ingest.store, cohort, month);
            const std::string name = "curve_" + std::string(netfx::cohort_kind_key(cohort.kind)) +
                                     "_" + month.to_string() + ".csv";
            write_file(out_dir / name, netfx::curve_to_csv(curve));

            ordered_json entry;
            entry["cohort"] = std::string(netfx::cohort_kind_key(cohort.kind));
            entry["month"] = month.to_string();
            entry["file"] = name;
            entry["active_members"] = curve.total();
            if (curve.total() > 0) {
                const auto smile = netfx::smile_breakdown(curve);
                entry["smile_index"] = smile.index;
                auto partition = ordered_json::array();
                for (std::size_t q = 0; q < 5; ++q) {
                    partition.push_back({{"days_from", smile.partition[q].first},
                                         {"days_to", smile.partition[q].second},
                                         {"mass", smile.masses[q]}});
                }
                entry["quintiles"] = std::move(partition);
            } else {
                entry["smile_index"] = nullptr;
            }
            curves.push_back(std::move(entry));
            month = month.next();
        }
    }
    manifest["curves"] = std::move(curves);
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int cmd_synth(const CommonOptions& opt, const std::string& spec_path) {
    netfx::DateRange window{};
    bool have_window = false;
    netfx::CouplingSpec spec;
    {
        netfx::DateRange from_spec{};
        from_spec.to = from_spec.from - 1;  // mark empty
        spec = netfx::parse_coupling_spec_file(spec_path, &from_spec);
        if (!from_spec.empty()) {
            window = from_spec;
            have_window = true;
        }
    }
    if (!opt.from.empty()) {
        window.from = parse_date_flag(opt.from, "--from");
        have_window = true;
    }
    if (!opt.to.empty()) {
        window.to = parse_date_flag(opt.to, "--to");
    }
    if (!have_window || window.empty()) {
        throw ConfigError("synth needs a window: either in the spec file or via --from/--to");
    }
    if (opt.seed_given) spec.seed = opt.seed;  // --seed overrides the spec file

    const auto result = netfx::generate(spec, window);
    log_info("generated " + std::to_string(result.store.size()) + " events");

    const fs::path out_dir(opt.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "events.jsonl", netfx::to_jsonl(result.store));
    write_file(out_dir / "truth.json", netfx::truth_to_json(result.truth));

    ordered_json manifest;
    manifest["tool"] = "netfx";
    manifest["version"] = kVersion;
    manifest["command"] = "synth";
    manifest["spec_file"] = spec_path;
    manifest["spec"] = ordered_json::parse(netfx::coupling_spec_to_json(spec, window));
    manifest["events"] = result.store.size();
    manifest["outputs"] = {"events.jsonl", "truth.json"};
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--input", opt.input, "Event log path");
    cmd->add_option("--format", opt.format, "Input format: jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    cmd->add_option("--from", opt.from, "Window start (YYYY-MM-DD)");
    cmd->add_option("--to", opt.to, "Window end (YYYY-MM-DD)");
    cmd->add_option("--k", opt.k, "Destination history length")->check(CLI::PositiveNumber);
    cmd->add_option("--l", opt.l, "Source history length")->check(CLI::PositiveNumber);
    cmd->add_option("--base", opt.base, "Log base: bits|nats")
        ->check(CLI::IsMember({"bits", "nats"}));
    cmd->add_option("--disc", opt.disc, "Discretization: slope|quantile:N");
    cmd->add_option("--epsilon", opt.epsilon, "Flat band for slope discretization")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--recency-days", opt.recency_days, "Super-user recency window")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--reference-date", opt.reference_date,
                    "Super-user reference date (default: window end)");
    cmd->add_option("--out", opt.out, "Output directory");
    cmd->add_flag("--au,!--no-au", opt.au, "Render matrix cells in A.U. (default on)");
    cmd->add_flag("--paper-rows", opt.paper_rows,
                  "Restrict ranking output to the reference table's pairs");
    cmd->add_option("--surrogates", opt.surrogates,
                    "Shuffle-surrogate trials for threshold annotation")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", opt.seed, "Seed for surrogates / generation")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
    cmd->add_option("--from-matrix", opt.from_matrix,
                    "Skip estimation; load an A.U. matrix CSV directly");
    cmd->add_flag("--dump-series", opt.dump_series, "Also write per-driver series CSVs");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transfer-entropy driver analytics for two-sided platform logs"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::string spec_path;

    auto* analyze = app.add_subcommand("analyze", "TE matrix and impact ranking");
    add_common_options(analyze, opt);
    auto* cohort = app.add_subcommand("cohort", "Select Great-user and Super-user cohorts");
    add_common_options(cohort, opt);
    auto* curve = app.add_subcommand("curve", "Monthly power-user curves per cohort");
    add_common_options(curve, opt);
    auto* synth = app.add_subcommand("synth", "Generate a synthetic event log");
    add_common_options(synth, opt);
    synth->add_option("--spec", spec_path, "Coupling spec JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(opt);
        if (cohort->parsed()) return cmd_cohort(opt);
        if (curve->parsed()) return cmd_curve(opt);
        if (synth->parsed()) return cmd_synth(opt, spec_path);
        std::cerr << "netfx: no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "netfx: config error: " << e.what() << "\n";
        return 2;
    } catch (const netfx::Error& e) {
        std::cerr << "netfx: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "netfx: unexpected error: " << e.what() << "\n";
        return 1;
    }
}
