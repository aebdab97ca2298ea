// heatflex: flexibility envelopes of an electrified dwelling stock.
//
// Exit codes: 0 success, 1 usage/config error, 2 data validation error, 3 runtime error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "heatflex/aggregate.hpp"
#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"
#include "heatflex/regions.hpp"
#include "heatflex/scenario.hpp"
#include "heatflex/stock.hpp"
#include "heatflex/synth.hpp"
#include "heatflex/thermal_params.hpp"

namespace fs = std::filesystem;
using namespace heatflex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

bool g_verbose = false;

class StageTimer {
public:
    explicit StageTimer(std::string name)
        : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    void done(const std::string& detail = {}) {
        if (!g_verbose) {
            return;
        }
        const auto ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
        std::cerr << "[heatflex] " << name_ << ": " << ms << " ms";
        if (!detail.empty()) {
            std::cerr << " (" << detail << ")";
        }
        std::cerr << '\n';
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = csv::trim(item);
        if (!t.empty()) {
            out.emplace_back(t);
        }
    }
    return out;
}

double parse_number(const std::string& text, const std::string& what) {
    const auto v = csv::parse_double(text);
    if (!v) {
        throw UsageError(what + ": not a number: '" + text + "'");
    }
    return *v;
}

struct DataOptions {
    std::string stock;
    std::string regions;
    std::string lookup;
    std::string winsorize = "0.01,0.99";
    std::string percentile_method = "nearest";
    std::vector<std::string> columns;
    std::string delimiter = ",";

    void attach(CLI::App* app) {
        app->add_option("--stock", stock, "Stock CSV (one row per LSOA and dwelling category)")
            ->required();
        app->add_option("--regions", regions,
                        "Regions CSV (region, hdd, design_temp_c); built-in table if omitted");
        app->add_option("--lookup", lookup, "LSOA lookup CSV (lsoa_id, region, local_authority)")
            ->required();
        app->add_option("--winsorize", winsorize,
                        "Percentile bounds 'lower,upper' for outlier clipping, or 'off'")
            ->capture_default_str();
        app->add_option("--percentile-method", percentile_method, "nearest or linear")
            ->capture_default_str();
        app->add_option("--column", columns,
                        "Remap a stock column, e.g. --column floor_area=TFA (repeatable)");
        app->add_option("--delimiter", delimiter, "Stock CSV delimiter")->capture_default_str();
    }

    StockSchema schema() const {
        if (delimiter.size() != 1) {
            throw UsageError("--delimiter must be a single character");
        }
        std::map<std::string, std::string> overrides;
        for (const auto& c : columns) {
            const auto eq = c.find('=');
            if (eq == std::string::npos) {
                throw UsageError("--column expects field=name, got '" + c + "'");
            }
            overrides[c.substr(0, eq)] = c.substr(eq + 1);
        }
        return StockSchema::with_overrides(overrides, delimiter[0]);
    }

    std::optional<WinsorizeOptions> winsorize_options() const {
        const std::string w = csv::to_lower(winsorize);
        if (w == "off" || w == "none") {
            return std::nullopt;
        }
        const auto parts = split_list(winsorize);
        if (parts.size() != 2) {
            throw UsageError("--winsorize expects 'lower,upper' or 'off'");
        }
        WinsorizeOptions o;
        o.lower = parse_number(parts[0], "--winsorize");
        o.upper = parse_number(parts[1], "--winsorize");
        const std::string m = csv::to_lower(percentile_method);
        if (m == "nearest") {
            o.method = PercentileMethod::NearestRank;
        } else if (m == "linear") {
            o.method = PercentileMethod::Linear;
        } else {
            throw UsageError("--percentile-method must be nearest or linear");
        }
        return o;
    }

    struct Loaded {
        std::vector<DwellingRecord> records;
        RegionTable regions;
    };

    Loaded load() const {
        Loaded out;
        {
            StageTimer t("load stock");
            out.records = load_stock(stock, schema());
            t.done(std::to_string(out.records.size()) + " records");
        }
        {
            StageTimer t("load regions");
            out.regions = regions.empty() ? load_region_table(lookup)
                                          : load_region_table(regions, lookup);
            out.regions.require_coverage(out.records);
            t.done(std::to_string(out.regions.regions().size()) + " regions, " +
                   std::to_string(out.regions.lookup().size()) + " LSOAs");
        }
        if (const auto w = winsorize_options()) {
            StageTimer t("winsorize");
            std::vector<std::string> warnings;
            out.records = winsorize_stock(out.records, *w, &warnings);
            for (const auto& msg : warnings) {
                std::cerr << "warning: " << msg << '\n';
            }
            t.done();
        }
        return out;
    }
};

struct RunOptions {
    std::string scenario;
    std::string direction;
    std::string level = "national";
    std::string out;
    std::string format = "csv";
    bool plot_grid = false;
    double plot_step = 60.0;
    double plot_cap = 86400.0;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());

    void attach(CLI::App* app) {
        app->add_option("--scenario", scenario, "Scenario config file")->required();
        app->add_option("--direction", direction, "pos or neg")->required();
        app->add_option("--level", level, "lsoa, la, region or national")->capture_default_str();
        app->add_option("--out", out, "Output directory")->required();
        app->add_option("--format", format, "csv or json")->capture_default_str();
        app->add_flag("--plot-grid", plot_grid,
                      "Also write plot_grid.csv, the envelope on a uniform grid (display only)");
        app->add_option("--plot-step", plot_step, "Plot grid step in seconds")->capture_default_str();
        app->add_option("--plot-cap", plot_cap, "Plot grid horizon in seconds")
            ->capture_default_str();
        app->add_option("--threads", threads, "Worker threads")->capture_default_str();
    }

    ExportOptions export_options() const {
        ExportOptions o;
        o.format = parse_export_format(format);
        if (plot_grid) {
            o.plot_step_s = plot_step;
            o.plot_cap_s = plot_cap;
        }
        return o;
    }
};

void write_errors(const fs::path& dir, const ScenarioResult& result) {
    if (result.errors.empty()) {
        return;
    }
    std::ofstream out(dir / "errors.csv");
    csv::write_row(out, {"sample_index", "lsoa_id", "category", "message"});
    for (const auto& e : result.errors) {
        csv::write_row(out, {std::to_string(e.sample_index), e.lsoa_id, to_string(e.category),
                             e.message});
    }
    std::cerr << "warning: " << result.errors.size() << " sample(s) failed; see "
              << (dir / "errors.csv").string() << '\n';
}

void report_and_export(const ScenarioResult& result, const RegionTable& regions,
                       const RunOptions& run, const fs::path& dir) {
    StageTimer t("aggregate and export");
    const AggregateLevel level = parse_aggregate_level(run.level);
    const AggregateReport report = rollup(result, regions, level);
    export_report(report, dir, run.export_options());
    write_errors(dir, result);
    t.done(std::to_string(report.groups.size()) + " groups");

    std::cout << dir.string() << ": " << to_string(result.direction) << " "
              << report.total_magnitude_at_zero_w / 1e6 << " MW at t=0, "
              << report.total_unbounded_power_w / 1e6 << " MW unbounded, "
              << report.total_finite_energy_wh / 1e6 << " MWh finite energy, installed "
              << report.total_installed_thermal_w / 1e6 << " MW thermal\n";
    if (!report.unresolved_lsoas.empty()) {
        std::cerr << "warning: " << report.unresolved_lsoas.size()
                  << " LSOA(s) unresolved at level " << to_string(level) << "; "
                  << report.excluded_power_w / 1e6 << " MW excluded\n";
    }
}

ScenarioResult run_one(const DataOptions::Loaded& data, const ScenarioSpec& spec,
                       Direction direction, std::size_t threads) {
    StageTimer t("simulate");
    ScenarioResult r = simulate(data.records, data.regions, spec, direction, threads);
    t.done(std::to_string(r.outcomes.size()) + " samples");
    return r;
}

int cmd_derive(const DataOptions& data, const std::string& capacity, const std::string& variant,
               const std::string& out) {
    const auto loaded = data.load();
    StageTimer t("derive");
    const ParamsMap params = derive_all(loaded.records, loaded.regions,
                                        parse_capacity_level(capacity), parse_stock_variant(variant));
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + out);
    }
    write_params_csv(f, loaded.records, params);
    t.done(std::to_string(params.size()) + " records");
    std::cout << "installed capacity: "
              << total_installed_thermal_kw(loaded.records, params) / 1e6 << " GW thermal\n";
    return kExitOk;
}

int cmd_flex(const DataOptions& data, const RunOptions& run) {
    const ScenarioSpec spec = load_scenario(run.scenario);
    const Direction direction = parse_direction(run.direction);
    parse_aggregate_level(run.level);
    run.export_options();
    const auto loaded = data.load();
    const ScenarioResult result = run_one(loaded, spec, direction, run.threads);
    report_and_export(result, loaded.regions, run, run.out);
    return kExitOk;
}

int cmd_sweep(const DataOptions& data, const RunOptions& run, const std::string& axis,
              const std::string& values) {
    const ScenarioSpec base = load_scenario(run.scenario);
    const Direction direction = parse_direction(run.direction);
    parse_aggregate_level(run.level);
    run.export_options();
    const auto items = split_list(values);
    if (items.empty()) {
        throw UsageError("--values must list at least one value");
    }

    std::vector<std::pair<std::string, ScenarioSpec>> specs;
    for (const auto& v : items) {
        ScenarioSpec s = base;
        if (axis == "capacity") {
            s.capacity_level = parse_capacity_level(v);
        } else if (axis == "outdoor") {
            s.outdoor_temp_c = parse_number(v, "--values");
        } else if (axis == "indoor") {
            s.indoor_model = FixedIndoor{parse_number(v, "--values")};
        } else {
            throw UsageError("--axis must be capacity, outdoor or indoor");
        }
        s.validate();
        specs.emplace_back(axis + "_" + v, s);
    }

    const auto loaded = data.load();
    for (const auto& [name, spec] : specs) {
        const ScenarioResult result = run_one(loaded, spec, direction, run.threads);
        report_and_export(result, loaded.regions, run, fs::path(run.out) / name);
    }
    return kExitOk;
}

int cmd_retrofit(const DataOptions& data, const RunOptions& run) {
    const ScenarioSpec spec = load_scenario(run.scenario);
    const Direction direction = parse_direction(run.direction);
    parse_aggregate_level(run.level);
    run.export_options();
    const auto loaded = data.load();
    StageTimer t("retrofit comparison");
    const RetrofitComparison cmp =
        retrofit_comparison(loaded.records, loaded.regions, spec, direction, run.threads);
    t.done();
    report_and_export(cmp.before, loaded.regions, run, fs::path(run.out) / "before");
    report_and_export(cmp.after, loaded.regions, run, fs::path(run.out) / "after");
    return kExitOk;
}

int cmd_synth(std::uint64_t dwellings, std::uint64_t seed, std::uint64_t per_lsoa,
              const std::string& out, std::string lookup_out) {
    SynthOptions o;
    o.dwellings = dwellings;
    o.seed = seed;
    o.dwellings_per_lsoa = per_lsoa;
    const SynthStock stock = synthesize_stock(o);
    save_stock(out, stock.records);
    if (lookup_out.empty()) {
        const fs::path p(out);
        lookup_out = (p.parent_path() / (p.stem().string() + "_lookup.csv")).string();
    }
    std::ofstream f(lookup_out, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + lookup_out);
    }
    write_lsoa_lookup(f, stock.lookup);
    std::cout << "wrote " << stock.records.size() << " records (" << stock.lookup.size()
              << " LSOAs) to " << out << " and lookup to " << lookup_out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"heatflex - flexibility from the thermal mass of heat-pump heated dwellings"};
    app.require_subcommand(1);
    app.add_flag("--verbose", g_verbose, "Per-stage timing and record counts on stderr");

    DataOptions derive_data;
    std::string derive_capacity = "medium";
    std::string derive_variant = "before";
    std::string derive_out;
    auto* derive = app.add_subcommand("derive", "Derive heat loss, capacitance and heat-pump size");
    derive_data.attach(derive);
    derive->add_option("--capacity", derive_capacity, "medium, medium+10 or medium-10")
        ->capture_default_str();
    derive->add_option("--variant", derive_variant, "before or after (efficiency measures)")
        ->capture_default_str();
    derive->add_option("--out", derive_out, "Output CSV")->required();

    DataOptions flex_data;
    RunOptions flex_run;
    auto* flex = app.add_subcommand("flex", "Flexibility envelope for one scenario");
    flex_data.attach(flex);
    flex_run.attach(flex);

    DataOptions sweep_data;
    RunOptions sweep_run;
    std::string sweep_axis;
    std::string sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Repeat a scenario over capacity, outdoor or indoor");
    sweep_data.attach(sweep);
    sweep_run.attach(sweep);
    sweep->add_option("--axis", sweep_axis, "capacity, outdoor or indoor")->required();
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

    DataOptions retro_data;
    RunOptions retro_run;
    auto* retro = app.add_subcommand("retrofit-compare",
                                     "Same scenario before and after efficiency measures");
    retro_data.attach(retro);
    retro_run.attach(retro);

    std::uint64_t synth_dwellings = 0;
    std::uint64_t synth_seed = 1;
    std::uint64_t synth_per_lsoa = 650;
    std::string synth_out;
    std::string synth_lookup;
    auto* synth = app.add_subcommand("synth", "Write a synthetic stock and LSOA lookup");
    synth->add_option("--dwellings", synth_dwellings, "Total dwellings")->required();
    synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
    synth->add_option("--per-lsoa", synth_per_lsoa, "Dwellings per LSOA")->capture_default_str();
    synth->add_option("--out", synth_out, "Stock CSV")->required();
    synth->add_option("--lookup-out", synth_lookup, "Lookup CSV (default <out>_lookup.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*derive) return cmd_derive(derive_data, derive_capacity, derive_variant, derive_out);
        if (*flex) return cmd_flex(flex_data, flex_run);
        if (*sweep) return cmd_sweep(sweep_data, sweep_run, sweep_axis, sweep_values);
        if (*retro) return cmd_retrofit(retro_data, retro_run);
        if (*synth) {
            return cmd_synth(synth_dwellings, synth_seed, synth_per_lsoa, synth_out, synth_lookup);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
