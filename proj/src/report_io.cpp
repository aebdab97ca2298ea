#include <fstream>
#include <sstream>

#include <json.hpp>

#include "heatflex/aggregate.hpp"
#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const csv::Row kEnvelopeHeader = {"key", "duration_s", "power_w"};
const csv::Row kSummaryHeader = {"key",         "installed_w",      "magnitude_at_0_w",
                                 "unbounded_w", "finite_energy_wh", "excluded_power_w"};

class OutputFile {
public:
    explicit OutputFile(fs::path path) : path_(std::move(path)), out_(path_, std::ios::binary) {
        if (!out_) {
            throw Error("cannot open for writing: " + path_.string());
        }
    }

    std::ostream& stream() { return out_; }

    fs::path close() {
        out_.close();
        if (!out_) {
            throw Error("write failed: " + path_.string());
        }
        return path_;
    }

private:
    fs::path path_;
    std::ofstream out_;
};

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open report file: " + path.string());
    }
    return in;
}

csv::Row summary_row(const std::string& key, const GroupAggregate& g) {
    return {key,
            csv::format_double(g.installed_thermal_w),
            csv::format_double(g.magnitude_at_zero_w),
            csv::format_double(g.unbounded_power_w),
            csv::format_double(g.finite_energy_wh),
            csv::format_double(g.excluded_power_w)};
}

void write_envelope_rows(std::ostream& out, const std::string& key, const Envelope& env) {
    for (const auto& bp : env.breakpoints) {
        csv::write_row(out, {key, csv::format_double(bp.duration_s), csv::format_double(bp.power_w)});
    }
    csv::write_row(out, {key, "inf", csv::format_double(env.unbounded_power_w)});
}

json group_to_json(const GroupAggregate& g) {
    json bps = json::array();
    for (const auto& bp : g.envelope.breakpoints) {
        bps.push_back({bp.duration_s, bp.power_w});
    }
    return {{"installed_w", g.installed_thermal_w},
            {"magnitude_at_0_w", g.magnitude_at_zero_w},
            {"unbounded_w", g.unbounded_power_w},
            {"finite_energy_wh", g.finite_energy_wh},
            {"excluded_power_w", g.excluded_power_w},
            {"breakpoints", std::move(bps)}};
}

GroupAggregate group_from_json(const json& j) {
    GroupAggregate g;
    g.installed_thermal_w = j.at("installed_w").get<double>();
    g.magnitude_at_zero_w = j.at("magnitude_at_0_w").get<double>();
    g.unbounded_power_w = j.at("unbounded_w").get<double>();
    g.finite_energy_wh = j.at("finite_energy_wh").get<double>();
    g.excluded_power_w = j.at("excluded_power_w").get<double>();
    g.envelope.unbounded_power_w = g.unbounded_power_w;
    for (const auto& bp : j.at("breakpoints")) {
        g.envelope.breakpoints.push_back({bp.at(0).get<double>(), bp.at(1).get<double>()});
    }
    return g;
}

double require_double(const std::string& text, const fs::path& file, std::size_t line) {
    const auto v = csv::parse_double(text);
    if (!v) {
        throw ParseError(line, "non-numeric value '" + text + "' in " + file.string());
    }
    return *v;
}

void expect_header(csv::Reader& reader, const csv::Row& expected, const fs::path& file) {
    csv::Row row;
    if (!reader.next(row) || row != expected) {
        throw SchemaError("unexpected header in " + file.string());
    }
}

}  // namespace

std::vector<fs::path> export_report(const AggregateReport& report, const fs::path& dir,
                                    const ExportOptions& options) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }

    const bool has_excluded = !report.unresolved_lsoas.empty();
    std::vector<fs::path> written;

    if (options.format == ExportFormat::Json) {
        json groups = json::object();
        for (const auto& [key, g] : report.groups) {
            groups[key] = group_to_json(g);
        }
        json doc = {
            {"level", std::string(to_string(report.level))},
            {"direction", std::string(to_string(report.direction))},
            {"groups", std::move(groups)},
            {"excluded", group_to_json(report.excluded)},
            {"unresolved_lsoas", report.unresolved_lsoas},
            {"totals",
             {{"installed_w", report.total_installed_thermal_w},
              {"magnitude_at_0_w", report.total_magnitude_at_zero_w},
              {"unbounded_w", report.total_unbounded_power_w},
              {"finite_energy_wh", report.total_finite_energy_wh},
              {"excluded_power_w", report.excluded_power_w}}},
        };
        OutputFile f(dir / "report.json");
        f.stream() << doc.dump(2) << '\n';
        written.push_back(f.close());
    } else {
        {
            OutputFile f(dir / "meta.csv");
            csv::write_row(f.stream(), {"key", "value"});
            csv::write_row(f.stream(), {"level", std::string(to_string(report.level))});
            csv::write_row(f.stream(), {"direction", std::string(to_string(report.direction))});
            written.push_back(f.close());
        }
        {
            OutputFile f(dir / "envelope.csv");
            csv::write_row(f.stream(), kEnvelopeHeader);
            for (const auto& [key, g] : report.groups) {
                write_envelope_rows(f.stream(), key, g.envelope);
            }
            if (has_excluded) {
                write_envelope_rows(f.stream(), std::string(kExcludedKey), report.excluded.envelope);
            }
            written.push_back(f.close());
        }
        {
            OutputFile f(dir / "summary.csv");
            csv::write_row(f.stream(), kSummaryHeader);
            for (const auto& [key, g] : report.groups) {
                csv::write_row(f.stream(), summary_row(key, g));
            }
            if (has_excluded) {
                csv::write_row(f.stream(), summary_row(std::string(kExcludedKey), report.excluded));
            }
            written.push_back(f.close());
        }
        {
            OutputFile f(dir / "unresolved_lsoas.csv");
            csv::write_row(f.stream(), {"lsoa_id"});
            for (const auto& id : report.unresolved_lsoas) {
                csv::write_row(f.stream(), {id});
            }
            written.push_back(f.close());
        }
    }

    if (options.plot_step_s) {
        OutputFile f(dir / "plot_grid.csv");
        csv::write_row(f.stream(), kEnvelopeHeader);
        for (const auto& [key, g] : report.groups) {
            for (const auto& p : g.envelope.resample(*options.plot_step_s, options.plot_cap_s)) {
                csv::write_row(f.stream(), {key, csv::format_double(p.duration_s),
                                            csv::format_double(p.power_w)});
            }
        }
        written.push_back(f.close());
    }
    return written;
}

AggregateReport import_report(const fs::path& dir, ExportFormat format) {
    AggregateReport report;

    if (format == ExportFormat::Json) {
        const fs::path file = dir / "report.json";
        auto in = open_input(file);
        json doc;
        try {
            in >> doc;
            report.level = parse_aggregate_level(doc.at("level").get<std::string>());
            report.direction = parse_direction(doc.at("direction").get<std::string>());
            for (const auto& [key, g] : doc.at("groups").items()) {
                report.groups.emplace(key, group_from_json(g));
            }
            report.excluded = group_from_json(doc.at("excluded"));
            report.unresolved_lsoas = doc.at("unresolved_lsoas").get<std::vector<std::string>>();
        } catch (const json::exception& e) {
            throw DataError(file.string() + ": " + e.what());
        }
        report.recompute_totals();
        return report;
    }

    {
        const fs::path file = dir / "meta.csv";
        auto in = open_input(file);
        csv::Reader reader(in);
        expect_header(reader, {"key", "value"}, file);
        csv::Row row;
        while (reader.next(row)) {
            if (row.size() != 2) {
                throw ParseError(reader.line(), "bad row in " + file.string());
            }
            if (row[0] == "level") {
                report.level = parse_aggregate_level(row[1]);
            } else if (row[0] == "direction") {
                report.direction = parse_direction(row[1]);
            }
        }
    }

    const std::string excluded_key(kExcludedKey);
    {
        const fs::path file = dir / "summary.csv";
        auto in = open_input(file);
        csv::Reader reader(in);
        expect_header(reader, kSummaryHeader, file);
        csv::Row row;
        while (reader.next(row)) {
            if (row.size() != kSummaryHeader.size()) {
                throw ParseError(reader.line(), "bad row in " + file.string());
            }
            GroupAggregate g;
            g.installed_thermal_w = require_double(row[1], file, reader.line());
            g.magnitude_at_zero_w = require_double(row[2], file, reader.line());
            g.unbounded_power_w = require_double(row[3], file, reader.line());
            g.finite_energy_wh = require_double(row[4], file, reader.line());
            g.excluded_power_w = require_double(row[5], file, reader.line());
            if (row[0] == excluded_key) {
                report.excluded = g;
            } else {
                report.groups.emplace(row[0], g);
            }
        }
    }
    {
        const fs::path file = dir / "envelope.csv";
        auto in = open_input(file);
        csv::Reader reader(in);
        expect_header(reader, kEnvelopeHeader, file);
        csv::Row row;
        while (reader.next(row)) {
            if (row.size() != kEnvelopeHeader.size()) {
                throw ParseError(reader.line(), "bad row in " + file.string());
            }
            GroupAggregate* g = nullptr;
            if (row[0] == excluded_key) {
                g = &report.excluded;
            } else {
                const auto it = report.groups.find(row[0]);
                if (it == report.groups.end()) {
                    throw DataError(file.string() + ": key '" + row[0] + "' absent from summary");
                }
                g = &it->second;
            }
            const double power = require_double(row[2], file, reader.line());
            if (row[1] == "inf") {
                g->envelope.unbounded_power_w = power;
            } else {
                g->envelope.breakpoints.push_back(
                    {require_double(row[1], file, reader.line()), power});
            }
        }
    }
    {
        const fs::path file = dir / "unresolved_lsoas.csv";
        auto in = open_input(file);
        csv::Reader reader(in);
        expect_header(reader, {"lsoa_id"}, file);
        csv::Row row;
        while (reader.next(row)) {
            report.unresolved_lsoas.push_back(row.at(0));
        }
    }
    report.recompute_totals();
    return report;
}

}  // namespace heatflex
