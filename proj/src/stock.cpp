#include "heatflex/stock.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

std::string normalise_name(std::string_view text) {
    std::string s = csv::to_lower(csv::trim(text));
    std::replace(s.begin(), s.end(), '_', '-');
    std::replace(s.begin(), s.end(), ' ', '-');
    return s;
}

std::size_t require_column(const csv::Header& header, const std::string& name) {
    const auto idx = header.find(name);
    if (!idx) {
        throw SchemaError("stock table is missing column '" + name + "'");
    }
    return *idx;
}

double require_number(const csv::Row& row, std::size_t col, std::size_t row_no,
                      const std::string& column) {
    const auto v = csv::parse_double(row[col]);
    if (!v) {
        throw ParseError(row_no, "column '" + column + "' is not a number: '" + row[col] + "'");
    }
    return *v;
}

void validate_record(const DwellingRecord& r, std::size_t row_no) {
    if (r.lsoa_id.empty()) {
        throw ParseError(row_no, "empty lsoa_id");
    }
    if (r.count == 0) {
        return;
    }
    if (!(r.heat_demand_before_kwh > 0.0)) {
        throw ParseError(row_no, "heat demand before efficiency measures must be > 0");
    }
    if (!(r.heat_demand_after_kwh > 0.0)) {
        throw ParseError(row_no, "heat demand after efficiency measures must be > 0");
    }
    if (r.heat_demand_after_kwh > r.heat_demand_before_kwh) {
        throw ParseError(row_no, "heat demand after efficiency measures exceeds demand before");
    }
    if (!(r.floor_area_m2 > 0.0)) {
        throw ParseError(row_no, "floor area must be > 0");
    }
}

}  // namespace

const std::array<DwellingCategory, 16>& all_categories() {
    static const std::array<DwellingCategory, 16> categories = [] {
        std::array<DwellingCategory, 16> out{};
        std::size_t i = 0;
        for (auto form : {DwellingForm::Detached, DwellingForm::SemiDetached,
                          DwellingForm::Terraced, DwellingForm::Flat}) {
            for (auto heating : {HeatingSystem::GasBoiler, HeatingSystem::ResistanceHeater,
                                 HeatingSystem::BiomassBoiler, HeatingSystem::OilBoiler}) {
                out[i++] = {form, heating};
            }
        }
        return out;
    }();
    return categories;
}

std::string_view to_string(DwellingForm form) {
    switch (form) {
        case DwellingForm::Detached: return "detached";
        case DwellingForm::SemiDetached: return "semi-detached";
        case DwellingForm::Terraced: return "terraced";
        case DwellingForm::Flat: return "flat";
    }
    return "?";
}

std::string_view to_string(HeatingSystem heating) {
    switch (heating) {
        case HeatingSystem::GasBoiler: return "gas";
        case HeatingSystem::ResistanceHeater: return "resistance";
        case HeatingSystem::BiomassBoiler: return "biomass";
        case HeatingSystem::OilBoiler: return "oil";
    }
    return "?";
}

std::string to_string(const DwellingCategory& category) {
    return std::string(to_string(category.form)) + "/" + std::string(to_string(category.heating));
}

DwellingForm parse_form(std::string_view text) {
    const std::string s = normalise_name(text);
    if (s == "detached") return DwellingForm::Detached;
    if (s == "semi-detached" || s == "semidetached" || s == "semi") return DwellingForm::SemiDetached;
    if (s == "terraced" || s == "terrace") return DwellingForm::Terraced;
    if (s == "flat" || s == "flats") return DwellingForm::Flat;
    throw ValidationError("unknown dwelling form '" + std::string(text) + "'");
}

HeatingSystem parse_heating(std::string_view text) {
    const std::string s = normalise_name(text);
    if (s == "gas" || s == "gas-boiler" || s == "natural-gas") return HeatingSystem::GasBoiler;
    if (s == "resistance" || s == "resistance-heater" || s == "electric") {
        return HeatingSystem::ResistanceHeater;
    }
    if (s == "biomass" || s == "biomass-boiler") return HeatingSystem::BiomassBoiler;
    if (s == "oil" || s == "oil-boiler") return HeatingSystem::OilBoiler;
    throw ValidationError("unknown heating system '" + std::string(text) + "'");
}

StockSchema StockSchema::with_overrides(const std::map<std::string, std::string>& overrides,
                                        char delimiter) {
    StockSchema s;
    s.delimiter = delimiter;
    const std::map<std::string, std::string StockSchema::*> fields = {
        {"lsoa_id", &StockSchema::lsoa_id},
        {"form", &StockSchema::form},
        {"heating", &StockSchema::heating},
        {"count", &StockSchema::count},
        {"heat_demand_before", &StockSchema::heat_demand_before},
        {"heat_demand_after", &StockSchema::heat_demand_after},
        {"floor_area", &StockSchema::floor_area},
    };
    for (const auto& [field, column] : overrides) {
        const auto it = fields.find(field);
        if (it == fields.end()) {
            throw ConfigError("unknown stock schema field '" + field + "'");
        }
        s.*(it->second) = column;
    }
    return s;
}

std::vector<DwellingRecord> read_stock(std::istream& in, const StockSchema& schema) {
    csv::Reader reader(in, schema.delimiter);
    csv::Row row;
    if (!reader.next(row)) {
        throw SchemaError("stock table is empty (header row required)");
    }
    const csv::Header header(row);
    const std::size_t c_lsoa = require_column(header, schema.lsoa_id);
    const std::size_t c_form = require_column(header, schema.form);
    const std::size_t c_heating = require_column(header, schema.heating);
    const std::size_t c_count = require_column(header, schema.count);
    const std::size_t c_before = require_column(header, schema.heat_demand_before);
    const std::size_t c_after = require_column(header, schema.heat_demand_after);
    const std::size_t c_area = require_column(header, schema.floor_area);

    std::vector<DwellingRecord> records;
    std::set<RecordKey> seen;
    std::size_t row_no = 0;
    while (reader.next(row)) {
        ++row_no;
        if (row.size() != header.size()) {
            throw ParseError(row_no, "expected " + std::to_string(header.size()) +
                                         " fields, found " + std::to_string(row.size()));
        }
        DwellingRecord r;
        r.lsoa_id = std::string(csv::trim(row[c_lsoa]));
        try {
            r.category = {parse_form(row[c_form]), parse_heating(row[c_heating])};
        } catch (const ValidationError& e) {
            throw ParseError(row_no, e.what());
        }
        const auto count = csv::parse_uint(row[c_count]);
        if (!count) {
            throw ParseError(row_no, "column '" + schema.count +
                                         "' is not a non-negative integer: '" + row[c_count] + "'");
        }
        r.count = *count;
        r.heat_demand_before_kwh = require_number(row, c_before, row_no, schema.heat_demand_before);
        r.heat_demand_after_kwh = require_number(row, c_after, row_no, schema.heat_demand_after);
        r.floor_area_m2 = require_number(row, c_area, row_no, schema.floor_area);
        validate_record(r, row_no);
        if (!seen.insert(r.key()).second) {
            throw DuplicateKeyError("row " + std::to_string(row_no) + ": duplicate record for (" +
                                    r.lsoa_id + ", " + to_string(r.category) + ")");
        }
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<DwellingRecord> load_stock(const std::filesystem::path& path,
                                       const StockSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open stock file: " + path.string());
    }
    try {
        return read_stock(in, schema);
    } catch (const ParseError& e) {
        throw ParseError(e.row(), e.detail() + " (" + path.string() + ")");
    }
}

void write_stock(std::ostream& out, std::span<const DwellingRecord> records,
                 const StockSchema& schema) {
    const char d = schema.delimiter;
    csv::write_row(out,
                   {schema.lsoa_id, schema.form, schema.heating, schema.count,
                    schema.heat_demand_before, schema.heat_demand_after, schema.floor_area},
                   d);
    for (const auto& r : records) {
        csv::write_row(out,
                       {r.lsoa_id, std::string(to_string(r.category.form)),
                        std::string(to_string(r.category.heating)), std::to_string(r.count),
                        csv::format_double(r.heat_demand_before_kwh),
                        csv::format_double(r.heat_demand_after_kwh),
                        csv::format_double(r.floor_area_m2)},
                       d);
    }
}

void save_stock(const std::filesystem::path& path, std::span<const DwellingRecord> records,
                const StockSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write stock file: " + path.string());
    }
    write_stock(out, records, schema);
    if (!out) {
        throw Error("failed writing stock file: " + path.string());
    }
}

double percentile(std::span<const double> sorted, double p, PercentileMethod method) {
    if (sorted.empty()) {
        throw DomainError("percentile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("percentile fraction must lie in [0, 1]");
    }
    const double h = static_cast<double>(sorted.size() - 1) * p;
    switch (method) {
        case PercentileMethod::NearestRank:
            return sorted[static_cast<std::size_t>(std::nearbyint(h))];
        case PercentileMethod::Linear: {
            const auto lo = static_cast<std::size_t>(std::floor(h));
            const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
            const double frac = h - static_cast<double>(lo);
            return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
        }
    }
    return sorted.front();
}

std::vector<DwellingRecord> winsorize_stock(std::span<const DwellingRecord> records,
                                            const WinsorizeOptions& options,
                                            std::vector<std::string>* warnings) {
    if (!(options.lower >= 0.0 && options.lower < options.upper && options.upper <= 1.0)) {
        throw ConfigError("winsorize bounds must satisfy 0 <= lower < upper <= 1");
    }

    std::map<DwellingCategory, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].skippable()) {
            members[records[i].category].push_back(i);
        }
    }

    std::vector<DwellingRecord> out(records.begin(), records.end());
    using Field = double DwellingRecord::*;
    constexpr std::array<Field, 3> fields = {&DwellingRecord::heat_demand_before_kwh,
                                             &DwellingRecord::heat_demand_after_kwh,
                                             &DwellingRecord::floor_area_m2};

    for (const auto& [category, idx] : members) {
        if (idx.size() < 2) {
            if (warnings) {
                warnings->push_back("category " + to_string(category) + " has " +
                                    std::to_string(idx.size()) +
                                    " populated record(s); left unclipped");
            }
            continue;
        }
        std::vector<double> values(idx.size());
        for (Field field : fields) {
            for (std::size_t k = 0; k < idx.size(); ++k) {
                values[k] = records[idx[k]].*field;
            }
            std::sort(values.begin(), values.end());
            const double lo = percentile(values, options.lower, options.method);
            const double hi = percentile(values, options.upper, options.method);
            for (std::size_t i : idx) {
                out[i].*field = std::clamp(out[i].*field, lo, hi);
            }
        }
    }
    return out;
}

}  // namespace heatflex
