#include "heatflex/regions.hpp"

#include <fstream>
#include <set>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

std::size_t require_column(const csv::Header& header, const std::string& name,
                           std::string_view table) {
    const auto idx = header.find(name);
    if (!idx) {
        throw SchemaError(std::string(table) + " is missing column '" + name + "'");
    }
    return *idx;
}

std::ifstream open_input(const std::filesystem::path& path, std::string_view what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + std::string(what) + ": " + path.string());
    }
    return in;
}

}  // namespace

const std::vector<Region>& default_regions() {
    static const std::vector<Region> regions = {
        {"East", 1873.6, -3.0},
        {"East Midlands", 2055.7, -3.0},
        {"London", 1773.5, -2.0},
        {"North East", 2216.8, -5.0},
        {"North West", 2359.8, -5.0},
        {"South East", 1815.7, -1.0},
        {"South West", 1740.6, -2.0},
        {"Wales", 2058.9, -3.0},
        {"West Midlands", 2055.7, -3.0},
        {"Yorkshire and The Humber", 2216.8, -5.0},
    };
    return regions;
}

RegionTable::RegionTable(std::vector<Region> regions, std::map<std::string, LsoaLocation> lookup)
    : regions_(std::move(regions)), lookup_(std::move(lookup)) {
    for (std::size_t i = 0; i < regions_.size(); ++i) {
        const Region& r = regions_[i];
        if (!(r.heating_degree_days > 0.0)) {
            throw ValidationError("region '" + r.name + "': heating degree days must be > 0");
        }
        if (!(r.design_temp_c < 21.0)) {
            throw ValidationError("region '" + r.name + "': design temperature must be < 21 degC");
        }
        if (!by_name_.emplace(r.name, i).second) {
            throw DuplicateKeyError("region '" + r.name + "' listed twice");
        }
    }
    std::set<std::string> dangling;
    for (const auto& [lsoa, loc] : lookup_) {
        if (!by_name_.contains(loc.region)) {
            dangling.insert(loc.region);
        }
    }
    if (!dangling.empty()) {
        std::string msg = "lookup references regions absent from the region table:";
        for (const auto& name : dangling) {
            msg += " '" + name + "'";
        }
        throw ValidationError(msg);
    }
}

const Region* RegionTable::find_region(std::string_view name) const {
    const auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : &regions_[it->second];
}

const Region& RegionTable::region(std::string_view name) const {
    const Region* r = find_region(name);
    if (!r) {
        throw ValidationError("unknown region '" + std::string(name) + "'");
    }
    return *r;
}

const LsoaLocation* RegionTable::locate(std::string_view lsoa_id) const {
    const auto it = lookup_.find(std::string(lsoa_id));
    return it == lookup_.end() ? nullptr : &it->second;
}

const Region& RegionTable::region_of(std::string_view lsoa_id) const {
    const LsoaLocation* loc = locate(lsoa_id);
    if (!loc) {
        throw ValidationError("LSOA '" + std::string(lsoa_id) + "' has no region mapping");
    }
    return region(loc->region);
}

void RegionTable::require_coverage(std::span<const DwellingRecord> records) const {
    std::set<std::string> unresolved;
    for (const auto& r : records) {
        if (!lookup_.contains(r.lsoa_id)) {
            unresolved.insert(r.lsoa_id);
        }
    }
    if (unresolved.empty()) {
        return;
    }
    std::string msg = std::to_string(unresolved.size()) + " unresolved LSOA(s):";
    std::size_t shown = 0;
    for (const auto& id : unresolved) {
        if (shown++ == 20) {
            msg += " ...";
            break;
        }
        msg += " " + id;
    }
    throw ValidationError(msg);
}

std::vector<Region> read_regions(std::istream& in) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) {
        throw SchemaError("region table is empty (header row required)");
    }
    const csv::Header header(row);
    const auto c_name = require_column(header, "region", "region table");
    const auto c_hdd = require_column(header, "hdd", "region table");
    const auto c_design = require_column(header, "design_temp_c", "region table");

    std::vector<Region> regions;
    std::size_t row_no = 0;
    while (reader.next(row)) {
        ++row_no;
        if (row.size() != header.size()) {
            throw ParseError(row_no, "region table: wrong number of fields");
        }
        const auto hdd = csv::parse_double(row[c_hdd]);
        const auto design = csv::parse_double(row[c_design]);
        if (!hdd || !design) {
            throw ParseError(row_no, "region table: non-numeric value");
        }
        regions.push_back({std::string(csv::trim(row[c_name])), *hdd, *design});
    }
    return regions;
}

std::map<std::string, LsoaLocation> read_lsoa_lookup(std::istream& in) {
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row)) {
        throw SchemaError("LSOA lookup is empty (header row required)");
    }
    const csv::Header header(row);
    const auto c_lsoa = require_column(header, "lsoa_id", "LSOA lookup");
    const auto c_region = require_column(header, "region", "LSOA lookup");
    const auto c_la = require_column(header, "local_authority", "LSOA lookup");

    std::map<std::string, LsoaLocation> lookup;
    std::size_t row_no = 0;
    while (reader.next(row)) {
        ++row_no;
        if (row.size() != header.size()) {
            throw ParseError(row_no, "LSOA lookup: wrong number of fields");
        }
        std::string id(csv::trim(row[c_lsoa]));
        LsoaLocation loc{std::string(csv::trim(row[c_region])),
                         std::string(csv::trim(row[c_la]))};
        const auto [it, inserted] = lookup.emplace(id, loc);
        if (!inserted && !(it->second == loc)) {
            throw DuplicateKeyError("row " + std::to_string(row_no) + ": LSOA '" + id +
                                    "' mapped to more than one location");
        }
    }
    return lookup;
}

void write_regions(std::ostream& out, std::span<const Region> regions) {
    csv::write_row(out, {"region", "hdd", "design_temp_c"});
    for (const auto& r : regions) {
        csv::write_row(out, {r.name, csv::format_double(r.heating_degree_days),
                             csv::format_double(r.design_temp_c)});
    }
}

void write_lsoa_lookup(std::ostream& out, const std::map<std::string, LsoaLocation>& lookup) {
    csv::write_row(out, {"lsoa_id", "region", "local_authority"});
    for (const auto& [id, loc] : lookup) {
        csv::write_row(out, {id, loc.region, loc.local_authority});
    }
}

RegionTable load_region_table(const std::filesystem::path& regions_path,
                              const std::filesystem::path& lsoa_lookup_path) {
    auto regions_in = open_input(regions_path, "region table");
    auto lookup_in = open_input(lsoa_lookup_path, "LSOA lookup");
    return RegionTable(read_regions(regions_in), read_lsoa_lookup(lookup_in));
}

RegionTable load_region_table(const std::filesystem::path& lsoa_lookup_path) {
    auto lookup_in = open_input(lsoa_lookup_path, "LSOA lookup");
    return RegionTable(default_regions(), read_lsoa_lookup(lookup_in));
}

}  // namespace heatflex
