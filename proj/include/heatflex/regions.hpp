#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatflex/stock.hpp"

namespace heatflex {

struct Region {
    std::string name;
    double heating_degree_days = 0.0;  ///< degC.day, base 15.5 degC
    double design_temp_c = 0.0;        ///< outdoor design temperature of heating systems

    bool operator==(const Region&) const = default;
};

struct LsoaLocation {
    std::string region;
    std::string local_authority;

    bool operator==(const LsoaLocation&) const = default;
};

/// Heating degree days and design temperatures for the ten regions of England and Wales.
const std::vector<Region>& default_regions();

/// Regions plus the LSOA -> (region, local authority) lookup.
///
/// Construction validates the table: every region needs hdd > 0 and a design
/// temperature below 21 degC, region names must be unique, and every lookup row
/// must name a region present in the table (dangling regions are a ValidationError).
class RegionTable {
public:
    RegionTable() = default;
    RegionTable(std::vector<Region> regions, std::map<std::string, LsoaLocation> lookup);

    const std::vector<Region>& regions() const noexcept { return regions_; }
    const std::map<std::string, LsoaLocation>& lookup() const noexcept { return lookup_; }

    const Region* find_region(std::string_view name) const;
    const Region& region(std::string_view name) const;

    const LsoaLocation* locate(std::string_view lsoa_id) const;
    /// Throws ValidationError when the LSOA has no mapping.
    const Region& region_of(std::string_view lsoa_id) const;

    /// Throws ValidationError listing every LSOA in `records` with no mapping.
    void require_coverage(std::span<const DwellingRecord> records) const;

private:
    std::vector<Region> regions_;
    std::map<std::string, std::size_t, std::less<>> by_name_;
    std::map<std::string, LsoaLocation> lookup_;
};

/// Columns: region, hdd, design_temp_c.
std::vector<Region> read_regions(std::istream& in);
/// Columns: lsoa_id, region, local_authority.
std::map<std::string, LsoaLocation> read_lsoa_lookup(std::istream& in);

void write_regions(std::ostream& out, std::span<const Region> regions);
void write_lsoa_lookup(std::ostream& out, const std::map<std::string, LsoaLocation>& lookup);

RegionTable load_region_table(const std::filesystem::path& regions_path,
                              const std::filesystem::path& lsoa_lookup_path);
/// Uses the built-in regions with a lookup file.
RegionTable load_region_table(const std::filesystem::path& lsoa_lookup_path);

}  // namespace heatflex
