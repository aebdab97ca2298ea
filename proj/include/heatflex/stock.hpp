#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace heatflex {

enum class DwellingForm { Detached, SemiDetached, Terraced, Flat };
enum class HeatingSystem { GasBoiler, ResistanceHeater, BiomassBoiler, OilBoiler };

struct DwellingCategory {
    DwellingForm form = DwellingForm::Detached;
    HeatingSystem heating = HeatingSystem::GasBoiler;

    auto operator<=>(const DwellingCategory&) const = default;
};

/// The 16 form x heating combinations, forms outermost.
const std::array<DwellingCategory, 16>& all_categories();

std::string_view to_string(DwellingForm form);
std::string_view to_string(HeatingSystem heating);
std::string to_string(const DwellingCategory& category);

/// Accepts canonical names plus common spellings ("semi_detached", "gas_boiler", ...).
/// Throws ValidationError on anything else.
DwellingForm parse_form(std::string_view text);
HeatingSystem parse_heating(std::string_view text);

struct RecordKey {
    std::string lsoa_id;
    DwellingCategory category;

    auto operator<=>(const RecordKey&) const = default;
};

/// One (LSOA, dwelling category) row of the stock. Per-dwelling averages.
struct DwellingRecord {
    std::string lsoa_id;
    DwellingCategory category;
    std::uint64_t count = 0;
    double heat_demand_before_kwh = 0.0;
    double heat_demand_after_kwh = 0.0;
    double floor_area_m2 = 0.0;

    /// Zero-population rows are kept for round-trips but carry no physics.
    bool skippable() const noexcept { return count == 0; }
    RecordKey key() const { return {lsoa_id, category}; }

    bool operator==(const DwellingRecord&) const = default;
};

/// Column names of the stock table. Every name can be remapped.
struct StockSchema {
    std::string lsoa_id = "lsoa_id";
    std::string form = "form";
    std::string heating = "heating";
    std::string count = "count";
    std::string heat_demand_before = "heat_demand_before_kwh";
    std::string heat_demand_after = "heat_demand_after_kwh";
    std::string floor_area = "floor_area_m2";
    char delimiter = ',';

    /// Applies overrides keyed by field name (e.g. {"floor_area", "TFA"}).
    /// Unknown field names are a ConfigError.
    static StockSchema with_overrides(const std::map<std::string, std::string>& overrides,
                                      char delimiter = ',');
};

std::vector<DwellingRecord> read_stock(std::istream& in, const StockSchema& schema = {});
std::vector<DwellingRecord> load_stock(const std::filesystem::path& path,
                                       const StockSchema& schema = {});

void write_stock(std::ostream& out, std::span<const DwellingRecord> records,
                 const StockSchema& schema = {});
void save_stock(const std::filesystem::path& path, std::span<const DwellingRecord> records,
                const StockSchema& schema = {});

// ---------------------------------------------------------------------------
// Outlier clipping

enum class PercentileMethod {
    /// Order statistic at round((n - 1) p), ties to even. Clipping with it is idempotent.
    NearestRank,
    /// Linear interpolation between order statistics at (n - 1) p.
    Linear,
};

/// Percentile of an ascending-sorted, non-empty sample.
double percentile(std::span<const double> sorted, double p, PercentileMethod method);

struct WinsorizeOptions {
    double lower = 0.01;
    double upper = 0.99;
    PercentileMethod method = PercentileMethod::NearestRank;
};

/// Clamps heat demand (before and after) and floor area to per-category percentile
/// bounds computed over all populated records nationally, one record = one sample.
/// Categories with fewer than two populated records pass through and add a warning.
std::vector<DwellingRecord> winsorize_stock(std::span<const DwellingRecord> records,
                                            const WinsorizeOptions& options = {},
                                            std::vector<std::string>* warnings = nullptr);

}  // namespace heatflex
