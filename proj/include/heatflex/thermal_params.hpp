#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string_view>

#include "heatflex/regions.hpp"
#include "heatflex/stock.hpp"

namespace heatflex {

/// Table degree days are turned into the degree hours the loss formula consumes.
inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kDefaultIndoorDesignTempC = 21.0;

enum class CapacityLevel { Medium, MediumPlus10, MediumMinus10 };

/// Specific thermal capacity in kJ/m2/K: 250, 275 and 225.
double specific_capacity(CapacityLevel level);
std::string_view to_string(CapacityLevel level);
/// "medium", "medium+10", "medium-10".
CapacityLevel parse_capacity_level(std::string_view text);

enum class StockVariant { BeforeEE, AfterEE };
std::string_view to_string(StockVariant variant);
/// "before" / "after".
StockVariant parse_stock_variant(std::string_view text);

/// Per-dwelling physics in the units of the derivation: kW/degC, kJ/K, kW thermal.
struct ThermalParams {
    double heat_loss_kw_per_c = 0.0;
    double capacitance_kj_per_k = 0.0;
    double hp_size_kw = 0.0;
    double design_temp_c = 0.0;
    double indoor_design_temp_c = kDefaultIndoorDesignTempC;

    bool operator==(const ThermalParams&) const = default;
};

/// annual_heat_demand / (hdd * 24). Throws DomainError on non-positive input.
double heat_loss_coefficient(double annual_heat_demand_kwh, double heating_degree_days);

double thermal_capacity(double floor_area_m2, CapacityLevel level);

/// (indoor_design - design) * heat_loss. Throws DomainError unless indoor_design > design.
double size_heat_pump(double heat_loss_kw_per_c, double design_temp_c,
                      double indoor_design_temp_c = kDefaultIndoorDesignTempC);

using ParamsMap = std::map<RecordKey, ThermalParams>;

/// One entry per populated record. AfterEE feeds the post-retrofit heat demand into the
/// loss coefficient and resizes the heat pump from it; capacitance is unaffected.
/// Domain errors are rethrown annotated with the record identity.
ParamsMap derive_all(std::span<const DwellingRecord> records, const RegionTable& regions,
                     CapacityLevel level, StockVariant variant,
                     double indoor_design_temp_c = kDefaultIndoorDesignTempC);

/// Sum of count * hp_size over populated records, kW thermal.
double total_installed_thermal_kw(std::span<const DwellingRecord> records, const ParamsMap& params);

/// Columns: lsoa_id, form, heating, count, ql_kw_per_c, c_kj_per_k, hp_kw. Record order.
void write_params_csv(std::ostream& out, std::span<const DwellingRecord> records,
                      const ParamsMap& params);

}  // namespace heatflex
