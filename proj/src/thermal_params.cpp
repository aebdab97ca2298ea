#include "heatflex/thermal_params.hpp"

#include <cmath>
#include <ostream>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {

double specific_capacity(CapacityLevel level) {
    switch (level) {
        case CapacityLevel::Medium: return 250.0;
        case CapacityLevel::MediumPlus10: return 275.0;
        case CapacityLevel::MediumMinus10: return 225.0;
    }
    return 250.0;
}

std::string_view to_string(CapacityLevel level) {
    switch (level) {
        case CapacityLevel::Medium: return "medium";
        case CapacityLevel::MediumPlus10: return "medium+10";
        case CapacityLevel::MediumMinus10: return "medium-10";
    }
    return "?";
}

CapacityLevel parse_capacity_level(std::string_view text) {
    const std::string s = csv::to_lower(csv::trim(text));
    if (s == "medium") return CapacityLevel::Medium;
    if (s == "medium+10" || s == "medium_plus_10") return CapacityLevel::MediumPlus10;
    if (s == "medium-10" || s == "medium_minus_10") return CapacityLevel::MediumMinus10;
    throw ConfigError("unknown capacity level '" + std::string(text) +
                      "' (expected medium, medium+10 or medium-10)");
}

std::string_view to_string(StockVariant variant) {
    return variant == StockVariant::BeforeEE ? "before" : "after";
}

StockVariant parse_stock_variant(std::string_view text) {
    const std::string s = csv::to_lower(csv::trim(text));
    if (s == "before" || s == "before_ee") return StockVariant::BeforeEE;
    if (s == "after" || s == "after_ee") return StockVariant::AfterEE;
    throw ConfigError("unknown stock variant '" + std::string(text) + "' (expected before or after)");
}

double heat_loss_coefficient(double annual_heat_demand_kwh, double heating_degree_days) {
    if (!(annual_heat_demand_kwh > 0.0) || !std::isfinite(annual_heat_demand_kwh)) {
        throw DomainError("annual heat demand must be positive");
    }
    if (!(heating_degree_days > 0.0) || !std::isfinite(heating_degree_days)) {
        throw DomainError("heating degree days must be positive");
    }
    return annual_heat_demand_kwh / (heating_degree_days * kHoursPerDay);
}

double thermal_capacity(double floor_area_m2, CapacityLevel level) {
    if (!(floor_area_m2 > 0.0) || !std::isfinite(floor_area_m2)) {
        throw DomainError("floor area must be positive");
    }
    return floor_area_m2 * specific_capacity(level);
}

double size_heat_pump(double heat_loss_kw_per_c, double design_temp_c,
                      double indoor_design_temp_c) {
    if (!(indoor_design_temp_c > design_temp_c)) {
        throw DomainError("indoor design temperature must exceed the outdoor design temperature");
    }
    if (!(heat_loss_kw_per_c > 0.0)) {
        throw DomainError("heat loss coefficient must be positive");
    }
    return (indoor_design_temp_c - design_temp_c) * heat_loss_kw_per_c;
}

ParamsMap derive_all(std::span<const DwellingRecord> records, const RegionTable& regions,
                     CapacityLevel level, StockVariant variant, double indoor_design_temp_c) {
    regions.require_coverage(records);
    ParamsMap out;
    for (const auto& r : records) {
        if (r.skippable()) {
            continue;
        }
        const Region& region = regions.region_of(r.lsoa_id);
        const double demand = variant == StockVariant::BeforeEE ? r.heat_demand_before_kwh
                                                                : r.heat_demand_after_kwh;
        try {
            ThermalParams p;
            p.heat_loss_kw_per_c = heat_loss_coefficient(demand, region.heating_degree_days);
            p.capacitance_kj_per_k = thermal_capacity(r.floor_area_m2, level);
            p.hp_size_kw = size_heat_pump(p.heat_loss_kw_per_c, region.design_temp_c,
                                          indoor_design_temp_c);
            p.design_temp_c = region.design_temp_c;
            p.indoor_design_temp_c = indoor_design_temp_c;
            out.emplace(r.key(), p);
        } catch (const DomainError& e) {
            throw DomainError("(" + r.lsoa_id + ", " + to_string(r.category) + "): " + e.what());
        }
    }
    return out;
}

double total_installed_thermal_kw(std::span<const DwellingRecord> records,
                                  const ParamsMap& params) {
    double total = 0.0;
    for (const auto& r : records) {
        if (r.skippable()) {
            continue;
        }
        const auto it = params.find(r.key());
        if (it == params.end()) {
            throw MissingParamsError("no thermal parameters for (" + r.lsoa_id + ", " +
                                     to_string(r.category) + ")");
        }
        total += static_cast<double>(r.count) * it->second.hp_size_kw;
    }
    return total;
}

void write_params_csv(std::ostream& out, std::span<const DwellingRecord> records,
                      const ParamsMap& params) {
    csv::write_row(out, {"lsoa_id", "form", "heating", "count", "ql_kw_per_c", "c_kj_per_k",
                         "hp_kw"});
    for (const auto& r : records) {
        const auto it = params.find(r.key());
        if (it == params.end()) {
            continue;
        }
        const ThermalParams& p = it->second;
        csv::write_row(out, {r.lsoa_id, std::string(to_string(r.category.form)),
                             std::string(to_string(r.category.heating)), std::to_string(r.count),
                             csv::format_double(p.heat_loss_kw_per_c),
                             csv::format_double(p.capacitance_kj_per_k),
                             csv::format_double(p.hp_size_kw)});
    }
}

}  // namespace heatflex
