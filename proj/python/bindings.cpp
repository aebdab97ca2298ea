#include <sstream>

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "heatflex/aggregate.hpp"
#include "heatflex/errors.hpp"
#include "heatflex/rc_model.hpp"
#include "heatflex/regions.hpp"
#include "heatflex/scenario.hpp"
#include "heatflex/stock.hpp"
#include "heatflex/synth.hpp"
#include "heatflex/thermal_params.hpp"

namespace py = pybind11;
using namespace heatflex;

namespace {

using CopPoints = std::vector<std::pair<double, double>>;

CopCurve make_curve(const std::optional<CopPoints>& points) {
    if (!points) {
        return CopCurve::default_table();
    }
    std::vector<CopCurve::Point> pts;
    for (const auto& [t, c] : *points) {
        pts.push_back({t, c});
    }
    return CopCurve(std::move(pts));
}

DwellingCategory make_category(std::string_view form, std::string_view heating) {
    return {parse_form(form), parse_heating(heating)};
}

std::string repr_duration(const ServiceDuration& d) {
    std::ostringstream os;
    os << "ServiceDuration(" << to_string(d.kind());
    if (d.is_finite()) {
        os << ", " << d.seconds() << " s";
    }
    os << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Thermal-mass flexibility of heat-pump heated dwellings";
    m.attr("__version__") = "0.1.0";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config_error = py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<UsageError>(m, "UsageError", config_error.ptr());
    auto data_error = py::register_exception<DataError>(m, "DataError", error.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", data_error.ptr());
    py::register_exception<ParseError>(m, "ParseError", data_error.ptr());
    py::register_exception<DuplicateKeyError>(m, "DuplicateKeyError", data_error.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", data_error.ptr());
    py::register_exception<DomainError>(m, "DomainError", data_error.ptr());
    py::register_exception<MissingParamsError>(m, "MissingParamsError", data_error.ptr());

    py::enum_<Direction>(m, "Direction")
        .value("POSITIVE", Direction::Positive)
        .value("NEGATIVE", Direction::Negative);
    py::enum_<CapacityLevel>(m, "CapacityLevel")
        .value("MEDIUM", CapacityLevel::Medium)
        .value("MEDIUM_PLUS_10", CapacityLevel::MediumPlus10)
        .value("MEDIUM_MINUS_10", CapacityLevel::MediumMinus10);
    py::enum_<StockVariant>(m, "StockVariant")
        .value("BEFORE", StockVariant::BeforeEE)
        .value("AFTER", StockVariant::AfterEE);
    py::enum_<AggregateLevel>(m, "AggregateLevel")
        .value("LSOA", AggregateLevel::Lsoa)
        .value("LOCAL_AUTHORITY", AggregateLevel::LocalAuthority)
        .value("REGION", AggregateLevel::Region)
        .value("NATIONAL", AggregateLevel::National);

    // Per-dwelling parameters

    m.def("heat_loss_coefficient", &heat_loss_coefficient, py::arg("annual_heat_demand_kwh"),
          py::arg("heating_degree_days"), "Heat loss in kW/degC.");
    m.def("specific_capacity", &specific_capacity, py::arg("level"));
    m.def("thermal_capacity", &thermal_capacity, py::arg("floor_area_m2"),
          py::arg("level") = CapacityLevel::Medium, "Capacitance in kJ/K.");
    m.def("size_heat_pump", &size_heat_pump, py::arg("heat_loss_kw_per_c"),
          py::arg("design_temp_c"), py::arg("indoor_design_temp_c") = kDefaultIndoorDesignTempC,
          "Heat-pump rating in kW thermal.");
    m.def(
        "cop_at",
        [](double outdoor_c, const std::optional<CopPoints>& points) {
            return make_curve(points).at(outdoor_c);
        },
        py::arg("outdoor_c"), py::arg("points") = py::none(),
        "COP by linear interpolation of (outdoor_c, cop) points; the default table if omitted.");

    py::class_<ThermalParams>(m, "ThermalParams")
        .def_readonly("heat_loss_kw_per_c", &ThermalParams::heat_loss_kw_per_c)
        .def_readonly("capacitance_kj_per_k", &ThermalParams::capacitance_kj_per_k)
        .def_readonly("hp_size_kw", &ThermalParams::hp_size_kw)
        .def_readonly("design_temp_c", &ThermalParams::design_temp_c);

    // Single dwelling

    py::class_<RcDwelling>(m, "RcDwelling")
        .def(py::init([](double r, double c, double mq) { return RcDwelling{r, c, mq}; }),
             py::arg("resistance_c_per_w"), py::arg("capacitance_j_per_c"),
             py::arg("hp_max_thermal_w"))
        .def_static(
            "from_params",
            [](double ql_kw_per_c, double c_kj_per_k, double hp_kw) {
                return RcDwelling::from_params({ql_kw_per_c, c_kj_per_k, hp_kw, 0.0});
            },
            py::arg("heat_loss_kw_per_c"), py::arg("capacitance_kj_per_k"), py::arg("hp_size_kw"))
        .def_readonly("resistance_c_per_w", &RcDwelling::resistance_c_per_w)
        .def_readonly("capacitance_j_per_c", &RcDwelling::capacitance_j_per_c)
        .def_readonly("hp_max_thermal_w", &RcDwelling::hp_max_thermal_w)
        .def_property_readonly("time_constant_s", &RcDwelling::time_constant_s);

    py::class_<ServiceDuration>(m, "ServiceDuration")
        .def_property_readonly("kind",
                               [](const ServiceDuration& d) { return std::string(to_string(d.kind())); })
        .def_property_readonly("seconds", &ServiceDuration::seconds)
        .def_property_readonly("is_zero", &ServiceDuration::is_zero)
        .def_property_readonly("is_finite", &ServiceDuration::is_finite)
        .def_property_readonly("is_unbounded", &ServiceDuration::is_unbounded)
        .def("__repr__", &repr_duration);

    py::class_<FlexOutcome>(m, "FlexOutcome")
        .def_readonly("direction", &FlexOutcome::direction)
        .def_readonly("magnitude_w", &FlexOutcome::magnitude_w)
        .def_readonly("duration", &FlexOutcome::duration);

    m.def(
        "initial_heat_output",
        [](const RcDwelling& d, double indoor_c, double outdoor_c, bool clamp) {
            return initial_heat_output(d, indoor_c, outdoor_c,
                                       clamp ? OutputLimit::Clamped : OutputLimit::Unclamped);
        },
        py::arg("dwelling"), py::arg("indoor_c"), py::arg("outdoor_c"), py::arg("clamp") = true);
    m.def(
        "service_duration",
        [](const RcDwelling& d, double indoor_c, double outdoor_c, double power_w,
           Direction direction, double low_c, double high_c) {
            return service_duration(d, indoor_c, outdoor_c, power_w, ComfortBand{low_c, high_c},
                                    direction);
        },
        py::arg("dwelling"), py::arg("indoor_c"), py::arg("outdoor_c"), py::arg("power_thermal_w"),
        py::arg("direction"), py::arg("comfort_low_c") = 18.0, py::arg("comfort_high_c") = 24.0);
    m.def(
        "evaluate",
        [](const RcDwelling& d, double indoor_c, double outdoor_c, Direction direction,
           double low_c, double high_c, const std::optional<CopPoints>& cop_points) {
            return evaluate(d, indoor_c, outdoor_c, make_curve(cop_points),
                            ComfortBand{low_c, high_c}, direction);
        },
        py::arg("dwelling"), py::arg("indoor_c"), py::arg("outdoor_c"), py::arg("direction"),
        py::arg("comfort_low_c") = 18.0, py::arg("comfort_high_c") = 24.0,
        py::arg("cop_points") = py::none());

    // Stock and regions

    py::class_<DwellingRecord>(m, "DwellingRecord")
        .def(py::init([](std::string lsoa_id, std::string_view form, std::string_view heating,
                         std::uint64_t count, double before, double after, double area) {
                 return DwellingRecord{std::move(lsoa_id), make_category(form, heating), count,
                                       before, after, area};
             }),
             py::arg("lsoa_id"), py::arg("form"), py::arg("heating"), py::arg("count"),
             py::arg("heat_demand_before_kwh"), py::arg("heat_demand_after_kwh"),
             py::arg("floor_area_m2"))
        .def_readwrite("lsoa_id", &DwellingRecord::lsoa_id)
        .def_property_readonly("form",
                               [](const DwellingRecord& r) { return std::string(to_string(r.category.form)); })
        .def_property_readonly(
            "heating", [](const DwellingRecord& r) { return std::string(to_string(r.category.heating)); })
        .def_readwrite("count", &DwellingRecord::count)
        .def_readwrite("heat_demand_before_kwh", &DwellingRecord::heat_demand_before_kwh)
        .def_readwrite("heat_demand_after_kwh", &DwellingRecord::heat_demand_after_kwh)
        .def_readwrite("floor_area_m2", &DwellingRecord::floor_area_m2)
        .def(py::self == py::self);

    m.def(
        "load_stock", [](const std::filesystem::path& path) { return load_stock(path); },
        py::arg("path"));
    m.def(
        "save_stock",
        [](const std::filesystem::path& path, const std::vector<DwellingRecord>& records) {
            save_stock(path, records);
        },
        py::arg("path"), py::arg("records"));
    m.def(
        "winsorize_stock",
        [](const std::vector<DwellingRecord>& records, double lower, double upper) {
            WinsorizeOptions o;
            o.lower = lower;
            o.upper = upper;
            return winsorize_stock(records, o);
        },
        py::arg("records"), py::arg("lower") = 0.01, py::arg("upper") = 0.99);

    py::class_<RegionTable>(m, "RegionTable")
        .def(py::init([](const std::map<std::string, std::pair<std::string, std::string>>& lookup) {
                 std::map<std::string, LsoaLocation> l;
                 for (const auto& [id, loc] : lookup) {
                     l.emplace(id, LsoaLocation{loc.first, loc.second});
                 }
                 return RegionTable(default_regions(), std::move(l));
             }),
             py::arg("lookup"),
             "Built-in regions with a {lsoa_id: (region, local_authority)} lookup.")
        .def_property_readonly("region_names",
                               [](const RegionTable& t) {
                                   std::vector<std::string> names;
                                   for (const auto& r : t.regions()) names.push_back(r.name);
                                   return names;
                               })
        .def(
            "design_temp_c",
            [](const RegionTable& t, std::string_view region) { return t.region(region).design_temp_c; },
            py::arg("region"))
        .def(
            "heating_degree_days",
            [](const RegionTable& t, std::string_view region) {
                return t.region(region).heating_degree_days;
            },
            py::arg("region"));

    m.def(
        "load_region_table",
        [](const std::filesystem::path& lookup, const std::optional<std::filesystem::path>& regions) {
            return regions ? load_region_table(*regions, lookup) : load_region_table(lookup);
        },
        py::arg("lookup"), py::arg("regions") = py::none());

    m.def(
        "derive_all",
        [](const std::vector<DwellingRecord>& records, const RegionTable& regions,
           CapacityLevel level, StockVariant variant) {
            const ParamsMap params = derive_all(records, regions, level, variant);
            std::vector<std::tuple<std::string, std::string, ThermalParams>> out;
            for (const auto& r : records) {
                if (const auto it = params.find(r.key()); it != params.end()) {
                    out.emplace_back(r.lsoa_id, to_string(r.category), it->second);
                }
            }
            return out;
        },
        py::arg("records"), py::arg("regions"), py::arg("level") = CapacityLevel::Medium,
        py::arg("variant") = StockVariant::BeforeEE,
        "(lsoa_id, 'form/heating', ThermalParams) per populated record, in record order.");

    m.def(
        "synthesize_stock",
        [](std::uint64_t dwellings, std::uint64_t seed, std::uint64_t per_lsoa) {
            SynthOptions o;
            o.dwellings = dwellings;
            o.seed = seed;
            o.dwellings_per_lsoa = per_lsoa;
            SynthStock s = synthesize_stock(o);
            return std::make_pair(std::move(s.records),
                                  RegionTable(default_regions(), std::move(s.lookup)));
        },
        py::arg("dwellings"), py::arg("seed") = 1, py::arg("dwellings_per_lsoa") = 650,
        "Synthetic (records, RegionTable).");

    // Scenarios

    py::class_<ScenarioSpec>(m, "ScenarioSpec")
        .def(py::init<>())
        .def_readwrite("outdoor_temp_c", &ScenarioSpec::outdoor_temp_c)
        .def_readwrite("stock_variant", &ScenarioSpec::stock_variant)
        .def_readwrite("capacity_level", &ScenarioSpec::capacity_level)
        .def_readwrite("uptake_fraction", &ScenarioSpec::uptake_fraction)
        .def_readwrite("subsamples", &ScenarioSpec::subsamples)
        .def_property(
            "comfort_band",
            [](const ScenarioSpec& s) { return std::make_pair(s.comfort_band.low_c, s.comfort_band.high_c); },
            [](ScenarioSpec& s, std::pair<double, double> band) {
                s.comfort_band = {band.first, band.second};
            })
        .def(
            "set_fixed_indoor", [](ScenarioSpec& s, double t) { s.indoor_model = FixedIndoor{t}; },
            py::arg("temp_c"))
        .def(
            "set_truncated_normal_indoor",
            [](ScenarioSpec& s, double mean, double sd, double low, double high, std::uint64_t seed) {
                s.indoor_model = TruncatedNormalIndoor{mean, sd, low, high, seed};
            },
            py::arg("mean_c") = 19.0, py::arg("sd_c") = 2.5, py::arg("low_c") = 14.0,
            py::arg("high_c") = 24.0, py::arg("seed") = 0)
        .def("validate", &ScenarioSpec::validate)
        .def("to_ini", [](const ScenarioSpec& s) {
            std::ostringstream os;
            write_scenario(os, s);
            return os.str();
        });

    m.def(
        "read_scenario",
        [](const std::string& text) {
            std::istringstream in(text);
            return read_scenario(in);
        },
        py::arg("text"));
    m.def(
        "load_scenario", [](const std::filesystem::path& path) { return load_scenario(path); },
        py::arg("path"));

    m.def(
        "sample_indoor_temps",
        [](double mean, double sd, double low, double high, std::uint64_t seed, std::size_t n) {
            return sample_indoor_temps(TruncatedNormalIndoor{mean, sd, low, high, seed}, n);
        },
        py::arg("mean_c"), py::arg("sd_c"), py::arg("low_c"), py::arg("high_c"),
        py::arg("seed"), py::arg("n"));

    py::class_<ScenarioResult>(m, "ScenarioResult")
        .def_readonly("direction", &ScenarioResult::direction)
        .def_property_readonly("sample_count",
                               [](const ScenarioResult& r) { return r.outcomes.size(); })
        .def_property_readonly("errors", [](const ScenarioResult& r) {
            std::vector<std::tuple<std::size_t, std::string, std::string>> out;
            for (const auto& e : r.errors) out.emplace_back(e.sample_index, e.lsoa_id, e.message);
            return out;
        });

    m.def("simulate",
          [](const std::vector<DwellingRecord>& records, const RegionTable& regions,
             const ScenarioSpec& spec, Direction direction, std::size_t threads) {
              py::gil_scoped_release release;
              return simulate(records, regions, spec, direction, threads);
          },
          py::arg("records"), py::arg("regions"), py::arg("spec"), py::arg("direction"),
          py::arg("threads") = 1);

    // Aggregation

    py::class_<Envelope>(m, "Envelope")
        .def_property_readonly("breakpoints",
                               [](const Envelope& e) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto& b : e.breakpoints) out.emplace_back(b.duration_s, b.power_w);
                                   return out;
                               })
        .def_readonly("unbounded_power_w", &Envelope::unbounded_power_w)
        .def("power_at", &Envelope::power_at, py::arg("duration_s"))
        .def("magnitude_at_zero", &Envelope::magnitude_at_zero);

    py::class_<GroupAggregate>(m, "GroupAggregate")
        .def_readonly("envelope", &GroupAggregate::envelope)
        .def_readonly("installed_thermal_w", &GroupAggregate::installed_thermal_w)
        .def_readonly("magnitude_at_zero_w", &GroupAggregate::magnitude_at_zero_w)
        .def_readonly("unbounded_power_w", &GroupAggregate::unbounded_power_w)
        .def_readonly("finite_energy_wh", &GroupAggregate::finite_energy_wh);

    py::class_<AggregateReport>(m, "AggregateReport")
        .def_readonly("level", &AggregateReport::level)
        .def_readonly("direction", &AggregateReport::direction)
        .def_readonly("groups", &AggregateReport::groups)
        .def_readonly("unresolved_lsoas", &AggregateReport::unresolved_lsoas)
        .def_readonly("excluded_power_w", &AggregateReport::excluded_power_w)
        .def_readonly("total_installed_thermal_w", &AggregateReport::total_installed_thermal_w)
        .def_readonly("total_magnitude_at_zero_w", &AggregateReport::total_magnitude_at_zero_w)
        .def_readonly("total_unbounded_power_w", &AggregateReport::total_unbounded_power_w)
        .def_readonly("total_finite_energy_wh", &AggregateReport::total_finite_energy_wh);

    m.def(
        "rollup",
        [](const ScenarioResult& result, const RegionTable& regions, AggregateLevel level) {
            return rollup(result, regions, level);
        },
        py::arg("result"), py::arg("regions"), py::arg("level") = AggregateLevel::National);

    m.def(
        "export_report",
        [](const AggregateReport& report, const std::filesystem::path& dir, const std::string& format,
           std::optional<double> plot_step_s) {
            ExportOptions o;
            o.format = parse_export_format(format);
            o.plot_step_s = plot_step_s;
            return export_report(report, dir, o);
        },
        py::arg("report"), py::arg("dir"), py::arg("format") = "csv",
        py::arg("plot_step_s") = py::none());
    m.def(
        "import_report",
        [](const std::filesystem::path& dir, const std::string& format) {
            return import_report(dir, parse_export_format(format));
        },
        py::arg("dir"), py::arg("format") = "csv");
}
