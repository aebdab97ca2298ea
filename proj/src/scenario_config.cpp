#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"
#include "heatflex/scenario.hpp"

namespace heatflex {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"scenario",
         {"outdoor_temp_c", "stock_variant", "capacity_level", "uptake_fraction", "subsamples",
          "indoor_design_temp_c"}},
        {"indoor", {"model", "temp_c", "mean_c", "sd_c", "low_c", "high_c", "seed"}},
        {"comfort", {"low_c", "high_c"}},
        {"cop", {"points"}},
    };
    return keys;
}

double get_double(const pt::ptree& section, const std::string& where, const std::string& key,
                  double fallback) {
    const auto value = section.get_optional<std::string>(key);
    if (!value) {
        return fallback;
    }
    const auto parsed = csv::parse_double(*value);
    if (!parsed) {
        throw ConfigError(where + "." + key + ": not a number: '" + *value + "'");
    }
    return *parsed;
}

CopCurve parse_cop_points(const std::string& text) {
    std::vector<CopCurve::Point> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("cop.points: expected 'temp:cop' pairs, got '" + item + "'");
        }
        const auto t = csv::parse_double(std::string_view(item).substr(0, colon));
        const auto c = csv::parse_double(std::string_view(item).substr(colon + 1));
        if (!t || !c) {
            throw ConfigError("cop.points: bad pair '" + item + "'");
        }
        points.push_back({*t, *c});
    }
    return CopCurve(std::move(points));
}

}  // namespace

ScenarioSpec read_scenario(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }

    const auto& allowed = allowed_keys();
    for (const auto& [section, body] : tree) {
        const auto it = allowed.find(section);
        if (it == allowed.end()) {
            if (body.empty()) {
                throw ConfigError("scenario config: key '" + section + "' outside any section");
            }
            throw ConfigError("scenario config: unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.contains(key)) {
                throw ConfigError("scenario config: unknown key '" + key + "' in [" + section + "]");
            }
        }
    }

    ScenarioSpec spec;
    const pt::ptree empty;
    const auto section = [&](const std::string& name) -> const pt::ptree& {
        const auto child = tree.get_child_optional(name);
        return child ? *child : empty;
    };

    const pt::ptree& scen = section("scenario");
    spec.outdoor_temp_c = get_double(scen, "scenario", "outdoor_temp_c", spec.outdoor_temp_c);
    if (const auto v = scen.get_optional<std::string>("stock_variant")) {
        spec.stock_variant = parse_stock_variant(*v);
    }
    if (const auto v = scen.get_optional<std::string>("capacity_level")) {
        spec.capacity_level = parse_capacity_level(*v);
    }
    spec.uptake_fraction = get_double(scen, "scenario", "uptake_fraction", spec.uptake_fraction);
    if (const auto v = scen.get_optional<std::string>("subsamples")) {
        const auto n = csv::parse_uint(*v);
        if (!n) {
            throw ConfigError("scenario.subsamples: not a non-negative integer: '" + *v + "'");
        }
        spec.subsamples = static_cast<std::size_t>(*n);
    }
    spec.indoor_design_temp_c =
        get_double(scen, "scenario", "indoor_design_temp_c", spec.indoor_design_temp_c);

    const pt::ptree& indoor = section("indoor");
    const std::string model = csv::to_lower(indoor.get<std::string>("model", "fixed"));
    if (model == "fixed") {
        for (const char* key : {"mean_c", "sd_c", "low_c", "high_c", "seed"}) {
            if (indoor.count(key) != 0) {
                throw ConfigError(std::string("scenario config: [indoor] ") + key +
                                  " does not apply to model = fixed");
            }
        }
        spec.indoor_model = FixedIndoor{get_double(indoor, "indoor", "temp_c", 19.0)};
    } else if (model == "truncated_normal") {
        if (indoor.count("temp_c") != 0) {
            throw ConfigError("scenario config: [indoor] temp_c does not apply to "
                              "model = truncated_normal");
        }
        TruncatedNormalIndoor t;
        t.mean_c = get_double(indoor, "indoor", "mean_c", t.mean_c);
        t.sd_c = get_double(indoor, "indoor", "sd_c", t.sd_c);
        t.low_c = get_double(indoor, "indoor", "low_c", t.low_c);
        t.high_c = get_double(indoor, "indoor", "high_c", t.high_c);
        if (const auto v = indoor.get_optional<std::string>("seed")) {
            const auto seed = csv::parse_uint(*v);
            if (!seed) {
                throw ConfigError("indoor.seed: not an unsigned integer: '" + *v + "'");
            }
            t.seed = *seed;
        }
        spec.indoor_model = t;
    } else {
        throw ConfigError("indoor.model must be 'fixed' or 'truncated_normal', got '" + model + "'");
    }

    const pt::ptree& comfort = section("comfort");
    spec.comfort_band.low_c = get_double(comfort, "comfort", "low_c", spec.comfort_band.low_c);
    spec.comfort_band.high_c = get_double(comfort, "comfort", "high_c", spec.comfort_band.high_c);

    if (const auto points = section("cop").get_optional<std::string>("points")) {
        spec.cop_curve = parse_cop_points(*points);
    }

    spec.validate();
    return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open scenario config: " + path.string());
    }
    return read_scenario(in);
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
    const auto num = [](double v) { return csv::format_double(v); };
    out << "[scenario]\n"
        << "outdoor_temp_c = " << num(spec.outdoor_temp_c) << '\n'
        << "stock_variant = " << to_string(spec.stock_variant) << '\n'
        << "capacity_level = " << to_string(spec.capacity_level) << '\n'
        << "uptake_fraction = " << num(spec.uptake_fraction) << '\n'
        << "subsamples = " << spec.subsamples << '\n'
        << "indoor_design_temp_c = " << num(spec.indoor_design_temp_c) << "\n\n";

    out << "[indoor]\n";
    if (const auto* f = std::get_if<FixedIndoor>(&spec.indoor_model)) {
        out << "model = fixed\n"
            << "temp_c = " << num(f->temp_c) << "\n\n";
    } else {
        const auto& t = std::get<TruncatedNormalIndoor>(spec.indoor_model);
        out << "model = truncated_normal\n"
            << "mean_c = " << num(t.mean_c) << '\n'
            << "sd_c = " << num(t.sd_c) << '\n'
            << "low_c = " << num(t.low_c) << '\n'
            << "high_c = " << num(t.high_c) << '\n'
            << "seed = " << t.seed << "\n\n";
    }

    out << "[comfort]\n"
        << "low_c = " << num(spec.comfort_band.low_c) << '\n'
        << "high_c = " << num(spec.comfort_band.high_c) << "\n\n";

    out << "[cop]\npoints = ";
    const auto& pts = spec.cop_curve.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out << (i ? ", " : "") << num(pts[i].outdoor_c) << ':' << num(pts[i].cop);
    }
    out << '\n';
}

}  // namespace heatflex
