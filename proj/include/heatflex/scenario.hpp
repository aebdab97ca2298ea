#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "heatflex/rc_model.hpp"
#include "heatflex/regions.hpp"
#include "heatflex/stock.hpp"
#include "heatflex/thermal_params.hpp"

namespace heatflex {

struct FixedIndoor {
    double temp_c = 19.0;
    bool operator==(const FixedIndoor&) const = default;
};

/// Normal(mean, sd) restricted to [low, high].
struct TruncatedNormalIndoor {
    double mean_c = 19.0;
    double sd_c = 2.5;
    double low_c = 14.0;
    double high_c = 24.0;
    std::uint64_t seed = 0;
    bool operator==(const TruncatedNormalIndoor&) const = default;
};

using IndoorTempModel = std::variant<FixedIndoor, TruncatedNormalIndoor>;

/// Throws ConfigError for sd <= 0, low >= high or non-finite parameters.
void validate(const IndoorTempModel& model);

/// Draw `index` of stream `stream`. Draws are keyed by (seed, stream, index) through a
/// counter-based hash and mapped by inverse CDF, so any draw can be computed in isolation
/// and parallel evaluation never perturbs the sequence.
double draw_indoor_temp(const IndoorTempModel& model, std::uint64_t stream, std::uint64_t index);

/// Draws 0..n-1 of one stream.
std::vector<double> sample_indoor_temps(const IndoorTempModel& model, std::size_t n,
                                        std::uint64_t stream = 0);

struct ScenarioSpec {
    double outdoor_temp_c = 5.0;
    IndoorTempModel indoor_model = FixedIndoor{};
    StockVariant stock_variant = StockVariant::BeforeEE;
    CapacityLevel capacity_level = CapacityLevel::Medium;
    double uptake_fraction = 1.0;
    ComfortBand comfort_band{};
    CopCurve cop_curve = CopCurve::default_table();
    /// Sub-samples per record under a stochastic indoor model.
    std::size_t subsamples = 10;
    double indoor_design_temp_c = kDefaultIndoorDesignTempC;

    void validate() const;
    bool operator==(const ScenarioSpec&) const = default;
};

/// INI-style `key = value` sections: [scenario], [indoor], [comfort], [cop].
/// Missing keys take defaults; unknown keys are a ConfigError.
ScenarioSpec read_scenario(std::istream& in);
ScenarioSpec load_scenario(const std::filesystem::path& path);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);

struct DwellingSample {
    std::string lsoa_id;
    DwellingCategory category;
    double weight = 0.0;  ///< dwellings represented, count * uptake / sub-samples
    double indoor_temp_c = 0.0;
    ThermalParams params;
    std::size_t record_index = 0;
    std::size_t sub_index = 0;

    bool operator==(const DwellingSample&) const = default;
};

/// One sample per populated record under a fixed indoor temperature; `spec.subsamples`
/// equally weighted samples per record, each with its own draw, under a distribution.
/// Draw streams are keyed by record index, so temperatures do not depend on the params.
std::vector<DwellingSample> build_samples(std::span<const DwellingRecord> records,
                                          const ParamsMap& params, const ScenarioSpec& spec);

struct SampleOutcome {
    DwellingSample sample;
    FlexOutcome outcome;

    bool operator==(const SampleOutcome&) const = default;
};

struct SampleError {
    std::size_t sample_index = 0;
    std::string lsoa_id;
    DwellingCategory category;
    std::string message;

    bool operator==(const SampleError&) const = default;
};

struct ScenarioResult {
    Direction direction = Direction::Negative;
    /// Successful samples in input order.
    std::vector<SampleOutcome> outcomes;
    std::vector<SampleError> errors;

    bool operator==(const ScenarioResult&) const = default;
};

/// Evaluates every sample at the scenario's outdoor temperature. With threads > 1 the
/// samples are split into contiguous chunks and merged back in order; the result is
/// identical to the serial run. A failing sample is reported in `errors` and skipped.
ScenarioResult run_scenario(std::span<const DwellingSample> samples, const ScenarioSpec& spec,
                            Direction direction, std::size_t threads = 1);

/// derive_all + build_samples + run_scenario under the spec's variant and capacity level.
ScenarioResult simulate(std::span<const DwellingRecord> records, const RegionTable& regions,
                        const ScenarioSpec& spec, Direction direction, std::size_t threads = 1);

struct RetrofitComparison {
    ScenarioResult before;
    ScenarioResult after;
};

/// The same spec run on the pre- and post-retrofit stock; heat pumps are resized for the
/// post-retrofit losses.
RetrofitComparison retrofit_comparison(std::span<const DwellingRecord> records,
                                       const RegionTable& regions, const ScenarioSpec& spec,
                                       Direction direction, std::size_t threads = 1);

/// One run per capacity level, in the order given, otherwise identical.
std::vector<std::pair<CapacityLevel, ScenarioResult>> capacity_sweep(
    std::span<const DwellingRecord> records, const RegionTable& regions, const ScenarioSpec& spec,
    std::span<const CapacityLevel> levels, Direction direction, std::size_t threads = 1);

}  // namespace heatflex
