#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatflex/regions.hpp"
#include "heatflex/scenario.hpp"

namespace heatflex {

struct Breakpoint {
    double duration_s = 0.0;
    double power_w = 0.0;  ///< electrical, absolute value

    bool operator==(const Breakpoint&) const = default;
};

/// Aggregate power that can be sustained for at least a given duration:
///
///   power_at(t) = sum of weight * |magnitude| over samples with (Finite D >= t) or Unbounded
///
/// stored exactly as a step function over the distinct finite durations. Breakpoint
/// (d_k, P_k) means P_k is available for every t in (d_{k-1}, d_k]; past the last
/// breakpoint only `unbounded_power_w` remains.
struct Envelope {
    std::vector<Breakpoint> breakpoints;
    double unbounded_power_w = 0.0;

    double power_at(double duration_s) const;
    /// Total magnitude of all samples that can provide the service at all.
    double magnitude_at_zero() const { return power_at(0.0); }

    /// Pointwise sum; breakpoints are the union of both duration sets.
    static Envelope sum(const Envelope& a, const Envelope& b);

    /// Samples of power_at on 0, step, 2 step, ... up to and including `cap_s`. For plotting.
    std::vector<Breakpoint> resample(double step_s, double cap_s) const;

    bool operator==(const Envelope&) const = default;
};

/// Throws UsageError when outcomes mix directions.
Envelope build_envelope(std::span<const SampleOutcome> outcomes);

struct EnergySummary {
    double finite_energy_wh = 0.0;
    /// Unbounded samples are left out of the energy and reported here instead.
    std::size_t unbounded_samples = 0;
    double unbounded_weight = 0.0;
    double unbounded_power_w = 0.0;
};

/// Sum of weight * |magnitude| * D / 3600 over Finite samples.
EnergySummary finite_energy(std::span<const SampleOutcome> outcomes);

enum class AggregateLevel { Lsoa, LocalAuthority, Region, National };
std::string_view to_string(AggregateLevel level);
/// "lsoa", "la", "region", "national".
AggregateLevel parse_aggregate_level(std::string_view text);

inline constexpr std::string_view kNationalKey = "national";
inline constexpr std::string_view kExcludedKey = "__excluded__";

struct GroupAggregate {
    Envelope envelope;
    double installed_thermal_w = 0.0;
    double magnitude_at_zero_w = 0.0;
    double unbounded_power_w = 0.0;
    double finite_energy_wh = 0.0;
    /// Power of samples left out because their LSOA could not be resolved.
    double excluded_power_w = 0.0;

    bool operator==(const GroupAggregate&) const = default;
};

struct AggregateReport {
    AggregateLevel level = AggregateLevel::National;
    Direction direction = Direction::Negative;
    std::map<std::string, GroupAggregate> groups;
    /// Samples whose LSOA has no mapping at this level.
    GroupAggregate excluded;
    std::vector<std::string> unresolved_lsoas;

    double total_installed_thermal_w = 0.0;
    double total_magnitude_at_zero_w = 0.0;
    double total_unbounded_power_w = 0.0;
    double total_finite_energy_wh = 0.0;
    double excluded_power_w = 0.0;

    /// Recomputes the totals from the groups, in key order.
    void recompute_totals();

    bool operator==(const AggregateReport&) const = default;
};

/// Groups outcomes by LSOA, local authority, region or nationally. Samples whose LSOA
/// cannot be resolved are listed, pooled into `excluded`, and left out of the totals.
AggregateReport rollup(std::span<const SampleOutcome> outcomes, const RegionTable& regions,
                       AggregateLevel level, Direction direction);
AggregateReport rollup(const ScenarioResult& result, const RegionTable& regions,
                       AggregateLevel level);

enum class ExportFormat { Csv, Json };
ExportFormat parse_export_format(std::string_view text);

struct ExportOptions {
    ExportFormat format = ExportFormat::Csv;
    /// When set, also writes plot_grid.csv: power sampled every `plot_step_s` up to
    /// `plot_cap_s`. Display only; the exact envelope is always exported.
    std::optional<double> plot_step_s;
    double plot_cap_s = 24.0 * 3600.0;
};

/// CSV: meta.csv, envelope.csv (key, duration_s, power_w, with a final "inf" row per key
/// carrying the unbounded floor), summary.csv, unresolved_lsoas.csv.
/// JSON: report.json. Keys lexicographic, breakpoints ascending; output is deterministic.
/// Returns the paths written.
std::vector<std::filesystem::path> export_report(const AggregateReport& report,
                                                 const std::filesystem::path& dir,
                                                 const ExportOptions& options = {});

AggregateReport import_report(const std::filesystem::path& dir, ExportFormat format);

}  // namespace heatflex
