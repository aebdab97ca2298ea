#include "heatflex/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

constexpr double kSecondsPerHour = 3600.0;

/// Accumulates one group. Finite contributions are buffered and sorted at the end.
class GroupBuilder {
public:
    void add(const SampleOutcome& so) {
        installed_w_ += so.sample.weight * 1000.0 * so.sample.params.hp_size_kw;
        const ServiceDuration& d = so.outcome.duration;
        const double power = so.sample.weight * std::abs(so.outcome.magnitude_w);
        if (d.is_zero() || power == 0.0) {
            return;
        }
        if (d.is_unbounded()) {
            unbounded_w_ += power;
            return;
        }
        finite_.push_back({d.seconds(), power});
    }

    Envelope envelope() {
        std::sort(finite_.begin(), finite_.end(),
                  [](const Breakpoint& a, const Breakpoint& b) { return a.duration_s < b.duration_s; });
        Envelope env;
        env.unbounded_power_w = unbounded_w_;
        double running = unbounded_w_;
        // Suffix sums from the longest duration down; equal durations collapse.
        std::vector<Breakpoint> reversed;
        for (auto it = finite_.rbegin(); it != finite_.rend(); ++it) {
            running += it->power_w;
            if (!reversed.empty() && reversed.back().duration_s == it->duration_s) {
                reversed.back().power_w = running;
            } else {
                reversed.push_back({it->duration_s, running});
            }
        }
        env.breakpoints.assign(reversed.rbegin(), reversed.rend());
        return env;
    }

    double finite_energy_wh() const {
        double e = 0.0;
        for (const auto& f : finite_) {
            e += f.power_w * f.duration_s / kSecondsPerHour;
        }
        return e;
    }

    GroupAggregate finish() {
        GroupAggregate g;
        g.envelope = envelope();
        g.installed_thermal_w = installed_w_;
        g.magnitude_at_zero_w = g.envelope.magnitude_at_zero();
        g.unbounded_power_w = g.envelope.unbounded_power_w;
        g.finite_energy_wh = finite_energy_wh();
        return g;
    }

private:
    std::vector<Breakpoint> finite_;
    double unbounded_w_ = 0.0;
    double installed_w_ = 0.0;
};

void require_single_direction(std::span<const SampleOutcome> outcomes, Direction direction) {
    for (const auto& so : outcomes) {
        if (so.outcome.direction != direction) {
            throw UsageError("outcomes mix positive and negative services");
        }
    }
}

}  // namespace

double Envelope::power_at(double duration_s) const {
    const auto it = std::lower_bound(
        breakpoints.begin(), breakpoints.end(), duration_s,
        [](const Breakpoint& b, double t) { return b.duration_s < t; });
    return it == breakpoints.end() ? unbounded_power_w : it->power_w;
}

Envelope Envelope::sum(const Envelope& a, const Envelope& b) {
    std::vector<double> durations;
    durations.reserve(a.breakpoints.size() + b.breakpoints.size());
    for (const auto& bp : a.breakpoints) durations.push_back(bp.duration_s);
    for (const auto& bp : b.breakpoints) durations.push_back(bp.duration_s);
    std::sort(durations.begin(), durations.end());
    durations.erase(std::unique(durations.begin(), durations.end()), durations.end());

    Envelope out;
    out.unbounded_power_w = a.unbounded_power_w + b.unbounded_power_w;
    out.breakpoints.reserve(durations.size());
    for (double d : durations) {
        out.breakpoints.push_back({d, a.power_at(d) + b.power_at(d)});
    }
    return out;
}

std::vector<Breakpoint> Envelope::resample(double step_s, double cap_s) const {
    if (!(step_s > 0.0) || !(cap_s >= 0.0)) {
        throw ConfigError("plot grid needs step > 0 and cap >= 0");
    }
    std::vector<Breakpoint> out;
    const auto n = static_cast<std::size_t>(std::floor(cap_s / step_s));
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * step_s;
        out.push_back({t, power_at(t)});
    }
    if (out.back().duration_s < cap_s) {
        out.push_back({cap_s, power_at(cap_s)});
    }
    return out;
}

Envelope build_envelope(std::span<const SampleOutcome> outcomes) {
    if (!outcomes.empty()) {
        require_single_direction(outcomes, outcomes.front().outcome.direction);
    }
    GroupBuilder builder;
    for (const auto& so : outcomes) {
        builder.add(so);
    }
    return builder.envelope();
}

EnergySummary finite_energy(std::span<const SampleOutcome> outcomes) {
    if (!outcomes.empty()) {
        require_single_direction(outcomes, outcomes.front().outcome.direction);
    }
    EnergySummary s;
    for (const auto& so : outcomes) {
        const ServiceDuration& d = so.outcome.duration;
        const double power = so.sample.weight * std::abs(so.outcome.magnitude_w);
        if (d.is_finite()) {
            s.finite_energy_wh += power * d.seconds() / kSecondsPerHour;
        } else if (d.is_unbounded()) {
            ++s.unbounded_samples;
            s.unbounded_weight += so.sample.weight;
            s.unbounded_power_w += power;
        }
    }
    return s;
}

std::string_view to_string(AggregateLevel level) {
    switch (level) {
        case AggregateLevel::Lsoa: return "lsoa";
        case AggregateLevel::LocalAuthority: return "la";
        case AggregateLevel::Region: return "region";
        case AggregateLevel::National: return "national";
    }
    return "?";
}

AggregateLevel parse_aggregate_level(std::string_view text) {
    const std::string s = csv::to_lower(csv::trim(text));
    if (s == "lsoa") return AggregateLevel::Lsoa;
    if (s == "la" || s == "local_authority") return AggregateLevel::LocalAuthority;
    if (s == "region") return AggregateLevel::Region;
    if (s == "national") return AggregateLevel::National;
    throw ConfigError("unknown aggregation level '" + std::string(text) +
                      "' (expected lsoa, la, region or national)");
}

ExportFormat parse_export_format(std::string_view text) {
    const std::string s = csv::to_lower(csv::trim(text));
    if (s == "csv") return ExportFormat::Csv;
    if (s == "json") return ExportFormat::Json;
    throw ConfigError("unknown export format '" + std::string(text) + "' (expected csv or json)");
}

void AggregateReport::recompute_totals() {
    total_installed_thermal_w = 0.0;
    total_magnitude_at_zero_w = 0.0;
    total_unbounded_power_w = 0.0;
    total_finite_energy_wh = 0.0;
    for (const auto& [key, g] : groups) {
        total_installed_thermal_w += g.installed_thermal_w;
        total_magnitude_at_zero_w += g.magnitude_at_zero_w;
        total_unbounded_power_w += g.unbounded_power_w;
        total_finite_energy_wh += g.finite_energy_wh;
    }
    excluded_power_w = excluded.excluded_power_w;
}

AggregateReport rollup(std::span<const SampleOutcome> outcomes, const RegionTable& regions,
                       AggregateLevel level, Direction direction) {
    require_single_direction(outcomes, direction);

    std::map<std::string, GroupBuilder> builders;
    GroupBuilder excluded;
    std::set<std::string> unresolved;

    for (const auto& so : outcomes) {
        const std::string& lsoa = so.sample.lsoa_id;
        std::optional<std::string> key;
        switch (level) {
            case AggregateLevel::Lsoa: key = lsoa; break;
            case AggregateLevel::National: key = std::string(kNationalKey); break;
            case AggregateLevel::LocalAuthority:
                if (const auto* loc = regions.locate(lsoa)) key = loc->local_authority;
                break;
            case AggregateLevel::Region:
                if (const auto* loc = regions.locate(lsoa)) key = loc->region;
                break;
        }
        if (key) {
            builders[*key].add(so);
        } else {
            unresolved.insert(lsoa);
            excluded.add(so);
        }
    }

    AggregateReport report;
    report.level = level;
    report.direction = direction;
    for (auto& [key, builder] : builders) {
        report.groups.emplace(key, builder.finish());
    }
    if (!unresolved.empty()) {
        report.excluded = excluded.finish();
        report.excluded.excluded_power_w = report.excluded.magnitude_at_zero_w;
    }
    report.unresolved_lsoas.assign(unresolved.begin(), unresolved.end());
    report.recompute_totals();
    return report;
}

AggregateReport rollup(const ScenarioResult& result, const RegionTable& regions,
                       AggregateLevel level) {
    return rollup(result.outcomes, regions, level, result.direction);
}

}  // namespace heatflex
