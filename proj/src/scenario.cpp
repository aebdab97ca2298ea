#include "heatflex/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finaliser
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform on the open interval (0, 1).
double keyed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const std::uint64_t key = mix64(mix64(seed + kGolden) + (stream + 1) * kGolden);
    const std::uint64_t bits = mix64(key ^ mix64((index + 1) * kGolden));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double truncated_normal_quantile(const TruncatedNormalIndoor& m, double u) {
    const boost::math::normal standard;
    const double alpha = (m.low_c - m.mean_c) / m.sd_c;
    const double beta = (m.high_c - m.mean_c) / m.sd_c;
    double z = 0.0;
    if (alpha >= 0.0) {
        // Whole interval in the upper tail: work with survival probabilities.
        const double qa = cdf(complement(standard, alpha));
        const double qb = cdf(complement(standard, beta));
        z = quantile(complement(standard, qa - u * (qa - qb)));
    } else {
        const double fa = cdf(standard, alpha);
        const double fb = cdf(standard, beta);
        z = quantile(standard, fa + u * (fb - fa));
    }
    return std::clamp(m.mean_c + m.sd_c * z, m.low_c, m.high_c);
}

}  // namespace

void validate(const IndoorTempModel& model) {
    if (const auto* f = std::get_if<FixedIndoor>(&model)) {
        if (!std::isfinite(f->temp_c)) {
            throw ConfigError("fixed indoor temperature must be finite");
        }
        return;
    }
    const auto& t = std::get<TruncatedNormalIndoor>(model);
    if (!std::isfinite(t.mean_c) || !std::isfinite(t.low_c) || !std::isfinite(t.high_c) ||
        !std::isfinite(t.sd_c)) {
        throw ConfigError("indoor distribution parameters must be finite");
    }
    if (!(t.sd_c > 0.0)) {
        throw ConfigError("indoor distribution needs sd > 0");
    }
    if (!(t.low_c < t.high_c)) {
        throw ConfigError("indoor distribution needs low < high");
    }
}

double draw_indoor_temp(const IndoorTempModel& model, std::uint64_t stream, std::uint64_t index) {
    if (const auto* f = std::get_if<FixedIndoor>(&model)) {
        return f->temp_c;
    }
    const auto& t = std::get<TruncatedNormalIndoor>(model);
    return truncated_normal_quantile(t, keyed_uniform(t.seed, stream, index));
}

std::vector<double> sample_indoor_temps(const IndoorTempModel& model, std::size_t n,
                                        std::uint64_t stream) {
    validate(model);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = draw_indoor_temp(model, stream, i);
    }
    return out;
}

void ScenarioSpec::validate() const {
    if (!std::isfinite(outdoor_temp_c)) {
        throw ConfigError("outdoor temperature must be finite");
    }
    heatflex::validate(indoor_model);
    if (!(uptake_fraction >= 0.0 && uptake_fraction <= 1.0)) {
        throw ConfigError("uptake fraction must lie in [0, 1]");
    }
    comfort_band.validate();
    if (subsamples == 0) {
        throw ConfigError("subsamples must be at least 1");
    }
    if (!std::isfinite(indoor_design_temp_c)) {
        throw ConfigError("indoor design temperature must be finite");
    }
}

std::vector<DwellingSample> build_samples(std::span<const DwellingRecord> records,
                                          const ParamsMap& params, const ScenarioSpec& spec) {
    spec.validate();
    const bool stochastic = std::holds_alternative<TruncatedNormalIndoor>(spec.indoor_model);
    const std::size_t k = stochastic ? spec.subsamples : 1;

    std::vector<DwellingSample> samples;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const DwellingRecord& r = records[i];
        if (r.skippable()) {
            continue;
        }
        const auto it = params.find(r.key());
        if (it == params.end()) {
            throw MissingParamsError("no thermal parameters for (" + r.lsoa_id + ", " +
                                     to_string(r.category) + ")");
        }
        const double weight =
            static_cast<double>(r.count) * spec.uptake_fraction / static_cast<double>(k);
        for (std::size_t j = 0; j < k; ++j) {
            DwellingSample s;
            s.lsoa_id = r.lsoa_id;
            s.category = r.category;
            s.weight = weight;
            s.indoor_temp_c = draw_indoor_temp(spec.indoor_model, i, j);
            s.params = it->second;
            s.record_index = i;
            s.sub_index = j;
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

ScenarioResult run_scenario(std::span<const DwellingSample> samples, const ScenarioSpec& spec,
                            Direction direction, std::size_t threads) {
    spec.validate();
    struct Slot {
        std::optional<FlexOutcome> outcome;
        std::string error;
    };
    std::vector<Slot> slots(samples.size());

    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const DwellingSample& s = samples[i];
            try {
                const RcDwelling dwelling = RcDwelling::from_params(s.params);
                slots[i].outcome = evaluate(dwelling, s.indoor_temp_c, spec.outdoor_temp_c,
                                            spec.cop_curve, spec.comfort_band, direction);
            } catch (const std::exception& e) {
                slots[i].error = e.what();
            }
        }
    };

    threads = std::max<std::size_t>(1, std::min(threads, samples.size()));
    if (threads == 1) {
        work(0, samples.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (samples.size() + threads - 1) / threads;
        for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
            pool.emplace_back(work, begin, std::min(samples.size(), begin + chunk));
        }
    }

    ScenarioResult result;
    result.direction = direction;
    result.outcomes.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (slots[i].outcome) {
            result.outcomes.push_back({samples[i], *slots[i].outcome});
        } else {
            result.errors.push_back(
                {i, samples[i].lsoa_id, samples[i].category, std::move(slots[i].error)});
        }
    }
    return result;
}

ScenarioResult simulate(std::span<const DwellingRecord> records, const RegionTable& regions,
                        const ScenarioSpec& spec, Direction direction, std::size_t threads) {
    spec.validate();
    const ParamsMap params = derive_all(records, regions, spec.capacity_level, spec.stock_variant,
                                        spec.indoor_design_temp_c);
    const auto samples = build_samples(records, params, spec);
    return run_scenario(samples, spec, direction, threads);
}

RetrofitComparison retrofit_comparison(std::span<const DwellingRecord> records,
                                       const RegionTable& regions, const ScenarioSpec& spec,
                                       Direction direction, std::size_t threads) {
    ScenarioSpec before = spec;
    before.stock_variant = StockVariant::BeforeEE;
    ScenarioSpec after = spec;
    after.stock_variant = StockVariant::AfterEE;
    return {simulate(records, regions, before, direction, threads),
            simulate(records, regions, after, direction, threads)};
}

std::vector<std::pair<CapacityLevel, ScenarioResult>> capacity_sweep(
    std::span<const DwellingRecord> records, const RegionTable& regions, const ScenarioSpec& spec,
    std::span<const CapacityLevel> levels, Direction direction, std::size_t threads) {
    if (levels.empty()) {
        throw ConfigError("capacity sweep needs at least one level");
    }
    std::vector<std::pair<CapacityLevel, ScenarioResult>> out;
    for (CapacityLevel level : levels) {
        ScenarioSpec s = spec;
        s.capacity_level = level;
        out.emplace_back(level, simulate(records, regions, s, direction, threads));
    }
    return out;
}

}  // namespace heatflex
