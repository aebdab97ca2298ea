#include "heatflex/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "heatflex/errors.hpp"

namespace heatflex {
namespace {

// Shares roughly follow the England and Wales stock mix.
constexpr std::array<double, 4> kFormShare = {0.23, 0.31, 0.23, 0.23};
constexpr std::array<double, 4> kHeatingShare = {0.86, 0.09, 0.02, 0.03};
constexpr std::array<double, 4> kBaseDemandKwh = {17000.0, 12500.0, 11000.0, 7500.0};
constexpr std::array<double, 4> kBaseFloorArea = {140.0, 92.0, 82.0, 62.0};
constexpr double kReferenceHdd = 2000.0;

class Draws {
public:
    explicit Draws(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double lognormal(double sigma) {
        return std::exp(sigma * quantile(boost::math::normal(), uniform()));
    }

private:
    std::mt19937_64 engine_;
};

std::string lsoa_name(std::uint64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "SYN%07llu", static_cast<unsigned long long>(i + 1));
    return buf;
}

}  // namespace

SynthStock synthesize_stock(const SynthOptions& options) {
    if (options.dwellings_per_lsoa == 0 || options.local_authorities_per_region == 0) {
        throw ConfigError("synthetic stock needs positive dwellings per LSOA and LAs per region");
    }
    std::vector<Region> regions;
    if (options.regions.empty()) {
        regions = default_regions();
    } else {
        for (const auto& name : options.regions) {
            const auto& all = default_regions();
            const auto it = std::find_if(all.begin(), all.end(),
                                         [&](const Region& r) { return r.name == name; });
            if (it == all.end()) {
                throw ConfigError("unknown region '" + name + "'");
            }
            regions.push_back(*it);
        }
    }

    Draws draws(options.seed);
    SynthStock out;
    const std::uint64_t n_lsoa =
        std::max<std::uint64_t>(1, (options.dwellings + options.dwellings_per_lsoa - 1) /
                                       options.dwellings_per_lsoa);

    for (std::uint64_t l = 0; l < n_lsoa; ++l) {
        const Region& region = regions[l % regions.size()];
        const std::uint64_t la = (l / regions.size()) % options.local_authorities_per_region;
        const std::string id = lsoa_name(l);
        out.lookup[id] = {region.name, region.name + " LA " + std::to_string(la + 1)};

        std::uint64_t in_lsoa = options.dwellings / n_lsoa + (l < options.dwellings % n_lsoa ? 1 : 0);

        // Largest-remainder split of the LSOA's dwellings over 16 jittered category shares.
        std::array<double, 16> share{};
        for (std::size_t c = 0; c < 16; ++c) {
            share[c] = kFormShare[c / 4] * kHeatingShare[c % 4] * (0.5 + draws.uniform());
        }
        const double total_share = std::accumulate(share.begin(), share.end(), 0.0);
        std::array<std::uint64_t, 16> counts{};
        std::array<std::pair<double, std::size_t>, 16> remainders{};
        std::uint64_t assigned = 0;
        for (std::size_t c = 0; c < 16; ++c) {
            const double exact = static_cast<double>(in_lsoa) * share[c] / total_share;
            counts[c] = static_cast<std::uint64_t>(std::floor(exact));
            remainders[c] = {exact - std::floor(exact), c};
            assigned += counts[c];
        }
        std::sort(remainders.begin(), remainders.end(), std::greater<>());
        for (std::size_t k = 0; assigned < in_lsoa; ++k, ++assigned) {
            ++counts[remainders[k % 16].second];
        }

        for (std::size_t c = 0; c < 16; ++c) {
            const auto& category = all_categories()[c];
            DwellingRecord r;
            r.lsoa_id = id;
            r.category = category;
            r.count = counts[c];
            const auto form = static_cast<std::size_t>(category.form);
            r.heat_demand_before_kwh = kBaseDemandKwh[form] *
                                       (region.heating_degree_days / kReferenceHdd) *
                                       draws.lognormal(0.25);
            r.heat_demand_after_kwh = r.heat_demand_before_kwh * (0.60 + 0.35 * draws.uniform());
            r.floor_area_m2 = kBaseFloorArea[form] * draws.lognormal(0.2);
            out.records.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace heatflex
