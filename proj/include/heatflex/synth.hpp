#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "heatflex/regions.hpp"
#include "heatflex/stock.hpp"

namespace heatflex {

struct SynthOptions {
    std::uint64_t dwellings = 10000;
    std::uint64_t seed = 1;
    std::uint64_t dwellings_per_lsoa = 650;
    /// Regions to spread LSOAs over, round-robin. Empty means every built-in region.
    std::vector<std::string> regions;
    std::size_t local_authorities_per_region = 3;
};

struct SynthStock {
    std::vector<DwellingRecord> records;
    std::map<std::string, LsoaLocation> lookup;
};

/// Plausible but made-up stock: national form/heating shares, form-dependent heat demand
/// and floor area with log-normal spread, demand scaled by regional degree days, and a
/// post-retrofit demand 5-40% below the pre-retrofit one. Deterministic for a seed.
SynthStock synthesize_stock(const SynthOptions& options);

}  // namespace heatflex
