#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "heatflex/regions.hpp"
#include "heatflex/stock.hpp"

namespace testing_support {

using namespace heatflex;

inline DwellingRecord record(std::string lsoa, DwellingForm form, HeatingSystem heating,
                             std::uint64_t count, double before, double after, double area) {
    return {std::move(lsoa), {form, heating}, count, before, after, area};
}

/// A random fleet over the built-in regions: 16 categories per LSOA, LSOAs dealt
/// round-robin to regions, two local authorities per region. Some counts are 0.
struct Fleet {
    std::vector<DwellingRecord> records;
    RegionTable regions;
};

inline Fleet random_fleet(std::size_t n_records, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> demand(4000.0, 30000.0);
    std::uniform_real_distribution<double> after_share(0.55, 1.0);
    std::uniform_real_distribution<double> area(40.0, 220.0);
    std::uniform_int_distribution<int> count(0, 400);

    const auto& regions = default_regions();
    const auto& cats = all_categories();
    std::map<std::string, LsoaLocation> lookup;
    Fleet f;
    for (std::size_t i = 0; i < n_records; ++i) {
        const std::size_t lsoa = i / cats.size();
        const Region& region = regions[lsoa % regions.size()];
        const std::string id = "E0" + std::to_string(1000000 + lsoa);
        lookup.try_emplace(id, LsoaLocation{region.name,
                                            region.name + " LA" + std::to_string(lsoa / regions.size() % 2)});
        const double b = demand(rng);
        f.records.push_back({id, cats[i % cats.size()], static_cast<std::uint64_t>(count(rng)), b,
                             b * after_share(rng), area(rng)});
    }
    f.regions = RegionTable(regions, std::move(lookup));
    return f;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("heatflex_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing_support
