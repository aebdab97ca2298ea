#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "heatflex/csv.hpp"
#include "heatflex/errors.hpp"
#include "heatflex/stock.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace heatflex;
using testing_support::record;

namespace {

const std::string kHeader =
    "lsoa_id,form,heating,count,heat_demand_before_kwh,heat_demand_after_kwh,floor_area_m2\n";

std::vector<DwellingRecord> parse(const std::string& text, const StockSchema& schema = {}) {
    std::istringstream in(text);
    return read_stock(in, schema);
}

std::vector<DwellingRecord> one_category(const std::vector<double>& demands) {
    std::vector<DwellingRecord> out;
    for (std::size_t i = 0; i < demands.size(); ++i) {
        out.push_back(record("L" + std::to_string(i), DwellingForm::Terraced, HeatingSystem::GasBoiler,
                             10, demands[i], demands[i], 50.0 + static_cast<double>(i)));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV primitives

TEST(Csv, ReaderHandlesQuotesMultilineBomAndCrlf) {
    std::istringstream in("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"line1\nline2\"\r\n\n\"q\"\"q\",\r\n");
    csv::Reader reader(in);
    csv::Row row;
    ASSERT_TRUE(reader.next(row));
    EXPECT_EQ(row, (csv::Row{"a", "b"}));
    ASSERT_TRUE(reader.next(row));
    EXPECT_EQ(row, (csv::Row{"x, y", "line1\nline2"}));
    ASSERT_TRUE(reader.next(row));
    EXPECT_EQ(row, (csv::Row{"q\"q", ""}));
    EXPECT_FALSE(reader.next(row));
}

TEST(Csv, WriteThenReadRoundTrips) {
    const csv::Row original{"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
    std::ostringstream out;
    csv::write_row(out, original);
    std::istringstream in(out.str());
    csv::Reader reader(in);
    csv::Row row;
    ASSERT_TRUE(reader.next(row));
    EXPECT_EQ(row, original);
}

TEST(Csv, ParseDoubleIsStrictAndLocaleFree) {
    EXPECT_EQ(csv::parse_double("2058.9"), 2058.9);
    EXPECT_EQ(csv::parse_double(" -3 "), -3.0);
    EXPECT_EQ(csv::parse_double("+1e3"), 1000.0);
    EXPECT_FALSE(csv::parse_double("1,5"));
    EXPECT_FALSE(csv::parse_double("abc"));
    EXPECT_FALSE(csv::parse_double(""));
    EXPECT_FALSE(csv::parse_double("12kWh"));
    EXPECT_FALSE(csv::parse_double("nan"));
    EXPECT_FALSE(csv::parse_double("inf"));
}

TEST(Csv, FormatDoubleRoundTripsExactly) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, (i % 20) - 10);
        EXPECT_EQ(csv::parse_double(csv::format_double(v)), v);
    }
    EXPECT_EQ(csv::format_double(0.1), "0.1");
    EXPECT_EQ(csv::format_double(-0.0), "0");
    EXPECT_EQ(csv::format_double(std::numeric_limits<double>::infinity()), "inf");
}

// ---------------------------------------------------------------------------
// load_stock

TEST(LoadStock, ThreeRowsInFileOrder) {
    const auto recs = parse(kHeader +
                            "E02,flat,gas,5,8000,7000,60\n"
                            "E01,detached,oil,2,20000,15000,150\n"
                            "E03,terraced,biomass,7,11000,11000,80\n");
    ASSERT_EQ(recs.size(), 3u);
    EXPECT_EQ(recs[0].lsoa_id, "E02");
    EXPECT_EQ(recs[1].lsoa_id, "E01");
    EXPECT_EQ(recs[2].lsoa_id, "E03");
    EXPECT_EQ(recs[1].category, (DwellingCategory{DwellingForm::Detached, HeatingSystem::OilBoiler}));
    EXPECT_EQ(recs[1].count, 2u);
    EXPECT_EQ(recs[1].heat_demand_before_kwh, 20000.0);
    EXPECT_EQ(recs[1].heat_demand_after_kwh, 15000.0);
    EXPECT_EQ(recs[1].floor_area_m2, 150.0);
}

TEST(LoadStock, MissingColumnIsSchemaErrorNamingIt) {
    const std::string text =
        "lsoa_id,form,heating,count,heat_demand_before_kwh,heat_demand_after_kwh\n"
        "E01,flat,gas,1,100,90\n";
    try {
        parse(text);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("floor_area"), std::string::npos) << e.what();
    }
}

TEST(LoadStock, NonNumericCellReportsRow) {
    const std::string text = kHeader +
                             "E01,flat,gas,1,100,90,50\n"
                             "E02,flat,gas,1,lots,90,50\n";
    try {
        parse(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(LoadStock, NonIntegerCountIsParseError) {
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,1.5,100,90,50\n"), ParseError);
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,-1,100,90,50\n"), ParseError);
}

TEST(LoadStock, DuplicateKeyRejected) {
    EXPECT_THROW(parse(kHeader +
                       "E01,flat,gas,1,100,90,50\n"
                       "E01,flat,gas,2,200,90,50\n"),
                 DuplicateKeyError);
}

TEST(LoadStock, SixteenCategoriesOfOneLsoa) {
    // Hand-enumerated form x heating grid.
    const char* forms[] = {"detached", "semi-detached", "terraced", "flat"};
    const char* heats[] = {"gas", "resistance", "biomass", "oil"};
    std::string text = kHeader;
    for (const char* f : forms) {
        for (const char* h : heats) {
            text += std::string("E01,") + f + "," + h + ",3,9000,8000,70\n";
        }
    }
    const auto recs = parse(text);
    ASSERT_EQ(recs.size(), 16u);
    std::set<DwellingCategory> seen;
    for (const auto& r : recs) {
        seen.insert(r.category);
    }
    EXPECT_EQ(seen.size(), 16u);
    EXPECT_EQ(all_categories().size(), 16u);
}

TEST(LoadStock, ZeroCountRowsKeptAndSkippable) {
    const auto recs = parse(kHeader +
                            "E01,flat,gas,0,0,0,0\n"
                            "E01,flat,oil,4,100,90,50\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_TRUE(recs[0].skippable());
    EXPECT_FALSE(recs[1].skippable());
}

TEST(LoadStock, RecordInvariantsEnforced) {
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,1,100,120,50\n"), DataError);  // after > before
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,1,0,0,50\n"), DataError);
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,1,100,90,0\n"), DataError);
    EXPECT_THROW(parse(kHeader + "E01,castle,gas,1,100,90,50\n"), DataError);
    EXPECT_THROW(parse(kHeader + "E01,flat,gas,1,100,90\n"), ParseError);
}

TEST(LoadStock, SchemaOverridesAndDelimiter) {
    const StockSchema schema =
        StockSchema::with_overrides({{"floor_area", "TFA"}, {"lsoa_id", "LSOA11CD"}}, ';');
    const auto recs = parse(
        "LSOA11CD;form;heating;count;heat_demand_before_kwh;heat_demand_after_kwh;TFA\n"
        "E01;flat;gas;1;100.5;90;50\n",
        schema);
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0].lsoa_id, "E01");
    EXPECT_EQ(recs[0].heat_demand_before_kwh, 100.5);
    EXPECT_EQ(recs[0].floor_area_m2, 50.0);

    // Decimal commas are not numbers, whatever the delimiter.
    EXPECT_THROW(parse("LSOA11CD;form;heating;count;heat_demand_before_kwh;heat_demand_after_kwh;TFA\n"
                       "E01;flat;gas;1;100,5;90;50\n",
                       schema),
                 ParseError);
    EXPECT_THROW(StockSchema::with_overrides({{"floorspace", "x"}}), ConfigError);
}

TEST(LoadStock, ColumnOrderIsFree) {
    const auto recs = parse(
        "floor_area_m2,count,lsoa_id,heating,form,heat_demand_after_kwh,heat_demand_before_kwh\n"
        "50,3,E01,oil,flat,90,100\n");
    ASSERT_EQ(recs.size(), 1u);
    EXPECT_EQ(recs[0], record("E01", DwellingForm::Flat, HeatingSystem::OilBoiler, 3, 100, 90, 50));
}

TEST(LoadStock, WriteThenLoadIsIdentity) {
    const auto fleet = testing_support::random_fleet(500, 11);
    std::ostringstream out;
    write_stock(out, fleet.records);
    EXPECT_EQ(parse(out.str()), fleet.records);
}

TEST(LoadStock, SaveThenLoadFileIsIdentity) {
    testing_support::TempDir dir("stock");
    const auto fleet = testing_support::random_fleet(64, 12);
    save_stock(dir / "s.csv", fleet.records);
    EXPECT_EQ(load_stock(dir / "s.csv"), fleet.records);
    EXPECT_THROW(load_stock(dir / "missing.csv"), DataError);
}

// ---------------------------------------------------------------------------
// Percentiles and winsorization

TEST(Percentile, MatchesSortOracle) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (std::size_t n : {2u, 3u, 7u, 100u, 101u, 999u}) {
        std::vector<double> v(n);
        for (auto& x : v) x = u(rng);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        for (double p : {0.0, 0.01, 0.25, 0.5, 0.9, 0.99, 1.0}) {
            EXPECT_EQ(percentile(sorted, p, PercentileMethod::NearestRank), oracle::percentile(v, p, true));
            EXPECT_NEAR(percentile(sorted, p, PercentileMethod::Linear), oracle::percentile(v, p, false),
                        1e-12);
        }
    }
}

TEST(Winsorize, OneToHundredClipsOnlyTheTails) {
    std::vector<double> demands;
    for (int i = 1; i <= 100; ++i) demands.push_back(i);
    for (const auto method : {PercentileMethod::NearestRank, PercentileMethod::Linear}) {
        const bool nearest = method == PercentileMethod::NearestRank;
        const double lo = oracle::percentile(demands, 0.01, nearest);
        const double hi = oracle::percentile(demands, 0.99, nearest);
        const auto out = winsorize_stock(one_category(demands), {0.01, 0.99, method});
        ASSERT_EQ(out.size(), 100u);
        double mn = 1e300, mx = -1e300;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double v = out[i].heat_demand_before_kwh;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            if (demands[i] > lo && demands[i] < hi) {
                EXPECT_EQ(v, demands[i]);
            }
            EXPECT_EQ(out[i].count, 10u);
        }
        EXPECT_EQ(mn, lo);
        EXPECT_EQ(mx, hi);
    }
    // Nearest rank lands on observed values: 2 and 99.
    const auto out = winsorize_stock(one_category(demands));
    EXPECT_EQ(out.front().heat_demand_before_kwh, 2.0);
    EXPECT_EQ(out.back().heat_demand_before_kwh, 99.0);
}

TEST(Winsorize, IdenticalRecordsUnchanged) {
    const auto in = one_category(std::vector<double>(20, 12345.0));
    const auto out = winsorize_stock(in);
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_EQ(out[i].heat_demand_before_kwh, 12345.0);
        EXPECT_EQ(out[i].heat_demand_after_kwh, 12345.0);
    }
}

TEST(Winsorize, SingleRecordCategoryPassesThroughWithWarning) {
    std::vector<DwellingRecord> in = one_category({1.0, 2.0, 3.0, 1000.0});
    in.push_back(record("X", DwellingForm::Flat, HeatingSystem::OilBoiler, 5, 1e6, 1.0, 1e4));
    std::vector<std::string> warnings;
    const auto out = winsorize_stock(in, {}, &warnings);
    EXPECT_EQ(out.back(), in.back());
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("flat/oil"), std::string::npos) << warnings[0];
}

TEST(Winsorize, CategoriesAreClippedIndependently) {
    std::vector<DwellingRecord> in;
    for (int i = 1; i <= 50; ++i) {
        in.push_back(record("A" + std::to_string(i), DwellingForm::Flat, HeatingSystem::GasBoiler, 1,
                            i, i, i));
        in.push_back(record("A" + std::to_string(i), DwellingForm::Detached, HeatingSystem::GasBoiler,
                            1, 1000.0 * i, 1000.0 * i, 10.0 * i));
    }
    const auto out = winsorize_stock(in, {0.1, 0.9});
    std::vector<double> flats, detached;
    for (int i = 1; i <= 50; ++i) {
        flats.push_back(i);
        detached.push_back(1000.0 * i);
    }
    const double flat_hi = oracle::percentile(flats, 0.9, true);
    const double det_hi = oracle::percentile(detached, 0.9, true);
    EXPECT_EQ(out[2 * 49].heat_demand_before_kwh, flat_hi);
    EXPECT_EQ(out[2 * 49 + 1].heat_demand_before_kwh, det_hi);
}

TEST(Winsorize, ZeroCountRecordsIgnored) {
    std::vector<DwellingRecord> in = one_category({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
    auto ghost = record("G", DwellingForm::Terraced, HeatingSystem::GasBoiler, 0, 1e9, 1e9, 1e9);
    in.push_back(ghost);
    const auto out = winsorize_stock(in, {0.0, 1.0});
    EXPECT_EQ(out.back(), ghost);
    EXPECT_EQ(out[9].heat_demand_before_kwh, 10.0);
}

TEST(Winsorize, BadBoundsRejected) {
    const auto in = one_category({1, 2, 3});
    EXPECT_THROW(winsorize_stock(in, {0.5, 0.5}), ConfigError);
    EXPECT_THROW(winsorize_stock(in, {-0.1, 0.9}), ConfigError);
    EXPECT_THROW(winsorize_stock(in, {0.1, 1.1}), ConfigError);
}

class WinsorizeProperty : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(WinsorizeProperty, IdempotentCountPreservingAndOrdered) {
    auto fleet = testing_support::random_fleet(16 * 40, GetParam());
    // Heavy tails so clipping actually bites.
    std::mt19937_64 rng(GetParam());
    std::lognormal_distribution<double> tail(0.0, 1.0);
    for (auto& r : fleet.records) {
        r.heat_demand_before_kwh *= tail(rng);
        r.heat_demand_after_kwh = r.heat_demand_before_kwh * std::uniform_real_distribution<>(0.3, 1.0)(rng);
        r.floor_area_m2 *= tail(rng);
    }
    const WinsorizeOptions opts{0.05, 0.95};
    const auto once = winsorize_stock(fleet.records, opts);
    const auto twice = winsorize_stock(once, opts);
    EXPECT_EQ(once, twice);

    ASSERT_EQ(once.size(), fleet.records.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        EXPECT_EQ(once[i].key(), fleet.records[i].key());
        EXPECT_EQ(once[i].count, fleet.records[i].count);
        if (!once[i].skippable()) {
            EXPECT_LE(once[i].heat_demand_after_kwh, once[i].heat_demand_before_kwh);
            EXPECT_GT(once[i].heat_demand_after_kwh, 0.0);
        }
    }

    // Per category, min and max of a clipped field equal the oracle bounds.
    for (const auto& cat : all_categories()) {
        std::vector<double> raw, clipped;
        for (std::size_t i = 0; i < once.size(); ++i) {
            if (fleet.records[i].category == cat && !fleet.records[i].skippable()) {
                raw.push_back(fleet.records[i].floor_area_m2);
                clipped.push_back(once[i].floor_area_m2);
            }
        }
        if (raw.size() < 2) continue;
        const double lo = oracle::percentile(raw, 0.05, true);
        const double hi = oracle::percentile(raw, 0.95, true);
        EXPECT_EQ(*std::min_element(clipped.begin(), clipped.end()), lo);
        EXPECT_EQ(*std::max_element(clipped.begin(), clipped.end()), hi);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, WinsorizeProperty, ::testing::Values(1u, 2u, 3u, 4u, 5u));

TEST(Winsorize, LinearInterpolationIsNotIdempotent) {
    std::vector<double> demands;
    for (int i = 1; i <= 100; ++i) demands.push_back(i);
    const WinsorizeOptions linear{0.01, 0.99, PercentileMethod::Linear};
    const auto once = winsorize_stock(one_category(demands), linear);
    const auto twice = winsorize_stock(once, linear);
    EXPECT_EQ(once.front().heat_demand_before_kwh, 1.99);
    EXPECT_NE(twice.front().heat_demand_before_kwh, once.front().heat_demand_before_kwh);
}
