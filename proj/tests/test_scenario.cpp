#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "heatflex/aggregate.hpp"
#include "heatflex/errors.hpp"
#include "heatflex/scenario.hpp"
#include "heatflex/synth.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace heatflex;
using testing_support::record;

namespace {

RegionTable one_lsoa_table(const std::string& region = "Wales") {
    return RegionTable(default_regions(), {{"A1", {region, "Town"}}});
}

ScenarioSpec fixed(double indoor, double outdoor) {
    ScenarioSpec s;
    s.indoor_model = FixedIndoor{indoor};
    s.outdoor_temp_c = outdoor;
    return s;
}

double total_weighted_magnitude(const ScenarioResult& r) {
    double sum = 0.0;
    for (const auto& so : r.outcomes) sum += so.sample.weight * so.outcome.magnitude_w;
    return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// Indoor temperatures

TEST(IndoorTemps, FixedRepeats) {
    EXPECT_EQ(sample_indoor_temps(FixedIndoor{19.0}, 5), std::vector<double>(5, 19.0));
    EXPECT_TRUE(sample_indoor_temps(FixedIndoor{19.0}, 0).empty());
}

TEST(IndoorTemps, TruncatedNormalMomentsAndThreshold) {
    const auto v = sample_indoor_temps(TruncatedNormalIndoor{}, 1000000);
    double sum = 0.0;
    std::size_t below = 0;
    for (double t : v) {
        ASSERT_GE(t, 14.0);
        ASSERT_LE(t, 24.0);
        sum += t;
        below += t < 18.0;
    }
    EXPECT_NEAR(sum / v.size(), 19.0, 0.02);
    const double expected = oracle::truncated_normal_cdf(18.0, 19.0, 2.5, 14.0, 24.0);
    EXPECT_NEAR(expected, 0.3372, 5e-5);
    EXPECT_NEAR(static_cast<double>(below) / v.size(), expected, 0.005);
}

TEST(IndoorTemps, DeterministicAndRandomAccess) {
    const TruncatedNormalIndoor m{19.0, 2.5, 14.0, 24.0, 42};
    const auto a = sample_indoor_temps(m, 1000, 7);
    EXPECT_EQ(a, sample_indoor_temps(m, 1000, 7));
    for (std::size_t i : {0u, 17u, 999u}) {
        EXPECT_EQ(draw_indoor_temp(m, 7, i), a[i]);
    }
    EXPECT_NE(a, sample_indoor_temps(m, 1000, 8));
    TruncatedNormalIndoor other = m;
    other.seed = 43;
    EXPECT_NE(a, sample_indoor_temps(other, 1000, 7));
}

TEST(IndoorTemps, UpperTailIntervalStaysInsideBounds) {
    // Entire support far in the upper tail.
    const auto v = sample_indoor_temps(TruncatedNormalIndoor{0.0, 1.0, 9.0, 9.5, 1}, 10000);
    for (double t : v) {
        ASSERT_GE(t, 9.0);
        ASSERT_LE(t, 9.5);
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    EXPECT_LT(mean, 9.2);  // mass piles up near the lower edge
}

TEST(IndoorTemps, InvalidParametersRejected) {
    EXPECT_THROW(sample_indoor_temps(TruncatedNormalIndoor{19.0, 0.0, 14.0, 24.0, 0}, 3), ConfigError);
    EXPECT_THROW(sample_indoor_temps(TruncatedNormalIndoor{19.0, 2.5, 24.0, 14.0, 0}, 3), ConfigError);
    EXPECT_THROW(sample_indoor_temps(FixedIndoor{std::nan("")}, 3), ConfigError);
}

// ---------------------------------------------------------------------------
// build_samples

TEST(BuildSamples, FixedOneSamplePerRecord) {
    const std::vector<DwellingRecord> recs{
        record("A1", DwellingForm::Flat, HeatingSystem::GasBoiler, 100, 9000, 8000, 60)};
    const RegionTable regions = one_lsoa_table();
    const ParamsMap params = derive_all(recs, regions, CapacityLevel::Medium, StockVariant::BeforeEE);
    ScenarioSpec spec = fixed(19.0, 5.0);
    spec.uptake_fraction = 0.5;
    const auto samples = build_samples(recs, params, spec);
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_EQ(samples[0].weight, 50.0);
    EXPECT_EQ(samples[0].indoor_temp_c, 19.0);
    EXPECT_EQ(samples[0].params, params.at(recs[0].key()));
}

TEST(BuildSamples, TruncatedNormalExpandsRecords) {
    const std::vector<DwellingRecord> recs{
        record("A1", DwellingForm::Flat, HeatingSystem::GasBoiler, 100, 9000, 8000, 60)};
    const RegionTable regions = one_lsoa_table();
    const ParamsMap params = derive_all(recs, regions, CapacityLevel::Medium, StockVariant::BeforeEE);
    ScenarioSpec spec;
    spec.indoor_model = TruncatedNormalIndoor{};
    const auto samples = build_samples(recs, params, spec);
    ASSERT_EQ(samples.size(), 10u);
    for (const auto& s : samples) {
        EXPECT_EQ(s.weight, 10.0);
        EXPECT_GE(s.indoor_temp_c, 14.0);
        EXPECT_LE(s.indoor_temp_c, 24.0);
    }
}

TEST(BuildSamples, EmptyAndMissingParams) {
    EXPECT_TRUE(build_samples({}, {}, ScenarioSpec{}).empty());
    const std::vector<DwellingRecord> recs{
        record("A1", DwellingForm::Flat, HeatingSystem::GasBoiler, 1, 9000, 8000, 60)};
    EXPECT_THROW(build_samples(recs, {}, ScenarioSpec{}), MissingParamsError);
}

TEST(ScenarioSpec, ValidationRules) {
    ScenarioSpec s;
    s.uptake_fraction = 1.5;
    EXPECT_THROW(s.validate(), ConfigError);
    s.uptake_fraction = 0.3;
    s.subsamples = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s.subsamples = 4;
    EXPECT_NO_THROW(s.validate());
}

// ---------------------------------------------------------------------------
// Config files

TEST(ScenarioConfig, RoundTrip) {
    ScenarioSpec s;
    s.outdoor_temp_c = -5.0;
    s.indoor_model = TruncatedNormalIndoor{19.5, 2.0, 15.0, 23.0, 99};
    s.stock_variant = StockVariant::AfterEE;
    s.capacity_level = CapacityLevel::MediumMinus10;
    s.uptake_fraction = 0.28;
    s.subsamples = 25;
    s.comfort_band = {17.5, 23.5};
    s.cop_curve = CopCurve({{-10.0, 1.8}, {0.1, 2.25}, {12.0, 3.1}});
    std::stringstream ss;
    write_scenario(ss, s);
    EXPECT_EQ(read_scenario(ss), s);

    std::stringstream fx;
    write_scenario(fx, fixed(20.0, 10.0));
    EXPECT_EQ(read_scenario(fx), fixed(20.0, 10.0));
}

TEST(ScenarioConfig, DefaultsAndRejections) {
    std::istringstream empty("");
    EXPECT_EQ(read_scenario(empty), ScenarioSpec{});

    const auto reject = [](const std::string& text) {
        std::istringstream in(text);
        EXPECT_THROW(read_scenario(in), ConfigError) << text;
    };
    reject("[scenario]\noutdoor_temp = 5\n");
    reject("[weather]\noutdoor_temp_c = 5\n");
    reject("[scenario]\noutdoor_temp_c = warm\n");
    reject("[scenario]\nuptake_fraction = 2\n");
    reject("[indoor]\nmodel = fixed\nsd_c = 2\n");
    reject("[indoor]\nmodel = truncated_normal\ntemp_c = 19\n");
    reject("[indoor]\nmodel = uniform\n");
    reject("[cop]\npoints = 0:2.3, -5:2.0\n");
    reject("[comfort]\nlow_c = 24\nhigh_c = 18\n");
}

// ---------------------------------------------------------------------------
// run_scenario

TEST(RunScenario, PerRegionClampAtMinusFive) {
    // Indoor 19, outdoor -5: IQ / MQ = 24 / (21 - design), clamped at 1.
    std::map<std::string, LsoaLocation> lookup;
    std::vector<DwellingRecord> recs;
    for (const auto& region : default_regions()) {
        const std::string id = "L-" + region.name;
        lookup[id] = {region.name, region.name};
        recs.push_back(record(id, DwellingForm::Detached, HeatingSystem::GasBoiler, 1, 12000, 9000, 100));
    }
    const RegionTable regions(default_regions(), lookup);
    const ScenarioResult r = simulate(recs, regions, fixed(19.0, -5.0), Direction::Positive);
    ASSERT_EQ(r.outcomes.size(), recs.size());
    for (const auto& so : r.outcomes) {
        const double design = regions.region_of(so.sample.lsoa_id).design_temp_c;
        const double mq = 1000.0 * so.sample.params.hp_size_kw;
        const double ratio = std::min(24.0 / (21.0 - design), 1.0);
        EXPECT_NEAR(so.outcome.magnitude_w, (mq - ratio * mq) / 2.0, 1e-9 * mq) << so.sample.lsoa_id;
        if (design == -1.0) {
            EXPECT_EQ(so.outcome.magnitude_w, 0.0);
        }
        if (design == -5.0) {
            EXPECT_GT(so.outcome.magnitude_w, 0.0);
        }
    }
}

TEST(RunScenario, ParallelEqualsSerial) {
    const auto fleet = testing_support::random_fleet(16 * 60, 5);
    ScenarioSpec spec;
    spec.indoor_model = TruncatedNormalIndoor{19.0, 2.5, 14.0, 24.0, 11};
    for (auto dir : {Direction::Positive, Direction::Negative}) {
        const auto serial = simulate(fleet.records, fleet.regions, spec, dir, 1);
        for (std::size_t threads : {2u, 3u, 8u, 64u}) {
            EXPECT_EQ(simulate(fleet.records, fleet.regions, spec, dir, threads), serial);
        }
    }
}

TEST(RunScenario, BadSamplesCollectedNotFatal) {
    const std::vector<DwellingRecord> recs{
        record("A1", DwellingForm::Flat, HeatingSystem::GasBoiler, 4, 9000, 8000, 60),
        record("A1", DwellingForm::Flat, HeatingSystem::OilBoiler, 4, 9000, 8000, 60)};
    const RegionTable regions = one_lsoa_table();
    const ParamsMap params = derive_all(recs, regions, CapacityLevel::Medium, StockVariant::BeforeEE);
    auto samples = build_samples(recs, params, fixed(19.0, 5.0));
    samples[1].indoor_temp_c = 75.0;
    for (std::size_t threads : {1u, 2u}) {
        const ScenarioResult r = run_scenario(samples, fixed(19.0, 5.0), Direction::Negative, threads);
        ASSERT_EQ(r.outcomes.size(), 1u);
        ASSERT_EQ(r.errors.size(), 1u);
        EXPECT_EQ(r.errors[0].sample_index, 1u);
        EXPECT_EQ(r.errors[0].lsoa_id, "A1");
        EXPECT_EQ(r.errors[0].category.heating, HeatingSystem::OilBoiler);
    }
}

TEST(RunScenario, UptakeZeroAndLinearity) {
    const auto fleet = testing_support::random_fleet(16 * 20, 8);
    ScenarioSpec spec = fixed(19.0, 0.0);
    const double full = total_weighted_magnitude(simulate(fleet.records, fleet.regions, spec, Direction::Negative));
    ASSERT_LT(full, 0.0);
    for (double f : {0.0, 0.28, 0.5, 0.8}) {
        spec.uptake_fraction = f;
        const double part = total_weighted_magnitude(simulate(fleet.records, fleet.regions, spec, Direction::Negative));
        EXPECT_NEAR(part, f * full, 1e-9 * std::abs(full));
    }
}

TEST(RunScenario, FixedModelIgnoresSubsampleFactor) {
    const auto fleet = testing_support::random_fleet(16 * 10, 3);
    ScenarioSpec a = fixed(19.5, 2.0);
    ScenarioSpec b = a;
    b.subsamples = 37;
    const auto ra = simulate(fleet.records, fleet.regions, a, Direction::Negative);
    const auto rb = simulate(fleet.records, fleet.regions, b, Direction::Negative);
    EXPECT_EQ(ra, rb);

    // A fleet expanded by hand into k copies of weight count / k gives the same aggregates.
    const std::size_t k = 7;
    std::vector<SampleOutcome> expanded;
    for (const auto& so : ra.outcomes) {
        for (std::size_t j = 0; j < k; ++j) {
            SampleOutcome copy = so;
            copy.sample.weight = so.sample.weight / static_cast<double>(k);
            expanded.push_back(copy);
        }
    }
    const Envelope e1 = build_envelope(ra.outcomes);
    const Envelope e2 = build_envelope(expanded);
    ASSERT_EQ(e1.breakpoints.size(), e2.breakpoints.size());
    for (std::size_t i = 0; i < e1.breakpoints.size(); ++i) {
        EXPECT_NEAR(e2.breakpoints[i].power_w, e1.breakpoints[i].power_w, 1e-9 * e1.breakpoints[i].power_w);
    }
}

TEST(RunScenario, SeedsAgreeOnExpectation) {
    // The spread shrinks with records * subsamples, not with dwellings; ~50k records is
    // needed for it to fall under 1% at the default 10 subsamples.
    SynthOptions o;
    o.dwellings = 2000000;
    o.seed = 4;
    const SynthStock stock = synthesize_stock(o);
    const RegionTable regions(default_regions(), stock.lookup);
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ScenarioSpec spec;
        spec.indoor_model = TruncatedNormalIndoor{19.0, 2.5, 14.0, 24.0, seed};
        const double m = total_weighted_magnitude(simulate(stock.records, regions, spec, Direction::Negative, 4));
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    EXPECT_LT((hi - lo) / std::abs(hi), 0.01);
}

// ---------------------------------------------------------------------------
// Retrofit and capacity sweeps

TEST(Retrofit, MagnitudesShrinkDurationsGrow) {
    const auto fleet = testing_support::random_fleet(16 * 40, 6);
    for (double outdoor : {-5.0, 0.0, 5.0, 10.0}) {
        ScenarioSpec spec;
        spec.outdoor_temp_c = outdoor;
        spec.indoor_model = TruncatedNormalIndoor{19.0, 2.5, 14.0, 24.0, 1};
        const auto cmp = retrofit_comparison(fleet.records, fleet.regions, spec, Direction::Negative);
        ASSERT_EQ(cmp.before.outcomes.size(), cmp.after.outcomes.size());
        for (std::size_t i = 0; i < cmp.before.outcomes.size(); ++i) {
            const auto& b = cmp.before.outcomes[i];
            const auto& a = cmp.after.outcomes[i];
            ASSERT_EQ(a.sample.indoor_temp_c, b.sample.indoor_temp_c);
            EXPECT_LE(std::abs(a.outcome.magnitude_w), std::abs(b.outcome.magnitude_w));
            if (b.outcome.duration.is_finite() && a.outcome.duration.is_finite()) {
                EXPECT_GE(a.outcome.duration.seconds(), b.outcome.duration.seconds());
            }
            if (b.outcome.duration.is_unbounded()) {
                EXPECT_TRUE(a.outcome.duration.is_unbounded());
            }
        }
    }
}

TEST(Retrofit, NoOpRetrofitIsIdentical) {
    auto fleet = testing_support::random_fleet(16 * 10, 7);
    for (auto& r : fleet.records) r.heat_demand_after_kwh = r.heat_demand_before_kwh;
    const auto cmp = retrofit_comparison(fleet.records, fleet.regions, ScenarioSpec{}, Direction::Positive);
    EXPECT_EQ(cmp.before, cmp.after);
}

TEST(CapacitySweep, DurationsScaleMagnitudesFixed) {
    const auto fleet = testing_support::random_fleet(16 * 30, 9);
    ScenarioSpec spec;
    spec.indoor_model = TruncatedNormalIndoor{19.0, 2.5, 14.0, 24.0, 5};
    const CapacityLevel levels[] = {CapacityLevel::Medium, CapacityLevel::MediumPlus10, CapacityLevel::MediumMinus10};
    for (auto dir : {Direction::Positive, Direction::Negative}) {
        const auto sweep = capacity_sweep(fleet.records, fleet.regions, spec, levels, dir);
        ASSERT_EQ(sweep.size(), 3u);
        const auto& base = sweep[0].second;
        for (std::size_t l = 1; l < 3; ++l) {
            const double ratio = l == 1 ? 1.1 : 0.9;
            const auto& other = sweep[l].second;
            ASSERT_EQ(other.outcomes.size(), base.outcomes.size());
            for (std::size_t i = 0; i < base.outcomes.size(); ++i) {
                const auto& b = base.outcomes[i].outcome;
                const auto& o = other.outcomes[i].outcome;
                EXPECT_EQ(o.magnitude_w, b.magnitude_w);
                ASSERT_EQ(o.duration.kind(), b.duration.kind());
                if (b.duration.is_finite()) {
                    EXPECT_NEAR(o.duration.seconds() / b.duration.seconds(), ratio, 1e-12);
                }
            }
        }
    }
    const CapacityLevel medium[] = {CapacityLevel::Medium};
    EXPECT_EQ(capacity_sweep(fleet.records, fleet.regions, spec, medium, Direction::Negative)[0].second,
              simulate(fleet.records, fleet.regions, spec, Direction::Negative));
    EXPECT_THROW(capacity_sweep(fleet.records, fleet.regions, spec, {}, Direction::Negative), ConfigError);
}
