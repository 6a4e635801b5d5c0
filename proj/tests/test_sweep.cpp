#include <doctest.h>

#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "staged/errors.hpp"
#include "staged/sweep.hpp"

using namespace staged;

TEST_CASE("sweep spec") {
    const auto spec = SweepSpec::defaults();
    CHECK(spec.storage_fractions.size() == 512);
    CHECK(spec.storage_fractions.front() == 0.001);
    CHECK(spec.storage_fractions.back() == 0.999);
    CHECK(spec.stage_counts == std::vector<int>{1, 2, 3, 5, 10});

    SweepSpec bad = spec;
    bad.storage_fractions = {0.5, 1.0};
    CHECK_THROWS_AS(run_sweep(bad), DomainError);
    bad.storage_fractions = {0.0};
    CHECK_THROWS_AS(run_sweep(bad), DomainError);
    CHECK_THROWS_AS(normalized_flight_time(StagingKind::Equal, 1, 1.2), DomainError);
}

TEST_CASE("single-stage curve peaks at phi = 2/3 with value 3^(-3/2)") {
    const double phi = oracle::golden_max([](double p) { return normalized_flight_time(StagingKind::Equal, 1, p); },
                                          0.01, 0.99, 1e-10);
    CHECK(phi == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(normalized_flight_time(StagingKind::Equal, 1, 2.0 / 3.0) == doctest::Approx(std::pow(3.0, -1.5)).epsilon(1e-14));

    const auto grid = uniform_fractions(512, 0.001, 0.999);
    const auto peak = locate_peak(StagingKind::Equal, 1, grid);
    CHECK(peak.phi == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
    CHECK(peak.normalized_time == doctest::Approx(0.19245008972987526).epsilon(1e-12));
}

TEST_CASE("continuous curve tends to one") {
    CHECK(normalized_flight_time(StagingKind::Continuous, 0, 0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normalized_flight_time(StagingKind::Continuous, 0, 1.0 - 1e-12) > 0.999998);
}

TEST_CASE("sweep table invariants") {
    SweepSpec spec;
    spec.storage_fractions = uniform_fractions(64, 0.01, 0.99);
    spec.stage_counts = {1, 2, 3, 5, 10};
    const auto table = run_sweep(spec);
    CHECK(table.rows.size() == 64 * (5 * 2 + 1));

    std::map<std::tuple<int, int, double>, double> by_key;
    std::map<double, double> continuous;
    for (const auto& row : table.rows) {
        CHECK(row.normalized_time > 0.0);
        CHECK(row.normalized_time < 1.0);
        if (row.kind == StagingKind::Continuous) {
            CHECK_FALSE(row.stages.has_value());
            continuous[row.phi] = row.normalized_time;
        } else {
            by_key[{static_cast<int>(row.kind), *row.stages, row.phi}] = row.normalized_time;
        }
    }
    for (double phi : spec.storage_fractions) {
        double prev = 0.0;
        for (int n : spec.stage_counts) {
            const double eq = by_key.at({0, n, phi});
            const double opt = by_key.at({1, n, phi});
            CHECK(eq > prev);
            prev = eq;
            if (n == 1) {
                CHECK(opt == doctest::Approx(eq).epsilon(1e-14));
            } else {
                CHECK(opt > eq);
            }
            CHECK(continuous.at(phi) > opt);
        }
    }

    SUBCASE("rows sorted by kind, stages, phi") {
        for (std::size_t i = 1; i < table.rows.size(); ++i) {
            const auto& a = table.rows[i - 1];
            const auto& b = table.rows[i];
            const auto key = [](const SweepRow& r) {
                return std::tuple(static_cast<int>(r.kind), r.stages.value_or(1 << 30), r.phi);
            };
            CHECK(key(a) < key(b));
        }
    }

    SUBCASE("deterministic") {
        const auto again = run_sweep(spec);
        REQUIRE(again.rows.size() == table.rows.size());
        CHECK(sweep_to_csv(again) == sweep_to_csv(table));
    }

    SUBCASE("independent of the reference dry mass") {
        SweepSpec heavy = spec;
        heavy.reference_dry_mass = 7.0;
        const auto scaled = run_sweep(heavy);
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            CHECK(oracle::rel_diff(scaled.rows[i].normalized_time, table.rows[i].normalized_time) <= 1e-12);
        }
    }
}

TEST_CASE("gain table") {
    const std::vector<int> counts{2, 3};
    const auto gains = gain_table(counts);
    REQUIRE(gains.size() == 2);
    CHECK(gains[0].gain_percent == doctest::Approx(10.5).epsilon(0.3 / 10.5));
    CHECK(gains[1].gain_percent == doctest::Approx(16.9).epsilon(0.3 / 16.9));
    CHECK(gains[0].optimal.normalized_time > gains[0].equal.normalized_time);

    const std::vector<int> one{1};
    CHECK_THROWS_AS(gain_table(one), DomainError);
}

TEST_CASE("CSV and JSON serialization") {
    SweepSpec spec;
    spec.storage_fractions = {0.25, 0.5};
    spec.stage_counts = {2};
    spec.include_optimal = false;
    const auto table = run_sweep(spec);
    const auto csv = sweep_to_csv(table);
    CHECK(csv.rfind("phi,stages,kind,normalized_time\n", 0) == 0);
    CHECK(csv.find(",inf,continuous,") != std::string::npos);
    CHECK(csv.find("0.5,2,equal,") != std::string::npos);

    const auto j = nlohmann::json::parse(sweep_to_json(table));
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 4);
    CHECK(j[0]["kind"] == "equal");
    CHECK(j[0]["stages"] == 2);
    CHECK(j[3]["stages"].is_null());
    CHECK(j[1]["normalized_time"].get<double>() == table.rows[1].normalized_time);
}
