#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "staged/config.hpp"
#include "staged/units.hpp"

using namespace staged;

namespace {

std::string fmt_agree(double cp) {
    std::ostringstream s;
    s << std::setprecision(17) << "dry_mass = 595 g\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = 6.2e-3\npower_coeff_cp = "
      << cp << "\n";
    return s.str();
}

}  // namespace

TEST_CASE("quantity parsing") {
    CHECK(parse_quantity("190g", Dimension::Mass) == doctest::Approx(0.190));
    CHECK(parse_quantity(" 0.595 kg ", Dimension::Mass) == 0.595);
    CHECK(parse_quantity("130 Wh/kg", Dimension::SpecificEnergy) == 130.0 * 3600.0);
    CHECK(parse_quantity("468000J/kg", Dimension::SpecificEnergy) == 468000.0);
    CHECK(parse_quantity("22.8min", Dimension::Time) == doctest::Approx(1368.0));
    CHECK(parse_quantity("90 s", Dimension::Time) == 90.0);
    CHECK(parse_quantity("250m/s", Dimension::Velocity) == 250.0);

    CHECK_THROWS_AS(parse_quantity("190", Dimension::Mass), UnitError);
    CHECK_THROWS_AS(parse_quantity("190lb", Dimension::Mass), UnitError);
    CHECK_THROWS_AS(parse_quantity("190 s", Dimension::Mass), UnitError);
    CHECK_THROWS_AS(parse_quantity("g", Dimension::Mass), UnitError);
    CHECK_THROWS_AS(parse_quantity("inf kg", Dimension::Mass), UnitError);

    const auto list = parse_quantity_list("190g,135g", Dimension::Mass);
    REQUIRE(list.size() == 2);
    CHECK(list[1] == doctest::Approx(0.135));
    CHECK_THROWS_AS(parse_quantity_list("190g,", Dimension::Mass), UnitError);
}

TEST_CASE("formatted quantities re-parse to the SI value") {
    std::mt19937_64 rng(1);
    const std::pair<const char*, Dimension> units[] = {
        {"g", Dimension::Mass},  {"kg", Dimension::Mass}, {"Wh/kg", Dimension::SpecificEnergy},
        {"J/kg", Dimension::SpecificEnergy}, {"min", Dimension::Time}, {"s", Dimension::Time},
        {"m/s", Dimension::Velocity}};
    for (int i = 0; i < 500; ++i) {
        const double si = oracle::log_uniform(rng, 1e-6, 1e7);
        for (const auto& [unit, dim] : units) {
            CHECK(oracle::rel_diff(parse_quantity(format_quantity(si, unit), dim), si) <= 1e-9);
        }
    }
}

TEST_CASE("config parsing") {
    const auto cfg = parse_config(
        "; heavy packs\n"
        "dry_mass = 595 g\n"
        "specific_energy = 130 Wh/kg\n"
        "flight_coeff_cT = 6.2e-3\n"
        "\n[rocket]\nexhaust_velocity = 250 m/s\n");
    CHECK(*cfg.dry_mass_kg == doctest::Approx(0.595));
    CHECK(cfg.vehicle().flight_coeff_cT() == doctest::Approx(6.2e-3).epsilon(1e-14));
    CHECK(cfg.vehicle().gravity() == 9.81);
    CHECK(cfg.source().specific_energy() == 468000.0);
    REQUIRE(cfg.rocket().has_value());
    CHECK(cfg.rocket()->exhaust_velocity() == 250.0);

    SUBCASE("c_p form and gravity units") {
        const auto c = parse_config("dry_mass = 1 kg\nspecific_energy = 1000 J/kg\npower_coeff_cp = 12.5\ngravity = 3.71 m/s^2\n");
        CHECK(c.vehicle().power_coeff_cp() == 12.5);
        CHECK(c.vehicle().gravity() == 3.71);
        CHECK_FALSE(c.rocket().has_value());
    }

    SUBCASE("both coefficients must agree") {
        const double cp = 2.0 / (6.2e-3 * std::pow(9.81, 1.5));
        const auto ok = parse_config(fmt_agree(cp));
        CHECK_NOTHROW(ok.validate());
        const auto bad = parse_config(fmt_agree(cp * (1.0 + 1e-6)));
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }

    SUBCASE("errors name the offending key") {
        auto key_of = [](const std::string& text) {
            try {
                parse_config(text).validate();
            } catch (const ConfigError& e) {
                return e.key();
            }
            return std::string("<none>");
        };
        CHECK(key_of("dry_mass = 595\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = 6.2e-3\n") == "dry_mass");
        CHECK(key_of("dry_mass = 595 g\nspecific_energy = 130 kWh/kg\nflight_coeff_cT = 6.2e-3\n") == "specific_energy");
        CHECK(key_of("dry_mass = 595 g\nspecific_energy = 130 Wh/kg\n") == "flight_coeff_cT");
        CHECK(key_of("dry_mass = 595 g\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = -1\n") == "flight_coeff_cT");
        CHECK(key_of("dry_mass = 595 g\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = 6e-3\ncolour = red\n") == "colour");
        CHECK(key_of("dry_mass = 595 g\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = 6e-3\n[rocket]\nisp = 300\n") ==
              "rocket.isp");
        CHECK(key_of("specific_energy = 130 Wh/kg\nflight_coeff_cT = 6e-3\n") == "dry_mass");
    }

    CHECK_THROWS_AS(load_config("/nonexistent/path.ini"), ConfigError);
}
