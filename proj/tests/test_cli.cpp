#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "staged/cli.hpp"
#include "staged/units.hpp"

namespace {

const std::string kHeavyConfig = std::string(STAGED_SOURCE_DIR) + "/configs/quadcopter_heavy.ini";
const std::string kMixedConfig = std::string(STAGED_SOURCE_DIR) + "/configs/quadcopter_mixed.ini";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "staged_endurance");
    std::ostringstream out;
    std::ostringstream err;
    const int code = staged::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

Run ok(std::vector<std::string> args) {
    auto r = cli(std::move(args));
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    return r;
}

double seconds_on_line(const std::string& text, const std::string& label) {
    const std::regex re(label + ": ([-+0-9.eE]+) s");
    std::smatch m;
    REQUIRE(std::regex_search(text, m, re));
    return std::stod(m[1]);
}

}  // namespace

TEST_CASE("flight-time") {
    SUBCASE("explicit stage list") {
        const auto r = ok({"flight-time", "--config", kMixedConfig, "--stages", "190g,135g"});
        CHECK(r.out.find("(19.27 min)") != std::string::npos);
        const auto j = nlohmann::json::parse(
            ok({"flight-time", "--config", kMixedConfig, "--stages", "190g,135g", "--json"}).out);
        CHECK(j["total_minutes"].get<double>() == doctest::Approx(19.3).epsilon(0.05 / 19.3));
        // human and JSON report the same seconds
        CHECK(seconds_on_line(r.out, "total") == j["total_seconds"].get<double>());
    }

    SUBCASE("equal split") {
        const auto j =
            nlohmann::json::parse(ok({"flight-time", "--config", kHeavyConfig, "--stages", "1", "--total-mass", "380g", "--json"}).out);
        CHECK(j["total_minutes"].get<double>() == doctest::Approx(19.1).epsilon(0.05 / 19.1));
        const auto zero = ok({"flight-time", "--config", kHeavyConfig, "--stages", "1", "--total-mass", "0g"});
        CHECK(seconds_on_line(zero.out, "total") == 0.0);
    }

    SUBCASE("overrides on top of the config") {
        const auto j = nlohmann::json::parse(ok({"flight-time", "--config", kHeavyConfig, "--specific-energy", "120Wh/kg",
                                                 "--stages", "135g,190g", "--json"})
                                                 .out);
        CHECK(j["total_minutes"].get<double>() == doctest::Approx(19.0).epsilon(0.05 / 19.0));
    }

    SUBCASE("config from the environment") {
        ::setenv(staged::cli::kConfigEnvVar, kHeavyConfig.c_str(), 1);
        const auto r = ok({"flight-time", "--stages", "2", "--total-mass", "380g"});
        ::unsetenv(staged::cli::kConfigEnvVar);
        CHECK(r.out.find("(22.76 min)") != std::string::npos);
    }

    SUBCASE("error exit codes") {
        CHECK(cli({"flight-time", "--config", kHeavyConfig, "--stages", "190lb"}).code == 2);
        CHECK(cli({"flight-time", "--config", kHeavyConfig, "--stages", "2"}).code == 2);
        CHECK(cli({"flight-time", "--config", "/missing.ini", "--stages", "190g"}).code == 2);
        CHECK(cli({"flight-time", "--config", kHeavyConfig, "--stages", "0", "--total-mass", "380g"}).code == 3);
        CHECK(cli({"flight-time", "--config", kHeavyConfig, "--stages", "-190g"}).code == 3);
        CHECK(cli({"no-such-command"}).code == 2);
    }

    SUBCASE("malformed config names the key") {
        const std::string path = std::string(STAGED_TEST_TMPDIR) + "/bad.ini";
        std::ofstream(path) << "dry_mass = 595 pounds\nspecific_energy = 130 Wh/kg\nflight_coeff_cT = 6.2e-3\n";
        const auto r = cli({"flight-time", "--config", path, "--stages", "190g"});
        CHECK(r.code == 2);
        CHECK(r.err.find("dry_mass") != std::string::npos);
        CHECK(r.out.empty());
    }
}

TEST_CASE("optimize") {
    const auto order = ok({"optimize", "order", "--config", kMixedConfig, "--stages", "135g,190g"});
    CHECK(order.out.find("order: 190g,135g") != std::string::npos);

    const auto single = nlohmann::json::parse(
        ok({"optimize", "partition", "--config", kHeavyConfig, "--stages", "1", "--total-mass", "380g", "--json"}).out);
    REQUIRE(single["stage_masses_kg"].size() == 1);
    CHECK(single["stage_masses_kg"][0].get<double>() == doctest::Approx(0.380));

    const auto two = nlohmann::json::parse(
        ok({"optimize", "partition", "--config", kHeavyConfig, "--stages", "2", "--total-mass", "380g", "--json"}).out);
    // interior boundary from the 1e-6 kg grid oracle: 0.75524 kg
    CHECK(two["boundary_masses_kg"][1].get<double>() == doctest::Approx(0.75524).epsilon(2e-6));
    CHECK(two["kkt_residual"].get<double>() <= 1e-12);
    CHECK(two["total_seconds"].get<double>() > two["equal_split_seconds"].get<double>());

    CHECK(cli({"optimize", "partition", "--config", kHeavyConfig, "--stages", "190g", "--total-mass", "380g"}).code == 2);
}

TEST_CASE("sweep") {
    const auto csv = ok({"sweep", "--stages", "1", "--points", "301", "--no-optimal", "--no-continuous"}).out;
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "phi,stages,kind,normalized_time");
    double best = 0.0;
    double best_phi = 0.0;
    while (std::getline(lines, line)) {
        const auto c1 = line.find(',');
        const auto c3 = line.rfind(',');
        const double phi = std::stod(line.substr(0, c1));
        const double value = std::stod(line.substr(c3 + 1));
        if (value > best) {
            best = value;
            best_phi = phi;
        }
    }
    CHECK(best_phi == doctest::Approx(2.0 / 3.0).epsilon(0.005));

    const auto j = nlohmann::json::parse(ok({"sweep", "--stages", "2,3", "--points", "64", "--gains", "--json"}).out);
    REQUIRE(j["gains"].size() == 2);
    CHECK(j["gains"][0]["gain_percent"].get<double>() == doctest::Approx(10.5).epsilon(0.3 / 10.5));
    CHECK(j["sweep"].is_array());

    const std::string path = std::string(STAGED_TEST_TMPDIR) + "/sweep.csv";
    const auto wrote = ok({"sweep", "--stages", "2", "--points", "16", "--out", path});
    std::ifstream in(path);
    std::getline(in, line);
    CHECK(line == "phi,stages,kind,normalized_time");

    CHECK(cli({"sweep", "--out", "/nonexistent-dir/x.csv", "--points", "8"}).code == 5);
    CHECK(cli({"sweep", "--stages", "1", "--gains", "--points", "8"}).code == 3);
    CHECK(cli({"sweep", "--phi-max", "1.0", "--points", "8"}).code == 3);
}

TEST_CASE("sweep at phi = 0.5 is monotone in N") {
    const auto j = nlohmann::json::parse(
        ok({"sweep", "--points", "3", "--phi-min", "0.25", "--phi-max", "0.75", "--no-optimal", "--json"}).out);
    std::vector<double> at_half;
    for (const auto& row : j) {
        if (row["phi"].get<double>() == 0.5 && row["kind"] == "equal") {
            at_half.push_back(row["normalized_time"].get<double>());
        }
    }
    REQUIRE(at_half.size() == 5);
    for (std::size_t i = 1; i < at_half.size(); ++i) {
        CHECK(at_half[i] > at_half[i - 1]);
    }
}

TEST_CASE("simulate") {
    const std::string trace_path = std::string(STAGED_TEST_TMPDIR) + "/trace.csv";
    const auto discrete = nlohmann::json::parse(ok({"simulate", "--config", kHeavyConfig, "--mode", "discrete",
                                                    "--stages", "2", "--total-mass", "380g", "--dt", "1", "--json",
                                                    "--out", trace_path})
                                                    .out);
    CHECK(discrete["relative_error"].get<double>() < 1e-3);
    std::ifstream in(trace_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "time_s,mass_kg,power_W_or_thrust_N,remaining_J_or_kg");

    const auto limits = nlohmann::json::parse(ok({"limits", "--config", kHeavyConfig, "--json"}).out);
    const auto ic = nlohmann::json::parse(ok({"simulate", "--config", kHeavyConfig, "--mode", "ic", "--total-mass",
                                              "1785g", "--dt", "0.1", "--json"})
                                              .out);
    CHECK(ic["simulated_seconds"].get<double>() ==
          doctest::Approx(0.5 * limits["continuous_limit_seconds"].get<double>()).epsilon(1e-4));

    const auto rocket = ok({"simulate", "--config", kHeavyConfig, "--mode", "rocket", "--total-mass", "0g"});
    CHECK(seconds_on_line(rocket.out, "simulated") == 0.0);

    CHECK(cli({"simulate", "--config", kHeavyConfig, "--mode", "ic", "--total-mass", "1g", "--dt", "2"}).code == 2);
    CHECK(cli({"simulate", "--config", kHeavyConfig, "--mode", "ic", "--total-mass", "1g", "--dt", "0"}).code == 2);
    CHECK(cli({"simulate", "--config", kMixedConfig, "--mode", "rocket", "--total-mass", "1g"}).code == 2);
}

TEST_CASE("required-mass") {
    const auto r = ok({"required-mass", "--config", kHeavyConfig, "--dry-mass", "550g", "--target", "22.8min"});
    const std::regex re("required storage mass: ([0-9.eE+-]+) g");
    std::smatch m;
    REQUIRE(std::regex_search(r.out, m, re));
    CHECK(std::stod(m[1]) == doctest::Approx(525.0).epsilon(5.0 / 525.0));

    const auto zero = nlohmann::json::parse(ok({"required-mass", "--config", kHeavyConfig, "--target", "0s", "--json"}).out);
    CHECK(zero["required_storage_kg"].get<double>() == 0.0);

    const auto unreachable = cli({"required-mass", "--config", kHeavyConfig, "--target", "1000min"});
    CHECK(unreachable.code == 3);
    CHECK(unreachable.err.find("maximum achievable") != std::string::npos);
}

TEST_CASE("limits") {
    const auto r = ok({"limits", "--config", kHeavyConfig});
    CHECK(r.out.find("(125.4 min)") != std::string::npos);
    CHECK(r.out.find("250 m/s") != std::string::npos);
}

TEST_CASE("printed quantities re-parse to the JSON values") {
    const auto human = ok({"optimize", "partition", "--config", kHeavyConfig, "--stages", "3", "--total-mass", "380g"});
    const auto j = nlohmann::json::parse(
        ok({"optimize", "partition", "--config", kHeavyConfig, "--stages", "3", "--total-mass", "380g", "--json"}).out);
    const std::regex re("stage masses: (.*)\n");
    std::smatch m;
    REQUIRE(std::regex_search(human.out, m, re));
    const auto masses = staged::parse_quantity_list(m[1].str(), staged::Dimension::Mass);
    REQUIRE(masses.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const double expected = j["stage_masses_kg"][i].get<double>();
        CHECK(std::abs(masses[i] - expected) <= 1e-9 * expected);
    }
    CHECK(seconds_on_line(human.out, "total") == j["total_seconds"].get<double>());
}
