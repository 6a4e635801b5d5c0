#include "staged/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "staged/units.hpp"

namespace staged {
namespace {

namespace pt = boost::property_tree;

double parse_entry(const std::string& key, const std::string& value, std::optional<Dimension> dimension) {
    try {
        if (!dimension) {
            // m/s^2 is the only unit gravity may carry
            std::string_view v = value;
            if (key == "gravity") {
                if (auto pos = v.find("m/s^2"); pos != std::string_view::npos) {
                    v = v.substr(0, pos);
                }
            }
            return parse_number(v);
        }
        return parse_quantity(value, *dimension);
    } catch (const UnitError& e) {
        throw ConfigError(key, fmt::format("config key '{}': {}", key, e.what()));
    }
}

void require_positive(const std::optional<double>& v, const char* key) {
    if (v && !(*v > 0.0)) {
        throw ConfigError(key, fmt::format("config key '{}' must be strictly positive, got {}", key, *v));
    }
}

VehicleConfig from_tree(const pt::ptree& tree) {
    VehicleConfig cfg;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) {
            if (key != "rocket") {
                throw ConfigError(key, fmt::format("unknown config section '[{}]'", key));
            }
            for (const auto& [sub, leaf] : node) {
                const std::string full = "rocket." + sub;
                if (sub != "exhaust_velocity") {
                    throw ConfigError(full, fmt::format("unknown config key '{}'", full));
                }
                cfg.exhaust_velocity = parse_entry(full, leaf.data(), Dimension::Velocity);
            }
            continue;
        }
        const std::string& value = node.data();
        if (key == "dry_mass") {
            cfg.dry_mass_kg = parse_entry(key, value, Dimension::Mass);
        } else if (key == "specific_energy") {
            cfg.specific_energy = parse_entry(key, value, Dimension::SpecificEnergy);
        } else if (key == "power_coeff_cp") {
            cfg.power_coeff_cp = parse_entry(key, value, std::nullopt);
        } else if (key == "flight_coeff_cT") {
            cfg.flight_coeff_cT = parse_entry(key, value, std::nullopt);
        } else if (key == "gravity") {
            cfg.gravity = parse_entry(key, value, std::nullopt);
        } else if (key == "rocket") {
            // an empty [rocket] section parses as a blank leaf
            if (!value.empty()) {
                throw ConfigError(key, "'rocket' must be a section holding exhaust_velocity");
            }
        } else {
            throw ConfigError(key, fmt::format("unknown config key '{}'", key));
        }
    }
    return cfg;
}

}  // namespace

void VehicleConfig::merge(const VehicleConfig& o) {
    auto take = [](std::optional<double>& dst, const std::optional<double>& src) {
        if (src) {
            dst = src;
        }
    };
    take(dry_mass_kg, o.dry_mass_kg);
    take(specific_energy, o.specific_energy);
    take(gravity, o.gravity);
    take(exhaust_velocity, o.exhaust_velocity);
    // a coefficient given as an override replaces both forms from the file
    if (o.power_coeff_cp || o.flight_coeff_cT) {
        power_coeff_cp = o.power_coeff_cp;
        flight_coeff_cT = o.flight_coeff_cT;
    }
}

void VehicleConfig::validate() const {
    if (!dry_mass_kg) {
        throw ConfigError("dry_mass", "config is missing 'dry_mass'");
    }
    if (!specific_energy) {
        throw ConfigError("specific_energy", "config is missing 'specific_energy'");
    }
    if (!power_coeff_cp && !flight_coeff_cT) {
        throw ConfigError("flight_coeff_cT", "config needs one of 'power_coeff_cp' or 'flight_coeff_cT'");
    }
    require_positive(dry_mass_kg, "dry_mass");
    require_positive(specific_energy, "specific_energy");
    require_positive(power_coeff_cp, "power_coeff_cp");
    require_positive(flight_coeff_cT, "flight_coeff_cT");
    require_positive(gravity, "gravity");
    require_positive(exhaust_velocity, "rocket.exhaust_velocity");
    if (power_coeff_cp && flight_coeff_cT) {
        const double implied = 2.0 / (*flight_coeff_cT * std::pow(gravity_or_default(), 1.5));
        if (std::abs(implied - *power_coeff_cp) > 1e-9 * std::abs(*power_coeff_cp)) {
            throw ConfigError("power_coeff_cp",
                              fmt::format("'power_coeff_cp' = {} disagrees with 'flight_coeff_cT' (implies {})",
                                          *power_coeff_cp, implied));
        }
    }
}

VehicleParams VehicleConfig::vehicle() const {
    validate();
    if (power_coeff_cp) {
        return VehicleParams(*dry_mass_kg, *power_coeff_cp, gravity_or_default());
    }
    return VehicleParams::from_flight_coeff(*dry_mass_kg, *flight_coeff_cT, gravity_or_default());
}

EnergySource VehicleConfig::source() const {
    validate();
    return EnergySource::from_joules_per_kg(*specific_energy);
}

std::optional<RocketParams> VehicleConfig::rocket() const {
    if (!exhaust_velocity) {
        return std::nullopt;
    }
    require_positive(exhaust_velocity, "rocket.exhaust_velocity");
    require_positive(gravity, "gravity");
    return RocketParams(*exhaust_velocity, gravity_or_default());
}

VehicleConfig parse_config(std::string_view text) {
    std::istringstream in{std::string(text)};
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("", fmt::format("config syntax error at line {}: {}", e.line(), e.message()));
    }
    return from_tree(tree);
}

VehicleConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("", fmt::format("cannot open config file '{}'", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace staged
