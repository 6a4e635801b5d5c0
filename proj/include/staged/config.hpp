#pragma once

// Vehicle configuration file (INI, comments on their own line starting with ; or #):
//
//   dry_mass = 595 g
//   specific_energy = 130 Wh/kg
//   flight_coeff_cT = 6.2e-3
//   gravity = 9.81
//
//   [rocket]
//   exhaust_velocity = 250 m/s
//
// dry_mass takes g | kg, specific_energy takes Wh/kg | J/kg. Exactly one of
// flight_coeff_cT [kg^1.5/W] or power_coeff_cp [W/N^1.5] is expected; both are
// accepted only when they agree to 1e-9. gravity [m/s^2] defaults to 9.81 and
// the rocket section is optional. Unknown keys and sections are rejected.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "staged/model.hpp"

namespace staged {

/// Malformed configuration. key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Raw values in SI; any field may still be missing until validated.
struct VehicleConfig {
    std::optional<double> dry_mass_kg;
    std::optional<double> specific_energy;  // J/kg
    std::optional<double> power_coeff_cp;
    std::optional<double> flight_coeff_cT;
    std::optional<double> gravity;
    std::optional<double> exhaust_velocity;

    /// Later sources override earlier ones field by field.
    void merge(const VehicleConfig& overrides);

    /// Checks presence, positivity and c_p/c_T consistency. Throws ConfigError.
    void validate() const;

    VehicleParams vehicle() const;
    EnergySource source() const;
    std::optional<RocketParams> rocket() const;
    double gravity_or_default() const { return gravity.value_or(kStandardGravity); }
};

VehicleConfig parse_config(std::string_view text);
VehicleConfig load_config(const std::string& path);

}  // namespace staged
