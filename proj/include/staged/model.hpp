#pragma once

// Hover power and flight-time model for multirotors carrying staged energy storage.
//
// Everything here is strict SI: kg, J, s, W, m/s^2. Unit conversion for humans
// lives in units.hpp and is only used at the CLI boundary.

#include <span>
#include <vector>

#include "staged/errors.hpp"

namespace staged {

inline constexpr double kStandardGravity = 9.81;
inline constexpr double kJoulesPerWattHour = 3600.0;

/**
 * @brief Vehicle constants for the actuator-disk hover model.
 *
 * The lumped power coefficient c_p maps per-rotor thrust to drawn power,
 * p_i = c_p f_i^(3/2). The flight coefficient c_T = 2 / (c_p g^(3/2)) is always
 * derived from c_p and g, never stored.
 */
class VehicleParams {
public:
    VehicleParams(double dry_mass_kg, double power_coeff_cp, double gravity = kStandardGravity);

    /// Build from an empirically measured flight coefficient c_T [kg^1.5/W].
    static VehicleParams from_flight_coeff(double dry_mass_kg, double flight_coeff_cT,
                                           double gravity = kStandardGravity);

    /**
     * @brief Build from rotor physics instead of a measured coefficient.
     *
     * Ideal actuator-disk power f^(3/2) / sqrt(2 rho A) divided by the propeller
     * figure of merit and the powertrain efficiency gives
     * c_p = 1 / (fom * eta * sqrt(2 rho A)) per rotor. The same c_p holds for the
     * four-rotor lump because each rotor carries a quarter of the weight.
     *
     * @param air_density rho [kg/m^3]
     * @param disk_area swept area of one rotor [m^2]
     * @param figure_of_merit propeller figure of merit in (0, 1]
     * @param powertrain_efficiency motor/ESC/gear efficiency in (0, 1]
     */
    static VehicleParams from_rotor_physics(double dry_mass_kg, double air_density, double disk_area,
                                            double figure_of_merit, double powertrain_efficiency,
                                            double gravity = kStandardGravity);

    double dry_mass_kg() const noexcept { return dry_mass_kg_; }
    double power_coeff_cp() const noexcept { return power_coeff_cp_; }
    double gravity() const noexcept { return gravity_; }
    double flight_coeff_cT() const noexcept;

    VehicleParams with_dry_mass(double dry_mass_kg) const;

private:
    double dry_mass_kg_;
    double power_coeff_cp_;
    double gravity_;
};

/// Usable specific energy of the storage medium, stored in J/kg.
class EnergySource {
public:
    static EnergySource from_joules_per_kg(double joules_per_kg);
    static EnergySource from_watt_hours_per_kg(double watt_hours_per_kg);

    double specific_energy() const noexcept { return joules_per_kg_; }

private:
    explicit EnergySource(double joules_per_kg);
    double joules_per_kg_;
};

/// Ordered stage masses; index 0 is depleted and ejected first.
class StagePlan {
public:
    explicit StagePlan(std::vector<double> stage_masses_kg);

    std::span<const double> masses() const noexcept { return masses_; }
    std::size_t size() const noexcept { return masses_.size(); }
    double total_mass() const noexcept;

    friend bool operator==(const StagePlan&, const StagePlan&) = default;

private:
    std::vector<double> masses_;
};

struct MissionResult {
    std::vector<double> per_stage_seconds;
    double total_seconds = 0.0;
};

/// Reaction-engine hover: thrust from expelled propellant at constant exhaust velocity.
class RocketParams {
public:
    RocketParams(double exhaust_velocity, double gravity = kStandardGravity);

    double exhaust_velocity() const noexcept { return exhaust_velocity_; }
    double gravity() const noexcept { return gravity_; }

private:
    double exhaust_velocity_;
    double gravity_;
};

/// Total hover power (W) of a symmetric quadcopter of the given mass.
double hover_power(double total_mass_kg, const VehicleParams& vehicle);

/// Hover time at constant total mass with storage_mass worth of energy on board.
double flight_time_fixed_mass(const EnergySource& source, const VehicleParams& vehicle,
                              double storage_mass_kg, double total_mass_kg);

/// Per-stage and total hover time for discrete staging in plan order.
MissionResult staged_flight_time(const EnergySource& source, const VehicleParams& vehicle,
                                 const StagePlan& plan);

/// Hover time with total_storage split into n_stages equal stages.
double equal_staged_flight_time(const EnergySource& source, const VehicleParams& vehicle,
                                double total_storage_kg, int n_stages);

/// Continuous staging: fuel burned by an engine driving rotors.
double ic_flight_time(const EnergySource& source, const VehicleParams& vehicle, double fuel_mass_kg);

/// Supremum of ic_flight_time over unlimited fuel, 2 e_b c_T / sqrt(m_d).
double ic_flight_time_limit(const EnergySource& source, const VehicleParams& vehicle);

/// Hover time on four reaction engines, (4 v_e / g) ln(1 + m_b / m_d).
double rocket_flight_time(const RocketParams& rocket, double dry_mass_kg, double fuel_mass_kg);

struct StorageOptimum {
    double storage_mass_kg;
    double flight_time_seconds;
};

/// Storage mass maximizing equal-staged flight time for n_equal_stages.
StorageOptimum max_equal_staged_flight_time(const EnergySource& source, const VehicleParams& vehicle,
                                            int n_equal_stages);

/**
 * @brief Smallest storage mass reaching target_seconds with equal staging.
 *
 * Searches the ascending branch of the flight-time curve by bisection.
 * Throws UnreachableTargetError carrying the maximum when the target is above it.
 */
double required_storage_mass(const EnergySource& source, const VehicleParams& vehicle, int n_equal_stages,
                             double target_seconds);

}  // namespace staged
