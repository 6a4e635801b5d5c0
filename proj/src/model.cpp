#include "staged/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace staged {
namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be finite and strictly positive, got " +
                          std::to_string(value));
    }
}

void require_non_negative(double value, const char* name) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be finite and non-negative, got " +
                          std::to_string(value));
    }
}

void require_stage_count(int n_stages) {
    if (n_stages < 1) {
        throw DomainError("stage count must be at least 1, got " + std::to_string(n_stages));
    }
}

// sum_{i=1..N} (m_d + (i/N) m_b)^(-3/2), accumulated in stage order
double equal_sum(double dry_mass, double storage, int n_stages) {
    const double n = static_cast<double>(n_stages);
    double sum = 0.0;
    for (int i = 1; i <= n_stages; ++i) {
        sum += std::pow(dry_mass + (static_cast<double>(i) / n) * storage, -1.5);
    }
    return sum;
}

}  // namespace

VehicleParams::VehicleParams(double dry_mass_kg, double power_coeff_cp, double gravity)
    : dry_mass_kg_(dry_mass_kg), power_coeff_cp_(power_coeff_cp), gravity_(gravity) {
    require_positive(dry_mass_kg, "dry mass");
    require_positive(power_coeff_cp, "power coefficient c_p");
    require_positive(gravity, "gravity");
}

VehicleParams VehicleParams::from_flight_coeff(double dry_mass_kg, double flight_coeff_cT, double gravity) {
    require_positive(flight_coeff_cT, "flight coefficient c_T");
    require_positive(gravity, "gravity");
    return VehicleParams(dry_mass_kg, 2.0 / (flight_coeff_cT * std::pow(gravity, 1.5)), gravity);
}

VehicleParams VehicleParams::from_rotor_physics(double dry_mass_kg, double air_density, double disk_area,
                                                double figure_of_merit, double powertrain_efficiency,
                                                double gravity) {
    require_positive(air_density, "air density");
    require_positive(disk_area, "disk area");
    require_positive(figure_of_merit, "figure of merit");
    require_positive(powertrain_efficiency, "powertrain efficiency");
    if (figure_of_merit > 1.0 || powertrain_efficiency > 1.0) {
        throw DomainError("figure of merit and powertrain efficiency must not exceed 1");
    }
    const double cp = 1.0 / (figure_of_merit * powertrain_efficiency * std::sqrt(2.0 * air_density * disk_area));
    return VehicleParams(dry_mass_kg, cp, gravity);
}

double VehicleParams::flight_coeff_cT() const noexcept {
    return 2.0 / (power_coeff_cp_ * std::pow(gravity_, 1.5));
}

VehicleParams VehicleParams::with_dry_mass(double dry_mass_kg) const {
    return VehicleParams(dry_mass_kg, power_coeff_cp_, gravity_);
}

EnergySource::EnergySource(double joules_per_kg) : joules_per_kg_(joules_per_kg) {
    require_positive(joules_per_kg, "specific energy");
}

EnergySource EnergySource::from_joules_per_kg(double joules_per_kg) { return EnergySource(joules_per_kg); }

EnergySource EnergySource::from_watt_hours_per_kg(double watt_hours_per_kg) {
    require_positive(watt_hours_per_kg, "specific energy");
    return EnergySource(watt_hours_per_kg * kJoulesPerWattHour);
}

StagePlan::StagePlan(std::vector<double> stage_masses_kg) : masses_(std::move(stage_masses_kg)) {
    if (masses_.empty()) {
        throw DomainError("stage plan must contain at least one stage");
    }
    for (double m : masses_) {
        require_positive(m, "stage mass");
    }
}

double StagePlan::total_mass() const noexcept { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }

RocketParams::RocketParams(double exhaust_velocity, double gravity)
    : exhaust_velocity_(exhaust_velocity), gravity_(gravity) {
    require_positive(exhaust_velocity, "exhaust velocity");
    require_positive(gravity, "gravity");
}

double hover_power(double total_mass_kg, const VehicleParams& vehicle) {
    require_non_negative(total_mass_kg, "total mass");
    return 0.5 * vehicle.power_coeff_cp() * std::pow(vehicle.gravity(), 1.5) * std::pow(total_mass_kg, 1.5);
}

double flight_time_fixed_mass(const EnergySource& source, const VehicleParams& vehicle, double storage_mass_kg,
                              double total_mass_kg) {
    require_non_negative(storage_mass_kg, "storage mass");
    require_positive(total_mass_kg, "total mass");
    if (storage_mass_kg > total_mass_kg) {
        throw DomainError("storage mass exceeds total mass");
    }
    if (total_mass_kg < vehicle.dry_mass_kg()) {
        throw DomainError("total mass is below the vehicle dry mass");
    }
    return source.specific_energy() * vehicle.flight_coeff_cT() * storage_mass_kg * std::pow(total_mass_kg, -1.5);
}

MissionResult staged_flight_time(const EnergySource& source, const VehicleParams& vehicle, const StagePlan& plan) {
    const auto masses = plan.masses();
    const double scale = source.specific_energy() * vehicle.flight_coeff_cT();

    // carried[i] = m_d + sum_{j >= i} m_j
    std::vector<double> carried(masses.size());
    double suffix = 0.0;
    for (std::size_t i = masses.size(); i-- > 0;) {
        suffix += masses[i];
        carried[i] = vehicle.dry_mass_kg() + suffix;
    }

    MissionResult result;
    result.per_stage_seconds.reserve(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double t = scale * masses[i] * std::pow(carried[i], -1.5);
        result.per_stage_seconds.push_back(t);
        result.total_seconds += t;
    }
    return result;
}

double equal_staged_flight_time(const EnergySource& source, const VehicleParams& vehicle, double total_storage_kg,
                                int n_stages) {
    require_stage_count(n_stages);
    require_non_negative(total_storage_kg, "total storage mass");
    const double scale = source.specific_energy() * vehicle.flight_coeff_cT();
    return scale * total_storage_kg / static_cast<double>(n_stages) *
           equal_sum(vehicle.dry_mass_kg(), total_storage_kg, n_stages);
}

double ic_flight_time(const EnergySource& source, const VehicleParams& vehicle, double fuel_mass_kg) {
    require_non_negative(fuel_mass_kg, "fuel mass");
    // 1 - (1 + r)^(-1/2), written to stay accurate for small r
    const double fraction = -std::expm1(-0.5 * std::log1p(fuel_mass_kg / vehicle.dry_mass_kg()));
    return ic_flight_time_limit(source, vehicle) * fraction;
}

double ic_flight_time_limit(const EnergySource& source, const VehicleParams& vehicle) {
    return 4.0 * source.specific_energy() /
           (vehicle.power_coeff_cp() * std::pow(vehicle.gravity(), 1.5) * std::sqrt(vehicle.dry_mass_kg()));
}

double rocket_flight_time(const RocketParams& rocket, double dry_mass_kg, double fuel_mass_kg) {
    require_positive(dry_mass_kg, "dry mass");
    require_non_negative(fuel_mass_kg, "fuel mass");
    return 4.0 * rocket.exhaust_velocity() / rocket.gravity() * std::log1p(fuel_mass_kg / dry_mass_kg);
}

StorageOptimum max_equal_staged_flight_time(const EnergySource& source, const VehicleParams& vehicle,
                                            int n_equal_stages) {
    require_stage_count(n_equal_stages);
    const double dry = vehicle.dry_mass_kg();
    if (n_equal_stages == 1) {
        // dT/dm_b = 0 at m_b = 2 m_d
        const double m = 2.0 * dry;
        return {m, equal_staged_flight_time(source, vehicle, m, 1)};
    }

    auto time_at = [&](double m) { return equal_staged_flight_time(source, vehicle, m, n_equal_stages); };

    double hi = 2.0 * n_equal_stages * dry * 10.0;
    while (time_at(hi) >= time_at(0.5 * hi)) {
        hi *= 2.0;
    }

    constexpr double inv_phi = 0.6180339887498949;
    double lo = 0.0;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = time_at(a);
    double fb = time_at(b);
    while (hi - lo > 1e-12 * hi) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = time_at(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = time_at(a);
        }
    }
    const double m = 0.5 * (lo + hi);
    return {m, time_at(m)};
}

double required_storage_mass(const EnergySource& source, const VehicleParams& vehicle, int n_equal_stages,
                             double target_seconds) {
    require_stage_count(n_equal_stages);
    require_non_negative(target_seconds, "target time");
    if (target_seconds == 0.0) {
        return 0.0;
    }

    const StorageOptimum peak = max_equal_staged_flight_time(source, vehicle, n_equal_stages);
    if (target_seconds > peak.flight_time_seconds) {
        throw UnreachableTargetError("target flight time " + std::to_string(target_seconds) +
                                         " s exceeds the maximum achievable " +
                                         std::to_string(peak.flight_time_seconds) + " s with " +
                                         std::to_string(n_equal_stages) + " equal stage(s)",
                                     peak.flight_time_seconds, peak.storage_mass_kg);
    }

    double lo = 0.0;
    double hi = peak.storage_mass_kg;
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (equal_staged_flight_time(source, vehicle, mid, n_equal_stages) < target_seconds) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

}  // namespace staged
