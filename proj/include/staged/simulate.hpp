#pragma once

// Fixed-step time integration of hover missions. Used as an independent check
// of the closed-form flight times in model.hpp.

#include <vector>

#include "staged/model.hpp"

namespace staged {

enum class SimMode { DiscreteStages, IcContinuous, Rocket };

struct SimConfig {
    double time_step;
    SimMode mode;

    /// Throws DomainError unless 0 < time_step <= 1 s.
    void validate() const;
};

struct SimSample {
    double time_s;
    double mass_kg;
    /// Electrical power [W] for rotor modes, total thrust [N] for rocket mode.
    double power_or_thrust;
    /// Remaining energy on board [J] in discrete mode, remaining fuel [kg] otherwise.
    double remaining;
};

struct SimTrace {
    std::vector<SimSample> samples;
    /// Stage depletion times in discrete mode (the last one equals termination_time).
    std::vector<double> event_times;
    double termination_time = 0.0;
    long long steps = 0;
};

inline constexpr std::size_t kMaxTraceSamples = 10000;

SimTrace simulate_discrete(const EnergySource& source, const VehicleParams& vehicle, const StagePlan& plan,
                           const SimConfig& config);

/// Integrates dm_E/dt = -(c_p g^(3/2) / (2 e_b)) (m_d + m_E)^(3/2) with classical RK4.
SimTrace simulate_ic(const EnergySource& source, const VehicleParams& vehicle, double fuel_mass_kg,
                     const SimConfig& config);

/// Integrates the four-engine hover balance 4 dm_f/dt v_e = -g (m_d + m_f) with classical RK4.
SimTrace simulate_rocket(const RocketParams& rocket, double dry_mass_kg, double fuel_mass_kg,
                         const SimConfig& config);

}  // namespace staged
