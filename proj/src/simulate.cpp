#include "staged/simulate.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace staged {
namespace {

constexpr long long kStepGuard = 500'000'000;

struct Recorder {
    std::vector<SimSample> samples;
    std::vector<bool> pinned;

    void add(const SimSample& s, bool pin = false) {
        samples.push_back(s);
        pinned.push_back(pin);
    }

    // Thin unpinned samples so the trace stays below kMaxTraceSamples.
    std::vector<SimSample> finish() && {
        if (samples.size() <= kMaxTraceSamples) {
            return std::move(samples);
        }
        pinned.front() = true;
        pinned.back() = true;
        std::size_t n_pinned = 0;
        for (bool p : pinned) {
            n_pinned += p ? 1 : 0;
        }
        const std::size_t free_budget = kMaxTraceSamples > n_pinned ? kMaxTraceSamples - n_pinned : 1;
        const std::size_t n_free = samples.size() - n_pinned;
        const std::size_t stride = (n_free + free_budget - 1) / free_budget + 1;

        std::vector<SimSample> out;
        out.reserve(kMaxTraceSamples);
        std::size_t free_index = 0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (pinned[i]) {
                out.push_back(samples[i]);
            } else if (free_index++ % stride == 0) {
                out.push_back(samples[i]);
            }
        }
        return out;
    }
};

void require_mode(const SimConfig& config, SimMode expected, const char* name) {
    config.validate();
    if (config.mode != expected) {
        throw DomainError(std::string("simulation config mode does not match ") + name);
    }
}

void guard_steps(long long steps) {
    if (steps > kStepGuard) {
        throw DomainError("simulation exceeded " + std::to_string(kStepGuard) + " steps; increase the time step");
    }
}

// Fixed-step RK4 on an autonomous scalar ODE for the remaining fuel mass, stopping
// where the fuel crosses zero (linear interpolation inside the crossing step).
SimTrace integrate_fuel(double fuel_mass_kg, double dry_mass_kg, double dt,
                        const std::function<double(double)>& rate,
                        const std::function<double(double)>& load) {
    Recorder rec;
    SimTrace trace;
    double fuel = fuel_mass_kg;
    double t = 0.0;
    rec.add({0.0, dry_mass_kg + fuel, load(fuel), fuel}, true);
    if (fuel == 0.0) {
        trace.samples = std::move(rec).finish();
        return trace;
    }

    long long k = 0;
    while (true) {
        const double k1 = rate(fuel);
        const double k2 = rate(fuel + 0.5 * dt * k1);
        const double k3 = rate(fuel + 0.5 * dt * k2);
        const double k4 = rate(fuel + dt * k3);
        const double next = fuel + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++k;
        guard_steps(k);
        if (next <= 0.0) {
            t += dt * fuel / (fuel - next);
            rec.add({t, dry_mass_kg, load(0.0), 0.0}, true);
            break;
        }
        fuel = next;
        t = static_cast<double>(k) * dt;
        rec.add({t, dry_mass_kg + fuel, load(fuel), fuel});
    }
    trace.termination_time = t;
    trace.steps = k;
    trace.samples = std::move(rec).finish();
    return trace;
}

}  // namespace

void SimConfig::validate() const {
    if (!(time_step > 0.0) || time_step > 1.0 || !std::isfinite(time_step)) {
        throw DomainError("time step must lie in (0, 1] s, got " + std::to_string(time_step));
    }
}

SimTrace simulate_discrete(const EnergySource& source, const VehicleParams& vehicle, const StagePlan& plan,
                           const SimConfig& config) {
    require_mode(config, SimMode::DiscreteStages, "discrete staging");
    const double dt = config.time_step;
    const auto masses = plan.masses();
    const double e_b = source.specific_energy();

    double mass = vehicle.dry_mass_kg() + plan.total_mass();
    double energy_left = e_b * plan.total_mass();

    Recorder rec;
    SimTrace trace;
    double t = 0.0;
    rec.add({0.0, mass, hover_power(mass, vehicle), energy_left}, true);

    for (std::size_t i = 0; i < masses.size(); ++i) {
        const double power = hover_power(mass, vehicle);
        const double stage_energy = e_b * masses[i];
        double later = 0.0;
        for (std::size_t j = i + 1; j < masses.size(); ++j) {
            later += masses[j];
        }
        const double rest = e_b * later;
        const double t_start = t;
        double in_stage = stage_energy;
        long long k = 0;
        while (true) {
            const double drained = power * dt;
            if (in_stage - drained <= 0.0) {
                t = t_start + static_cast<double>(k) * dt + dt * (in_stage / drained);
                ++k;
                break;
            }
            in_stage -= drained;
            ++k;
            guard_steps(trace.steps + k);
            t = t_start + static_cast<double>(k) * dt;
            rec.add({t, mass, power, rest + in_stage});
        }
        trace.steps += k;
        energy_left = rest;
        rec.add({t, mass, power, energy_left}, true);

        // eject the depleted stage
        mass -= masses[i];
        const bool last = i + 1 == masses.size();
        if (last) {
            mass = vehicle.dry_mass_kg();
        }
        rec.add({t, mass, last ? 0.0 : hover_power(mass, vehicle), energy_left}, true);
        trace.event_times.push_back(t);
    }
    trace.termination_time = t;
    trace.samples = std::move(rec).finish();
    return trace;
}

SimTrace simulate_ic(const EnergySource& source, const VehicleParams& vehicle, double fuel_mass_kg,
                     const SimConfig& config) {
    require_mode(config, SimMode::IcContinuous, "internal-combustion continuous staging");
    if (!(fuel_mass_kg >= 0.0)) {
        throw DomainError("fuel mass must be non-negative");
    }
    const double dry = vehicle.dry_mass_kg();
    const double burn = vehicle.power_coeff_cp() * std::pow(vehicle.gravity(), 1.5) / (2.0 * source.specific_energy());
    return integrate_fuel(
        fuel_mass_kg, dry, config.time_step, [&](double fuel) { return -burn * std::pow(dry + fuel, 1.5); },
        [&](double fuel) { return hover_power(dry + fuel, vehicle); });
}

SimTrace simulate_rocket(const RocketParams& rocket, double dry_mass_kg, double fuel_mass_kg,
                         const SimConfig& config) {
    require_mode(config, SimMode::Rocket, "rocket");
    if (!(dry_mass_kg > 0.0)) {
        throw DomainError("dry mass must be strictly positive");
    }
    if (!(fuel_mass_kg >= 0.0)) {
        throw DomainError("fuel mass must be non-negative");
    }
    const double g = rocket.gravity();
    const double ve = rocket.exhaust_velocity();
    return integrate_fuel(
        fuel_mass_kg, dry_mass_kg, config.time_step,
        [&](double fuel) { return -g * (dry_mass_kg + fuel) / (4.0 * ve); },
        [&](double fuel) { return g * (dry_mass_kg + fuel); });
}

}  // namespace staged
