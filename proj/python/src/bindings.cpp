#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "staged/cli.hpp"
#include "staged/model.hpp"
#include "staged/optimize.hpp"
#include "staged/simulate.hpp"
#include "staged/sweep.hpp"

namespace py = pybind11;
using namespace staged;

namespace {

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict trace_dict(const SimTrace& trace) {
    std::vector<py::tuple> samples;
    samples.reserve(trace.samples.size());
    for (const auto& s : trace.samples) {
        samples.push_back(py::make_tuple(s.time_s, s.mass_kg, s.power_or_thrust, s.remaining));
    }
    py::dict d;
    d["termination_time"] = trace.termination_time;
    d["event_times"] = trace.event_times;
    d["steps"] = trace.steps;
    d["samples"] = samples;
    return d;
}

SimConfig sim_config(double dt, SimMode mode) { return SimConfig{dt, mode}; }

}  // namespace

PYBIND11_MODULE(_staged_endurance, m) {
    m.doc() = "Hover endurance of multirotors with staged energy storage";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RefusalError>(m, "RefusalError", PyExc_ValueError);
    py::register_exception<UnreachableTargetError>(m, "UnreachableTargetError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<double, double, double>(), py::arg("dry_mass_kg"), py::arg("power_coeff_cp"),
             py::arg("gravity") = kStandardGravity)
        .def_static("from_flight_coeff", &VehicleParams::from_flight_coeff, py::arg("dry_mass_kg"),
                    py::arg("flight_coeff_cT"), py::arg("gravity") = kStandardGravity)
        .def_static("from_rotor_physics", &VehicleParams::from_rotor_physics, py::arg("dry_mass_kg"),
                    py::arg("air_density"), py::arg("disk_area"), py::arg("figure_of_merit"),
                    py::arg("powertrain_efficiency"), py::arg("gravity") = kStandardGravity)
        .def_property_readonly("dry_mass_kg", &VehicleParams::dry_mass_kg)
        .def_property_readonly("power_coeff_cp", &VehicleParams::power_coeff_cp)
        .def_property_readonly("gravity", &VehicleParams::gravity)
        .def_property_readonly("flight_coeff_cT", &VehicleParams::flight_coeff_cT)
        .def("with_dry_mass", &VehicleParams::with_dry_mass);

    py::class_<EnergySource>(m, "EnergySource")
        .def_static("from_joules_per_kg", &EnergySource::from_joules_per_kg)
        .def_static("from_watt_hours_per_kg", &EnergySource::from_watt_hours_per_kg)
        .def_property_readonly("specific_energy", &EnergySource::specific_energy);

    py::class_<StagePlan>(m, "StagePlan")
        .def(py::init<std::vector<double>>(), py::arg("stage_masses_kg"))
        .def_property_readonly("masses", [](const StagePlan& p) { return to_vector(p.masses()); })
        .def_property_readonly("total_mass", &StagePlan::total_mass)
        .def("__len__", &StagePlan::size)
        .def("__eq__", [](const StagePlan& a, const StagePlan& b) { return a == b; });

    py::class_<RocketParams>(m, "RocketParams")
        .def(py::init<double, double>(), py::arg("exhaust_velocity"), py::arg("gravity") = kStandardGravity)
        .def_property_readonly("exhaust_velocity", &RocketParams::exhaust_velocity)
        .def_property_readonly("gravity", &RocketParams::gravity);

    py::class_<MissionResult>(m, "MissionResult")
        .def_readonly("per_stage_seconds", &MissionResult::per_stage_seconds)
        .def_readonly("total_seconds", &MissionResult::total_seconds);

    m.def("hover_power", &hover_power, py::arg("total_mass_kg"), py::arg("vehicle"));
    m.def("flight_time_fixed_mass", &flight_time_fixed_mass, py::arg("source"), py::arg("vehicle"),
          py::arg("storage_mass_kg"), py::arg("total_mass_kg"));
    m.def("staged_flight_time", &staged_flight_time, py::arg("source"), py::arg("vehicle"), py::arg("plan"));
    m.def("equal_staged_flight_time", &equal_staged_flight_time, py::arg("source"), py::arg("vehicle"),
          py::arg("total_storage_kg"), py::arg("n_stages"));
    m.def("ic_flight_time", &ic_flight_time, py::arg("source"), py::arg("vehicle"), py::arg("fuel_mass_kg"));
    m.def("ic_flight_time_limit", &ic_flight_time_limit, py::arg("source"), py::arg("vehicle"));
    m.def("rocket_flight_time", &rocket_flight_time, py::arg("rocket"), py::arg("dry_mass_kg"),
          py::arg("fuel_mass_kg"));
    m.def(
        "max_equal_staged_flight_time",
        [](const EnergySource& s, const VehicleParams& v, int n) {
            const auto opt = max_equal_staged_flight_time(s, v, n);
            return py::make_tuple(opt.storage_mass_kg, opt.flight_time_seconds);
        },
        py::arg("source"), py::arg("vehicle"), py::arg("n_stages"));
    m.def("required_storage_mass", &required_storage_mass, py::arg("source"), py::arg("vehicle"),
          py::arg("n_stages"), py::arg("target_seconds"));

    py::class_<PartitionSolution>(m, "PartitionSolution")
        .def_readonly("boundary_masses", &PartitionSolution::boundary_masses)
        .def_readonly("stage_masses", &PartitionSolution::stage_masses)
        .def_readonly("objective", &PartitionSolution::objective)
        .def_readonly("kkt_residual", &PartitionSolution::kkt_residual)
        .def_readonly("iterations", &PartitionSolution::iterations)
        .def("flight_time_seconds", &PartitionSolution::flight_time_seconds);

    m.def("optimal_order", &optimal_order, py::arg("plan"));
    m.def(
        "brute_force_best_order",
        [](const EnergySource& s, const VehicleParams& v, const StagePlan& p) {
            auto r = brute_force_best_order(s, v, p);
            return py::make_tuple(r.plan, r.flight_time_seconds);
        },
        py::arg("source"), py::arg("vehicle"), py::arg("plan"));
    m.def("optimal_partition", &optimal_partition, py::arg("vehicle"), py::arg("total_storage_kg"),
          py::arg("n_stages"));
    m.def("grid_search_partition", &grid_search_partition, py::arg("vehicle"), py::arg("total_storage_kg"),
          py::arg("n_stages"), py::arg("resolution_kg"));

    m.def(
        "simulate_discrete",
        [](const EnergySource& s, const VehicleParams& v, const StagePlan& p, double dt) {
            return trace_dict(simulate_discrete(s, v, p, sim_config(dt, SimMode::DiscreteStages)));
        },
        py::arg("source"), py::arg("vehicle"), py::arg("plan"), py::arg("time_step"));
    m.def(
        "simulate_ic",
        [](const EnergySource& s, const VehicleParams& v, double fuel, double dt) {
            return trace_dict(simulate_ic(s, v, fuel, sim_config(dt, SimMode::IcContinuous)));
        },
        py::arg("source"), py::arg("vehicle"), py::arg("fuel_mass_kg"), py::arg("time_step"));
    m.def(
        "simulate_rocket",
        [](const RocketParams& r, double dry, double fuel, double dt) {
            return trace_dict(simulate_rocket(r, dry, fuel, sim_config(dt, SimMode::Rocket)));
        },
        py::arg("rocket"), py::arg("dry_mass_kg"), py::arg("fuel_mass_kg"), py::arg("time_step"));

    m.def(
        "normalized_flight_time",
        [](const std::string& kind, int stages, double phi) {
            for (auto k : {StagingKind::Equal, StagingKind::Optimal, StagingKind::Continuous}) {
                if (to_string(k) == kind) {
                    return normalized_flight_time(k, stages, phi);
                }
            }
            throw DomainError("unknown staging kind '" + kind + "'");
        },
        py::arg("kind"), py::arg("stages"), py::arg("phi"));
    m.def(
        "sweep_csv",
        [](std::vector<double> fractions, std::vector<int> counts, bool optimal, bool continuous) {
            SweepSpec spec = SweepSpec::defaults();
            if (!fractions.empty()) {
                spec.storage_fractions = std::move(fractions);
            }
            if (!counts.empty()) {
                spec.stage_counts = std::move(counts);
            }
            spec.include_optimal = optimal;
            spec.include_continuous = continuous;
            return sweep_to_csv(run_sweep(spec));
        },
        py::arg("storage_fractions") = std::vector<double>{}, py::arg("stage_counts") = std::vector<int>{},
        py::arg("include_optimal") = true, py::arg("include_continuous") = true);
    m.def(
        "gain_table",
        [](const std::vector<int>& counts) {
            std::vector<py::dict> out;
            for (const auto& row : gain_table(counts)) {
                py::dict d;
                d["stages"] = row.stages;
                d["peak_equal"] = row.equal.normalized_time;
                d["peak_optimal"] = row.optimal.normalized_time;
                d["gain_percent"] = row.gain_percent;
                out.push_back(d);
            }
            return out;
        },
        py::arg("stage_counts"));

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "staged_endurance");
            std::ostringstream out;
            std::ostringstream err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
