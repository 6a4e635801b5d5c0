#include "staged/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <variant>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "staged/config.hpp"
#include "staged/model.hpp"
#include "staged/optimize.hpp"
#include "staged/simulate.hpp"
#include "staged/sweep.hpp"
#include "staged/units.hpp"

namespace staged::cli {
namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonOptions {
    std::string config_path;
    bool json = false;
    std::string out_path;
    std::string dry_mass;
    std::string specific_energy;
    std::optional<double> power_coeff_cp;
    std::optional<double> flight_coeff_cT;
    std::optional<double> gravity;
    std::string exhaust_velocity;
};

struct StageArg {
    std::variant<std::vector<double>, int> value;
};

std::string minutes(double seconds) { return fmt::format("{:.4g}", seconds / 60.0); }

std::string time_line(const std::string& label, double seconds) {
    return fmt::format("{}: {} s ({} min)\n", label, seconds, minutes(seconds));
}

std::string grams_list(std::span<const double> kg) {
    std::vector<std::string> parts;
    for (double m : kg) {
        parts.push_back(fmt::format("{}g", m / 1e-3));
    }
    return fmt::format("{}", fmt::join(parts, ","));
}

VehicleConfig resolve_config(const CommonOptions& opt) {
    VehicleConfig cfg;
    std::string path = opt.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) {
            path = env;
        }
    }
    if (!path.empty()) {
        cfg = load_config(path);
    }
    VehicleConfig overrides;
    try {
        if (!opt.dry_mass.empty()) {
            overrides.dry_mass_kg = parse_quantity(opt.dry_mass, Dimension::Mass);
        }
        if (!opt.specific_energy.empty()) {
            overrides.specific_energy = parse_quantity(opt.specific_energy, Dimension::SpecificEnergy);
        }
        if (!opt.exhaust_velocity.empty()) {
            overrides.exhaust_velocity = parse_quantity(opt.exhaust_velocity, Dimension::Velocity);
        }
    } catch (const UnitError& e) {
        throw UsageError(e.what());
    }
    overrides.power_coeff_cp = opt.power_coeff_cp;
    overrides.flight_coeff_cT = opt.flight_coeff_cT;
    overrides.gravity = opt.gravity;
    cfg.merge(overrides);
    cfg.validate();
    return cfg;
}

// "190g,135g" is a stage list; a bare integer is a stage count.
StageArg parse_stage_arg(const std::string& text) {
    const bool has_unit = std::any_of(text.begin(), text.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
    if (has_unit) {
        return {parse_quantity_list(text, Dimension::Mass)};
    }
    int count = 0;
    try {
        std::size_t used = 0;
        count = std::stoi(text, &used);
        if (used != text.size()) {
            throw std::invalid_argument(text);
        }
    } catch (const std::exception&) {
        throw UsageError(fmt::format("--stages expects a stage count or a mass list like 190g,135g, got '{}'", text));
    }
    return {count};
}

std::vector<int> parse_count_list(const std::string& text) {
    std::vector<int> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const std::string item(rest.substr(0, comma));
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError(fmt::format("--stages expects comma-separated stage counts, got '{}'", text));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return out;
}

double parse_mass_flag(const std::string& text, const char* flag) {
    try {
        return parse_quantity(text, Dimension::Mass);
    } catch (const UnitError& e) {
        throw UsageError(fmt::format("{}: {}", flag, e.what()));
    }
}

void emit(const CommonOptions& opt, const std::string& payload, std::ostream& out) {
    if (opt.out_path.empty()) {
        out << payload;
        return;
    }
    std::ofstream file(opt.out_path);
    if (!file) {
        throw OutputError(fmt::format("cannot open '{}' for writing", opt.out_path));
    }
    file << payload;
    file.flush();
    if (!file) {
        throw OutputError(fmt::format("failed writing '{}'", opt.out_path));
    }
}

void add_common(CLI::App& cmd, CommonOptions& opt, bool with_out) {
    cmd.add_option("--config", opt.config_path, "Vehicle config file (default: $STAGED_ENDURANCE_CONFIG)");
    cmd.add_flag("--json", opt.json, "Machine-readable output");
    if (with_out) {
        cmd.add_option("--out", opt.out_path, "Write output to this path instead of stdout");
    }
    cmd.add_option("--dry-mass", opt.dry_mass, "Override dry mass, e.g. 550g");
    cmd.add_option("--specific-energy", opt.specific_energy, "Override specific energy, e.g. 120Wh/kg");
    cmd.add_option("--cp", opt.power_coeff_cp, "Override power coefficient c_p [W/N^1.5]");
    cmd.add_option("--cT", opt.flight_coeff_cT, "Override flight coefficient c_T [kg^1.5/W]");
    cmd.add_option("--gravity", opt.gravity, "Override gravity [m/s^2]");
    cmd.add_option("--exhaust-velocity", opt.exhaust_velocity, "Override rocket exhaust velocity, e.g. 250m/s");
}

// ---- flight-time -----------------------------------------------------------

struct FlightTimeArgs {
    CommonOptions common;
    std::string stages;
    std::string total_mass;
};

void cmd_flight_time(const FlightTimeArgs& a, std::ostream& out) {
    const VehicleConfig cfg = resolve_config(a.common);
    const VehicleParams vehicle = cfg.vehicle();
    const EnergySource source = cfg.source();
    if (a.stages.empty()) {
        throw UsageError("flight-time needs --stages (mass list, or count with --total-mass)");
    }
    const StageArg stage_arg = parse_stage_arg(a.stages);

    std::vector<double> masses;
    std::vector<double> per_stage;
    double total = 0.0;
    if (const auto* list = std::get_if<std::vector<double>>(&stage_arg.value)) {
        if (!a.total_mass.empty()) {
            throw UsageError("--total-mass only applies with a stage count");
        }
        const StagePlan plan(*list);
        const MissionResult r = staged_flight_time(source, vehicle, plan);
        masses = *list;
        per_stage = r.per_stage_seconds;
        total = r.total_seconds;
    } else {
        const int n = std::get<int>(stage_arg.value);
        if (a.total_mass.empty()) {
            throw UsageError("a stage count needs --total-mass");
        }
        const double storage = parse_mass_flag(a.total_mass, "--total-mass");
        total = equal_staged_flight_time(source, vehicle, storage, n);
        masses.assign(static_cast<std::size_t>(n), storage / n);
        if (storage > 0.0) {
            per_stage = staged_flight_time(source, vehicle, StagePlan(masses)).per_stage_seconds;
        } else {
            per_stage.assign(static_cast<std::size_t>(n), 0.0);
        }
    }

    if (a.common.json) {
        json j{{"stage_masses_kg", masses},
               {"per_stage_seconds", per_stage},
               {"total_seconds", total},
               {"total_minutes", total / 60.0}};
        out << j.dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < per_stage.size(); ++i) {
        out << fmt::format("stage {} ({}): {} s ({} min)\n", i + 1, format_quantity(masses[i], "g"), per_stage[i],
                           minutes(per_stage[i]));
    }
    out << time_line("total", total);
}

// ---- optimize --------------------------------------------------------------

struct OptimizeArgs {
    CommonOptions common;
    std::string stages;
    std::string total_mass;
};

void cmd_optimize_order(const OptimizeArgs& a, std::ostream& out) {
    const VehicleConfig cfg = resolve_config(a.common);
    const StageArg stage_arg = parse_stage_arg(a.stages);
    const auto* list = std::get_if<std::vector<double>>(&stage_arg.value);
    if (list == nullptr) {
        throw UsageError("optimize order needs a stage mass list, e.g. --stages 135g,190g");
    }
    const StagePlan input(*list);
    const StagePlan best = optimal_order(input);
    const double t_in = staged_flight_time(cfg.source(), cfg.vehicle(), input).total_seconds;
    const double t_best = staged_flight_time(cfg.source(), cfg.vehicle(), best).total_seconds;
    const std::vector<double> order(best.masses().begin(), best.masses().end());

    if (a.common.json) {
        json j{{"order", grams_list(order)},
               {"order_kg", order},
               {"total_seconds", t_best},
               {"total_minutes", t_best / 60.0},
               {"input_total_seconds", t_in}};
        out << j.dump(2) << "\n";
        return;
    }
    out << "order: " << grams_list(order) << "\n";
    out << time_line("total", t_best);
    out << time_line("input order total", t_in);
}

void cmd_optimize_partition(const OptimizeArgs& a, std::ostream& out) {
    const VehicleConfig cfg = resolve_config(a.common);
    const StageArg stage_arg = parse_stage_arg(a.stages);
    const int* n = std::get_if<int>(&stage_arg.value);
    if (n == nullptr || a.total_mass.empty()) {
        throw UsageError("optimize partition needs --stages <count> and --total-mass");
    }
    const double storage = parse_mass_flag(a.total_mass, "--total-mass");
    const VehicleParams vehicle = cfg.vehicle();
    const EnergySource source = cfg.source();
    const PartitionSolution sol = optimal_partition(vehicle, storage, *n);
    const double t = sol.flight_time_seconds(source, vehicle);
    const double t_equal = equal_staged_flight_time(source, vehicle, storage, *n);

    if (a.common.json) {
        json j{{"stage_masses_kg", sol.stage_masses},
               {"boundary_masses_kg", sol.boundary_masses},
               {"total_seconds", t},
               {"total_minutes", t / 60.0},
               {"equal_split_seconds", t_equal},
               {"kkt_residual", sol.kkt_residual},
               {"iterations", sol.iterations}};
        out << j.dump(2) << "\n";
        return;
    }
    out << "stage masses: " << grams_list(sol.stage_masses) << "\n";
    out << time_line("total", t);
    out << time_line("equal split total", t_equal);
    out << fmt::format("kkt residual: {}\n", sol.kkt_residual);
    out << fmt::format("iterations: {}\n", sol.iterations);
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
    CommonOptions common;
    std::string stages = "1,2,3,5,10";
    std::size_t points = 512;
    double phi_min = 0.001;
    double phi_max = 0.999;
    bool no_optimal = false;
    bool no_continuous = false;
    bool gains = false;
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
    SweepSpec spec;
    spec.stage_counts = parse_count_list(a.stages);
    spec.storage_fractions = uniform_fractions(a.points, a.phi_min, a.phi_max);
    spec.include_optimal = !a.no_optimal;
    spec.include_continuous = !a.no_continuous;
    const SweepTable table = run_sweep(spec);

    std::vector<GainRow> gains;
    if (a.gains) {
        std::vector<int> counts;
        std::copy_if(spec.stage_counts.begin(), spec.stage_counts.end(), std::back_inserter(counts),
                     [](int n) { return n >= 2; });
        if (counts.empty()) {
            throw DomainError("--gains needs at least one stage count >= 2");
        }
        gains = gain_table(counts);
    }

    std::string payload;
    if (a.common.json) {
        payload = (a.gains ? sweep_with_gains_to_json(table, gains, 2) : sweep_to_json(table, 2)) + "\n";
    } else {
        payload = sweep_to_csv(table);
        if (a.gains) {
            payload += "\n" + gains_to_csv(gains);
        }
    }
    emit(a.common, payload, out);
    if (!a.common.out_path.empty()) {
        out << fmt::format("wrote {} rows to {}\n", table.rows.size(), a.common.out_path);
    }
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    CommonOptions common;
    std::string mode;
    double dt = 0.01;
    std::string stages;
    std::string total_mass;
};

std::string trace_csv(const SimTrace& trace) {
    std::string csv = "time_s,mass_kg,power_W_or_thrust_N,remaining_J_or_kg\n";
    for (const auto& s : trace.samples) {
        csv += fmt::format("{},{},{},{}\n", s.time_s, s.mass_kg, s.power_or_thrust, s.remaining);
    }
    return csv;
}

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    if (!(a.dt > 0.0) || a.dt > 1.0) {
        throw UsageError(fmt::format("--dt must lie in (0, 1] s, got {}", a.dt));
    }
    const VehicleConfig cfg = resolve_config(a.common);
    const VehicleParams vehicle = cfg.vehicle();

    SimTrace trace;
    double closed_form = 0.0;
    if (a.mode == "discrete") {
        const EnergySource source = cfg.source();
        const StageArg stage_arg = parse_stage_arg(a.stages.empty() ? std::string("1") : a.stages);
        std::vector<double> masses;
        if (const auto* list = std::get_if<std::vector<double>>(&stage_arg.value)) {
            masses = *list;
            closed_form = staged_flight_time(source, vehicle, StagePlan(masses)).total_seconds;
        } else {
            const int n = std::get<int>(stage_arg.value);
            if (a.total_mass.empty()) {
                throw UsageError("a stage count needs --total-mass");
            }
            const double storage = parse_mass_flag(a.total_mass, "--total-mass");
            masses.assign(static_cast<std::size_t>(std::max(n, 0)), storage / n);
            closed_form = equal_staged_flight_time(source, vehicle, storage, n);
        }
        trace = simulate_discrete(source, vehicle, StagePlan(masses), {a.dt, SimMode::DiscreteStages});
    } else if (a.mode == "ic" || a.mode == "rocket") {
        if (a.total_mass.empty()) {
            throw UsageError(fmt::format("{} mode needs --total-mass (fuel mass)", a.mode));
        }
        const double fuel = parse_mass_flag(a.total_mass, "--total-mass");
        if (a.mode == "ic") {
            const EnergySource source = cfg.source();
            closed_form = ic_flight_time(source, vehicle, fuel);
            trace = simulate_ic(source, vehicle, fuel, {a.dt, SimMode::IcContinuous});
        } else {
            const auto rocket = cfg.rocket();
            if (!rocket) {
                throw ConfigError("rocket.exhaust_velocity", "rocket mode needs [rocket] exhaust_velocity");
            }
            closed_form = rocket_flight_time(*rocket, vehicle.dry_mass_kg(), fuel);
            trace = simulate_rocket(*rocket, vehicle.dry_mass_kg(), fuel, {a.dt, SimMode::Rocket});
        }
    } else {
        throw UsageError(fmt::format("--mode must be discrete, ic or rocket, got '{}'", a.mode));
    }

    const double simulated = trace.termination_time;
    const double rel = closed_form == 0.0 ? std::abs(simulated) : std::abs(simulated - closed_form) / closed_form;

    if (!a.common.out_path.empty()) {
        CommonOptions to_file = a.common;
        emit(to_file, trace_csv(trace), out);
    }
    if (a.common.json) {
        json j{{"mode", a.mode},
               {"simulated_seconds", simulated},
               {"closed_form_seconds", closed_form},
               {"relative_error", rel},
               {"steps", trace.steps},
               {"samples", trace.samples.size()}};
        out << j.dump(2) << "\n";
        return;
    }
    out << time_line("simulated", simulated);
    out << time_line("closed form", closed_form);
    out << fmt::format("relative error: {}\n", rel);
}

// ---- required-mass ---------------------------------------------------------

struct RequiredMassArgs {
    CommonOptions common;
    std::string target;
    int stages = 1;
};

void cmd_required_mass(const RequiredMassArgs& a, std::ostream& out) {
    const VehicleConfig cfg = resolve_config(a.common);
    double target = 0.0;
    try {
        target = parse_quantity(a.target, Dimension::Time);
    } catch (const UnitError& e) {
        throw UsageError(fmt::format("--target: {}", e.what()));
    }
    const double mass = required_storage_mass(cfg.source(), cfg.vehicle(), a.stages, target);
    if (a.common.json) {
        json j{{"required_storage_kg", mass}, {"target_seconds", target}, {"stages", a.stages}};
        out << j.dump(2) << "\n";
        return;
    }
    out << fmt::format("required storage mass: {} ({} kg)\n", format_quantity(mass, "g"), mass);
}

// ---- limits ----------------------------------------------------------------

void cmd_limits(const CommonOptions& opt, std::ostream& out) {
    const VehicleConfig cfg = resolve_config(opt);
    const VehicleParams vehicle = cfg.vehicle();
    const double limit = ic_flight_time_limit(cfg.source(), vehicle);
    const auto rocket = cfg.rocket();

    if (opt.json) {
        json j{{"dry_mass_kg", vehicle.dry_mass_kg()},
               {"power_coeff_cp", vehicle.power_coeff_cp()},
               {"flight_coeff_cT", vehicle.flight_coeff_cT()},
               {"gravity", vehicle.gravity()},
               {"continuous_limit_seconds", limit},
               {"continuous_limit_minutes", limit / 60.0}};
        if (rocket) {
            j["rocket"] = {{"exhaust_velocity", rocket->exhaust_velocity()},
                           {"seconds_per_log_mass_ratio", 4.0 * rocket->exhaust_velocity() / rocket->gravity()}};
        }
        out << j.dump(2) << "\n";
        return;
    }
    out << fmt::format("dry mass: {}\n", format_quantity(vehicle.dry_mass_kg(), "g"));
    out << fmt::format("c_p: {} W/N^1.5\n", vehicle.power_coeff_cp());
    out << fmt::format("c_T: {} kg^1.5/W\n", vehicle.flight_coeff_cT());
    out << fmt::format("gravity: {} m/s^2\n", vehicle.gravity());
    out << time_line("continuous staging limit", limit);
    if (rocket) {
        out << fmt::format("rocket exhaust velocity: {}\n", format_quantity(rocket->exhaust_velocity(), "m/s"));
        out << fmt::format("rocket hover time per unit ln(1 + m_b/m_d): {} s\n",
                           4.0 * rocket->exhaust_velocity() / rocket->gravity());
    } else {
        out << "rocket: not configured\n";
    }
}

int report(std::ostream& err, int code, const std::string& message) {
    err << "error: " << message << "\n";
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hover endurance of multirotors with staged energy storage", "staged_endurance"};
    app.require_subcommand(1);

    std::function<void()> action;

    FlightTimeArgs ft;
    auto* flight = app.add_subcommand("flight-time", "Hover time for a stage list or an equal split");
    add_common(*flight, ft.common, false);
    flight->add_option("--stages", ft.stages, "Mass list (190g,135g) or stage count");
    flight->add_option("--total-mass", ft.total_mass, "Total storage mass for an equal split, e.g. 380g");
    flight->callback([&] { action = [&] { cmd_flight_time(ft, out); }; });

    OptimizeArgs opt;
    auto* optimize = app.add_subcommand("optimize", "Optimal staging order or mass partition");
    optimize->require_subcommand(1);
    auto* order = optimize->add_subcommand("order", "Heaviest-first order of a stage list");
    add_common(*order, opt.common, false);
    order->add_option("--stages", opt.stages, "Mass list, e.g. 135g,190g")->required();
    order->callback([&] { action = [&] { cmd_optimize_order(opt, out); }; });
    auto* partition = optimize->add_subcommand("partition", "Optimal split of a storage budget");
    add_common(*partition, opt.common, false);
    partition->add_option("--stages", opt.stages, "Stage count")->required();
    partition->add_option("--total-mass", opt.total_mass, "Storage budget, e.g. 380g")->required();
    partition->callback([&] { action = [&] { cmd_optimize_partition(opt, out); }; });

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Normalized flight time over the storage fraction");
    add_common(*sweep, sw.common, true);
    sweep->add_option("--stages", sw.stages, "Comma-separated stage counts")->capture_default_str();
    sweep->add_option("--points", sw.points, "Grid points")->capture_default_str()->check(CLI::Range(3, 1000000));
    sweep->add_option("--phi-min", sw.phi_min, "Smallest storage fraction")->capture_default_str();
    sweep->add_option("--phi-max", sw.phi_max, "Largest storage fraction")->capture_default_str();
    sweep->add_flag("--no-optimal", sw.no_optimal, "Skip optimal-partition curves");
    sweep->add_flag("--no-continuous", sw.no_continuous, "Skip the continuous-staging curve");
    sweep->add_flag("--gains", sw.gains, "Append the optimal-vs-equal peak gain table");
    sweep->callback([&] { action = [&] { cmd_sweep(sw, out); }; });

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Time-stepped mission compared with the closed form");
    add_common(*simulate, sim.common, true);
    simulate->add_option("--mode", sim.mode, "discrete | ic | rocket")->required();
    simulate->add_option("--dt", sim.dt, "Time step [s], in (0, 1]")->capture_default_str();
    simulate->add_option("--stages", sim.stages, "Discrete mode: mass list or stage count");
    simulate->add_option("--total-mass", sim.total_mass, "Storage (discrete) or fuel (ic, rocket) mass");
    simulate->callback([&] { action = [&] { cmd_simulate(sim, out); }; });

    RequiredMassArgs req;
    auto* required = app.add_subcommand("required-mass", "Storage mass needed for a target flight time");
    add_common(*required, req.common, false);
    required->add_option("--target", req.target, "Target time, e.g. 22.8min")->required();
    required->add_option("--stages", req.stages, "Equal stage count")->capture_default_str();
    required->callback([&] { action = [&] { cmd_required_mass(req, out); }; });

    CommonOptions lim;
    auto* limits = app.add_subcommand("limits", "Continuous-staging limit and rocket parameters");
    add_common(*limits, lim, false);
    limits->callback([&] { action = [&] { cmd_limits(lim, out); }; });

    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kBadInput;
    }

    try {
        action();
        return kSuccess;
    } catch (const ConfigError& e) {
        return report(err, kBadInput, e.key().empty() ? e.what() : fmt::format("{} [key: {}]", e.what(), e.key()));
    } catch (const UsageError& e) {
        return report(err, kBadInput, e.what());
    } catch (const UnitError& e) {
        return report(err, kBadInput, e.what());
    } catch (const UnreachableTargetError& e) {
        return report(err, kInfeasible,
                      fmt::format("unreachable target: maximum achievable is {} s ({} min) at {} storage", e.max_seconds(),
                                  minutes(e.max_seconds()), format_quantity(e.argmax_storage_kg(), "g")));
    } catch (const SolverError& e) {
        return report(err, kSolverFailure,
                      fmt::format("{}; best residual {} after {} iterations", e.what(), e.residual(), e.iterations()));
    } catch (const OutputError& e) {
        return report(err, kOutputFailure, e.what());
    } catch (const DomainError& e) {
        return report(err, kInfeasible, e.what());
    } catch (const RefusalError& e) {
        return report(err, kInfeasible, e.what());
    } catch (const std::exception& e) {
        return report(err, kInfeasible, e.what());
    }
}

}  // namespace staged::cli
