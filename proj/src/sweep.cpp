#include "staged/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "staged/model.hpp"
#include "staged/optimize.hpp"

namespace staged {
namespace {

void require_fraction(double phi) {
    if (!(phi > 0.0 && phi < 1.0)) {
        throw DomainError(fmt::format("storage fraction must lie in (0, 1), got {}", phi));
    }
}

int kind_rank(StagingKind kind) { return static_cast<int>(kind); }

nlohmann::json row_json(const SweepRow& row) {
    nlohmann::json j;
    j["phi"] = row.phi;
    j["stages"] = row.stages ? nlohmann::json(*row.stages) : nlohmann::json(nullptr);
    j["kind"] = std::string(to_string(row.kind));
    j["normalized_time"] = row.normalized_time;
    return j;
}

nlohmann::json gains_json(std::span<const GainRow> gains) {
    auto arr = nlohmann::json::array();
    for (const auto& g : gains) {
        arr.push_back({{"stages", g.stages},
                       {"peak_equal", g.equal.normalized_time},
                       {"peak_equal_phi", g.equal.phi},
                       {"peak_optimal", g.optimal.normalized_time},
                       {"peak_optimal_phi", g.optimal.phi},
                       {"gain_percent", g.gain_percent}});
    }
    return arr;
}

nlohmann::json table_json(const SweepTable& table) {
    auto arr = nlohmann::json::array();
    for (const auto& row : table.rows) {
        arr.push_back(row_json(row));
    }
    return arr;
}

}  // namespace

std::string_view to_string(StagingKind kind) {
    switch (kind) {
        case StagingKind::Equal:
            return "equal";
        case StagingKind::Optimal:
            return "optimal";
        case StagingKind::Continuous:
            return "continuous";
    }
    return "unknown";
}

SweepSpec SweepSpec::defaults() {
    SweepSpec spec;
    spec.storage_fractions = uniform_fractions(512, 0.001, 0.999);
    spec.stage_counts = {1, 2, 3, 5, 10};
    return spec;
}

void SweepSpec::validate() const {
    for (double phi : storage_fractions) {
        require_fraction(phi);
    }
    for (int n : stage_counts) {
        if (n < 1) {
            throw DomainError(fmt::format("stage count must be at least 1, got {}", n));
        }
    }
    if (!(reference_dry_mass > 0.0)) {
        throw DomainError("reference dry mass must be strictly positive");
    }
}

std::vector<double> uniform_fractions(std::size_t count, double first, double last) {
    if (count == 0) {
        return {};
    }
    if (count == 1) {
        return {first};
    }
    std::vector<double> out(count);
    const double step = (last - first) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = first + step * static_cast<double>(i);
    }
    out.back() = last;
    return out;
}

double normalized_flight_time(StagingKind kind, int stages, double phi, double reference_dry_mass) {
    require_fraction(phi);
    const double dry = reference_dry_mass;
    const double storage = phi / (1.0 - phi) * dry;
    // T / T_inf = J sqrt(m_d) / 2
    switch (kind) {
        case StagingKind::Continuous:
            return -std::expm1(-0.5 * std::log1p(storage / dry));
        case StagingKind::Equal: {
            if (stages < 1) {
                throw DomainError("stage count must be at least 1");
            }
            const double n = static_cast<double>(stages);
            double sum = 0.0;
            for (int i = 1; i <= stages; ++i) {
                sum += std::pow(dry + (static_cast<double>(i) / n) * storage, -1.5);
            }
            return storage / n * sum * std::sqrt(dry) / 2.0;
        }
        case StagingKind::Optimal: {
            const VehicleParams unit_vehicle(dry, 1.0);
            return optimal_partition(unit_vehicle, storage, stages).objective * std::sqrt(dry) / 2.0;
        }
    }
    throw std::logic_error("unhandled staging kind");
}

SweepTable run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepTable table;
    auto add_curve = [&](StagingKind kind, std::optional<int> stages) {
        for (double phi : spec.storage_fractions) {
            table.rows.push_back(
                {phi, stages, kind, normalized_flight_time(kind, stages.value_or(0), phi, spec.reference_dry_mass)});
        }
    };
    for (int n : spec.stage_counts) {
        add_curve(StagingKind::Equal, n);
        if (spec.include_optimal) {
            add_curve(StagingKind::Optimal, n);
        }
    }
    if (spec.include_continuous) {
        add_curve(StagingKind::Continuous, std::nullopt);
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        const int na = a.stages.value_or(std::numeric_limits<int>::max());
        const int nb = b.stages.value_or(std::numeric_limits<int>::max());
        return std::tuple(kind_rank(a.kind), na, a.phi) < std::tuple(kind_rank(b.kind), nb, b.phi);
    });
    return table;
}

Peak locate_peak(StagingKind kind, int stages, std::span<const double> coarse_grid) {
    if (coarse_grid.size() < 3) {
        throw DomainError("peak search needs at least three grid points");
    }
    auto value = [&](double phi) { return normalized_flight_time(kind, stages, phi); };

    std::vector<double> samples(coarse_grid.size());
    std::transform(coarse_grid.begin(), coarse_grid.end(), samples.begin(), value);
    const auto best = static_cast<std::size_t>(std::max_element(samples.begin(), samples.end()) - samples.begin());

    constexpr double slack = 1e-12;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const bool rising = samples[i] >= samples[i - 1] - slack * std::abs(samples[i - 1]);
        const bool falling = samples[i] <= samples[i - 1] + slack * std::abs(samples[i - 1]);
        if ((i <= best && !rising) || (i > best && !falling)) {
            throw std::runtime_error(fmt::format("{} curve for N = {} is not unimodal over the storage fraction grid",
                                                 to_string(kind), stages));
        }
    }

    double lo = coarse_grid[best == 0 ? 0 : best - 1];
    double hi = coarse_grid[std::min(best + 1, coarse_grid.size() - 1)];
    constexpr double inv_phi = 0.6180339887498949;
    double a = hi - inv_phi * (hi - lo);
    double b = lo + inv_phi * (hi - lo);
    double fa = value(a);
    double fb = value(b);
    while (hi - lo > 1e-8) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = value(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = value(a);
        }
    }
    const double phi = 0.5 * (lo + hi);
    Peak peak{phi, value(phi)};
    if (samples[best] > peak.normalized_time) {
        peak = {coarse_grid[best], samples[best]};
    }
    return peak;
}

std::vector<GainRow> gain_table(std::span<const int> stage_counts) {
    const auto grid = uniform_fractions(512, 0.001, 0.999);
    return gain_table(stage_counts, grid);
}

std::vector<GainRow> gain_table(std::span<const int> stage_counts, std::span<const double> coarse_grid) {
    std::vector<GainRow> rows;
    for (int n : stage_counts) {
        if (n < 2) {
            throw DomainError(fmt::format("gain table needs N >= 2 (equal and optimal coincide at N = {})", n));
        }
    }
    for (int n : stage_counts) {
        GainRow row{n, locate_peak(StagingKind::Equal, n, coarse_grid),
                    locate_peak(StagingKind::Optimal, n, coarse_grid), 0.0};
        row.gain_percent = 100.0 * (row.optimal.normalized_time / row.equal.normalized_time - 1.0);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const SweepTable& table) {
    std::string out = "phi,stages,kind,normalized_time\n";
    for (const auto& row : table.rows) {
        out += fmt::format("{},{},{},{}\n", row.phi, row.stages ? fmt::format("{}", *row.stages) : "inf",
                           to_string(row.kind), row.normalized_time);
    }
    return out;
}

std::string sweep_to_json(const SweepTable& table, int indent) { return table_json(table).dump(indent); }

std::string gains_to_csv(std::span<const GainRow> gains) {
    std::string out = "stages,peak_equal,peak_optimal,gain_percent\n";
    for (const auto& g : gains) {
        out += fmt::format("{},{},{},{}\n", g.stages, g.equal.normalized_time, g.optimal.normalized_time,
                           g.gain_percent);
    }
    return out;
}

std::string gains_to_json(std::span<const GainRow> gains, int indent) { return gains_json(gains).dump(indent); }

std::string sweep_with_gains_to_json(const SweepTable& table, std::span<const GainRow> gains, int indent) {
    nlohmann::json j;
    j["sweep"] = table_json(table);
    j["gains"] = gains_json(gains);
    return j.dump(indent);
}

}  // namespace staged
