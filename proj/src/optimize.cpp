#include "staged/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace staged {
namespace {

constexpr double kResidualTolerance = 1e-12;
constexpr int kIterationCap = 200;
constexpr double kMarginFraction = 1e-9;
constexpr int kMaxHalvings = 60;
constexpr int kGradientBurst = 50;

std::vector<double> stage_masses_from(std::span<const double> x) {
    std::vector<double> m(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        m[i] = x[i] - x[i + 1];
    }
    return m;
}

double max_abs(std::span<const double> v) {
    double out = 0.0;
    for (double e : v) {
        out = std::max(out, std::abs(e));
    }
    return out;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) {
        s += e * e;
    }
    return std::sqrt(s);
}

// Solves a tridiagonal system in place (Thomas algorithm). Returns false on a vanishing pivot.
bool solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> super,
                       std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t k = 1; k < n; ++k) {
        if (diag[k - 1] == 0.0 || !std::isfinite(diag[k - 1])) {
            return false;
        }
        const double w = sub[k] / diag[k - 1];
        diag[k] -= w * super[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    if (diag[n - 1] == 0.0 || !std::isfinite(diag[n - 1])) {
        return false;
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        rhs[k] = (rhs[k] - super[k] * rhs[k + 1]) / diag[k];
    }
    return std::all_of(rhs.begin(), rhs.end(), [](double v) { return std::isfinite(v); });
}

// Largest step fraction in (0, 1] keeping every gap x_i - x_{i+1} at least `margin`.
// `dx` covers interior boundaries only (x_1 and x_{N+1} stay fixed).
double feasible_step(std::span<const double> x, std::span<const double> dx, double margin) {
    double alpha = 1.0;
    const std::size_t n = x.size() - 1;
    auto delta = [&](std::size_t j) { return (j == 0 || j == n) ? 0.0 : dx[j - 1]; };
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = x[i] - x[i + 1];
        const double dgap = delta(i) - delta(i + 1);
        if (dgap < 0.0 && gap + dgap < margin) {
            alpha = std::min(alpha, std::max(0.0, (gap - margin) / -dgap));
        }
    }
    return alpha;
}

std::vector<double> stepped(std::span<const double> x, std::span<const double> dx, double alpha) {
    std::vector<double> out(x.begin(), x.end());
    for (std::size_t j = 0; j < dx.size(); ++j) {
        out[j + 1] += alpha * dx[j];
    }
    return out;
}

// dJ/dx_j at interior boundaries equals -rho_j / (2 x_j^(3/2)).
std::vector<double> objective_gradient(std::span<const double> x) {
    const auto rho = partition_residuals(x);
    std::vector<double> g(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) {
        g[j] = -0.5 * rho[j] * std::pow(x[j + 1], -1.5);
    }
    return g;
}

// Projected gradient ascent on J with Armijo backtracking. Feasibility is kept
// by capping the step at the margin, the same way Newton steps are.
std::vector<double> gradient_ascent(std::vector<double> x, double margin, int steps) {
    double step = 1.0;
    for (int s = 0; s < steps; ++s) {
        const auto g = objective_gradient(x);
        const double gg = norm2(g);
        if (gg == 0.0) {
            break;
        }
        const double j0 = partition_objective(x);
        double alpha = std::min(step, feasible_step(x, g, margin));
        bool improved = false;
        for (int h = 0; h < kMaxHalvings && alpha > 0.0; ++h, alpha *= 0.5) {
            auto trial = stepped(x, g, alpha);
            if (partition_objective(trial) >= j0 + 1e-4 * alpha * gg * gg) {
                x = std::move(trial);
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
        step = std::max(alpha * 2.0, 1e-300);
    }
    return x;
}

struct NewtonStep {
    std::vector<double> x;
    bool ok;
};

NewtonStep newton_step(std::span<const double> x, std::span<const double> rho, double margin) {
    const std::size_t n = rho.size();
    std::vector<double> sub(n, 0.0), diag(n, 0.0), super(n, 0.0), rhs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double prev = x[k];
        const double cur = x[k + 1];
        const double next = x[k + 2];
        const double ratio = cur / prev;
        sub[k] = -3.0 * std::pow(ratio, 1.5) / prev;
        diag[k] = 3.0 * std::sqrt(ratio) / prev + 3.0 * next / (cur * cur);
        super[k] = -3.0 / cur;
        rhs[k] = -rho[k];
    }
    if (!solve_tridiagonal(std::move(sub), std::move(diag), std::move(super), rhs)) {
        return {{}, false};
    }

    const double r0 = norm2(rho);
    double alpha = feasible_step(x, rhs, margin);
    for (int h = 0; h < kMaxHalvings && alpha > 0.0; ++h, alpha *= 0.5) {
        auto trial = stepped(x, rhs, alpha);
        if (norm2(partition_residuals(trial)) < r0) {
            return {std::move(trial), true};
        }
    }
    return {{}, false};
}

PartitionSolution make_solution(std::vector<double> x, int iterations) {
    PartitionSolution sol;
    sol.stage_masses = stage_masses_from(x);
    sol.objective = partition_objective(x);
    sol.kkt_residual = max_abs(partition_residuals(x));
    sol.iterations = iterations;
    sol.boundary_masses = std::move(x);
    return sol;
}

void check_budget(double total_storage_kg, int n_stages) {
    if (!(total_storage_kg > 0.0) || !std::isfinite(total_storage_kg)) {
        throw DomainError("total storage mass must be strictly positive");
    }
    if (n_stages < 1) {
        throw DomainError("stage count must be at least 1");
    }
}

std::vector<double> equal_boundaries(double dry, double storage, int n_stages) {
    std::vector<double> x(static_cast<std::size_t>(n_stages) + 1);
    const double n = static_cast<double>(n_stages);
    for (int i = 0; i <= n_stages; ++i) {
        x[static_cast<std::size_t>(i)] = dry + storage * static_cast<double>(n_stages - i) / n;
    }
    x.front() = dry + storage;
    x.back() = dry;
    return x;
}

}  // namespace

double PartitionSolution::flight_time_seconds(const EnergySource& source, const VehicleParams& vehicle) const {
    return source.specific_energy() * vehicle.flight_coeff_cT() * objective;
}

StagePlan optimal_order(const StagePlan& plan) {
    std::vector<double> m(plan.masses().begin(), plan.masses().end());
    std::sort(m.begin(), m.end(), std::greater<>());
    return StagePlan(std::move(m));
}

OrderResult brute_force_best_order(const EnergySource& source, const VehicleParams& vehicle, const StagePlan& plan) {
    if (plan.size() > kMaxBruteForceStages) {
        throw RefusalError("brute-force order search refuses " + std::to_string(plan.size()) +
                           " stages (limit " + std::to_string(kMaxBruteForceStages) + ")");
    }
    std::vector<double> perm(plan.masses().begin(), plan.masses().end());
    std::sort(perm.begin(), perm.end());

    std::vector<double> best;
    double best_time = -std::numeric_limits<double>::infinity();
    do {
        const double t = staged_flight_time(source, vehicle, StagePlan(perm)).total_seconds;
        if (t > best_time || (t == best_time && perm > best)) {
            best_time = t;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {StagePlan(std::move(best)), best_time};
}

double partition_objective(std::span<const double> x) {
    double j = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        j += (x[i] - x[i + 1]) * std::pow(x[i], -1.5);
    }
    return j;
}

std::vector<double> partition_residuals(std::span<const double> x) {
    if (x.size() < 2) {
        throw DomainError("partition needs at least two boundary masses");
    }
    std::vector<double> rho;
    rho.reserve(x.size() - 2);
    for (std::size_t j = 1; j + 1 < x.size(); ++j) {
        rho.push_back(1.0 + 2.0 * std::pow(x[j] / x[j - 1], 1.5) - 3.0 * x[j + 1] / x[j]);
    }
    return rho;
}

PartitionSolution optimal_partition(const VehicleParams& vehicle, double total_storage_kg, int n_stages) {
    check_budget(total_storage_kg, n_stages);
    const double dry = vehicle.dry_mass_kg();
    std::vector<double> x = equal_boundaries(dry, total_storage_kg, n_stages);
    if (n_stages == 1) {
        return make_solution(std::move(x), 0);
    }

    const double margin = kMarginFraction * total_storage_kg;
    std::vector<double> best = x;
    double best_residual = max_abs(partition_residuals(x));

    int it = 0;
    for (; it < kIterationCap; ++it) {
        const auto rho = partition_residuals(x);
        const double residual = max_abs(rho);
        if (residual < best_residual) {
            best_residual = residual;
            best = x;
        }
        if (residual <= kResidualTolerance) {
            break;
        }
        auto step = newton_step(x, rho, margin);
        if (step.ok) {
            x = std::move(step.x);
        } else {
            auto moved = gradient_ascent(x, margin, kGradientBurst);
            if (moved == x) {
                throw SolverError("partition solver stalled: neither Newton nor gradient ascent made progress",
                                  best, best_residual, it);
            }
            x = std::move(moved);
        }
    }

    auto sol = make_solution(x, it);
    if (sol.kkt_residual > kResidualTolerance) {
        throw SolverError("partition solver did not converge within " + std::to_string(kIterationCap) +
                              " iterations (residual " + std::to_string(best_residual) + ")",
                          best, best_residual, it);
    }
    const double smallest = *std::min_element(sol.stage_masses.begin(), sol.stage_masses.end());
    if (smallest <= 2.0 * margin) {
        throw SolverError("optimal partition collapsed a stage to zero mass", sol.boundary_masses,
                          sol.kkt_residual, it);
    }
    return sol;
}

PartitionSolution grid_search_partition(const VehicleParams& vehicle, double total_storage_kg, int n_stages,
                                        double resolution_kg) {
    check_budget(total_storage_kg, n_stages);
    if (n_stages > 3) {
        throw RefusalError("grid search refuses " + std::to_string(n_stages) + " stages (limit 3)");
    }
    if (!(resolution_kg > 0.0)) {
        throw DomainError("grid resolution must be strictly positive");
    }
    const double dry = vehicle.dry_mass_kg();
    const double top = dry + total_storage_kg;
    if (n_stages == 1) {
        return make_solution({top, dry}, 1);
    }

    // Interior boundaries sit at dry + k * resolution with 0 < k < cells.
    const double cells_real = std::ceil(total_storage_kg / resolution_kg);
    const double points = n_stages == 2 ? cells_real : 0.5 * cells_real * cells_real;
    if (points > 1e9) {
        throw RefusalError("grid search refuses " + std::to_string(points) + " grid points (limit 1e9)");
    }
    const auto cells = static_cast<long long>(cells_real);
    auto at = [&](long long k) { return dry + static_cast<double>(k) * resolution_kg; };

    std::vector<double> best;
    double best_j = -std::numeric_limits<double>::infinity();
    int evaluated = 0;
    if (n_stages == 2) {
        for (long long k = 1; k < cells && at(k) < top; ++k) {
            const std::vector<double> x{top, at(k), dry};
            const double j = partition_objective(x);
            ++evaluated;
            if (j > best_j) {
                best_j = j;
                best = x;
            }
        }
    } else {
        for (long long k2 = 2; k2 < cells && at(k2) < top; ++k2) {
            for (long long k3 = 1; k3 < k2; ++k3) {
                const std::vector<double> x{top, at(k2), at(k3), dry};
                const double j = partition_objective(x);
                ++evaluated;
                if (j > best_j) {
                    best_j = j;
                    best = x;
                }
            }
        }
    }
    if (best.empty()) {
        throw DomainError("grid resolution too coarse for the storage budget");
    }
    return make_solution(std::move(best), evaluated);
}

}  // namespace staged
