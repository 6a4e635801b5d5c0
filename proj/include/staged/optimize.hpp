#pragma once

#include <span>
#include <vector>

#include "staged/model.hpp"

namespace staged {

/**
 * @brief Stage-mass partition of a storage budget.
 *
 * boundary_masses holds x_1..x_{N+1}, where x_i = m_d + sum_{j >= i} m_j is the
 * vehicle mass while stage i is in use. x_1 = m_d + m_b and x_{N+1} = m_d.
 */
struct PartitionSolution {
    std::vector<double> boundary_masses;
    std::vector<double> stage_masses;
    /// J = sum (x_i - x_{i+1}) / x_i^(3/2), flight time divided by e_b c_T [kg^-1/2]
    double objective = 0.0;
    /// max |1 + 2 (x_i/x_{i-1})^(3/2) - 3 x_{i+1}/x_i| over interior boundaries (dimensionless)
    double kkt_residual = 0.0;
    int iterations = 0;

    double flight_time_seconds(const EnergySource& source, const VehicleParams& vehicle) const;
};

struct OrderResult {
    StagePlan plan;
    double flight_time_seconds;
};

/// Same stages, heaviest first. This order maximizes total hover time.
StagePlan optimal_order(const StagePlan& plan);

/**
 * @brief Exhaustive search over all stage orders.
 *
 * Ties are broken toward the lexicographically largest mass sequence.
 * Refuses plans longer than kMaxBruteForceStages.
 */
OrderResult brute_force_best_order(const EnergySource& source, const VehicleParams& vehicle, const StagePlan& plan);

inline constexpr std::size_t kMaxBruteForceStages = 8;

/// Objective J for boundary masses x_1..x_{N+1}.
double partition_objective(std::span<const double> boundary_masses);

/// Scaled stationarity residuals at the interior boundaries x_2..x_N.
std::vector<double> partition_residuals(std::span<const double> boundary_masses);

/**
 * @brief Stage masses maximizing hover time for a fixed budget and stage count.
 *
 * Solves the interior stationarity conditions by damped Newton iteration on the
 * tridiagonal system, starting from the equal split. Falls back to projected
 * gradient ascent on J when a Newton step cannot reduce the residual.
 * Throws SolverError if the residual does not reach 1e-12 within 200 iterations.
 */
PartitionSolution optimal_partition(const VehicleParams& vehicle, double total_storage_kg, int n_stages);

/**
 * @brief Brute-force partition over a uniform grid of interior boundaries.
 *
 * Independent check for optimal_partition. Limited to n_stages <= 3.
 */
PartitionSolution grid_search_partition(const VehicleParams& vehicle, double total_storage_kg, int n_stages,
                                        double resolution_kg);

}  // namespace staged
