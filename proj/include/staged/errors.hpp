#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace staged {

/// Input outside the domain of a flight-time formula (negative mass, empty plan, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Exhaustive oracles refuse inputs whose search space would explode.
class RefusalError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested flight time lies above the maximum achievable for the stage count.
class UnreachableTargetError : public std::runtime_error {
public:
    UnreachableTargetError(const std::string& what, double max_seconds, double argmax_storage_kg)
        : std::runtime_error(what), max_seconds_(max_seconds), argmax_storage_kg_(argmax_storage_kg) {}

    double max_seconds() const noexcept { return max_seconds_; }
    double argmax_storage_kg() const noexcept { return argmax_storage_kg_; }

private:
    double max_seconds_;
    double argmax_storage_kg_;
};

/// Partition solver failed to converge. Carries the best iterate seen.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::vector<double> best_boundaries, double residual, int iterations)
        : std::runtime_error(what),
          best_boundaries_(std::move(best_boundaries)),
          residual_(residual),
          iterations_(iterations) {}

    const std::vector<double>& best_boundaries() const noexcept { return best_boundaries_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    std::vector<double> best_boundaries_;
    double residual_;
    int iterations_;
};

}  // namespace staged
