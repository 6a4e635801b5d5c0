#pragma once

// Test-only reference computations. These deliberately avoid the library code
// paths they are used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// Discrete staged flight time, recomputing every carried mass from scratch.
inline double staged_time(double eb_cT, double dry, const std::vector<double>& masses) {
    double total = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
        double carried = dry;
        for (std::size_t j = i; j < masses.size(); ++j) {
            carried += masses[j];
        }
        total += eb_cT * masses[i] / (carried * std::sqrt(carried));
    }
    return total;
}

/// Best staged time over all orders.
inline double best_order_time(double eb_cT, double dry, std::vector<double> masses) {
    std::sort(masses.begin(), masses.end());
    double best = -1.0;
    do {
        best = std::max(best, staged_time(eb_cT, dry, masses));
    } while (std::next_permutation(masses.begin(), masses.end()));
    return best;
}

/// J(x) written in terms of stage masses.
inline double objective_from_boundaries(const std::vector<double>& x) {
    std::vector<double> m;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        m.push_back(x[i] - x[i + 1]);
    }
    return staged_time(1.0, x.back(), m);
}

/// Centered finite-difference gradient of J at the interior boundaries.
inline std::vector<double> fd_gradient(const std::vector<double>& x, double rel_step) {
    std::vector<double> g;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double h = rel_step * x[i];
        auto xp = x;
        auto xm = x;
        xp[i] += h;
        xm[i] -= h;
        g.push_back((objective_from_boundaries(xp) - objective_from_boundaries(xm)) / (2.0 * h));
    }
    return g;
}

/// Golden-section maximization on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    while (hi - lo > tol) {
        const double a = hi - r * (hi - lo);
        const double b = lo + r * (hi - lo);
        if (f(a) < f(b)) {
            lo = a;
        } else {
            hi = b;
        }
    }
    return 0.5 * (lo + hi);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
