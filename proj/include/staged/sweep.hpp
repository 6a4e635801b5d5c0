#pragma once

// Design-space sweep over the storage fraction phi = m_b / (m_d + m_b).
// Flight times are normalized by the continuous-staging limit 2 e_b c_T / sqrt(m_d),
// so e_b and c_T cancel and only phi and the stage count matter.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace staged {

enum class StagingKind { Equal, Optimal, Continuous };

std::string_view to_string(StagingKind kind);

struct SweepSpec {
    std::vector<double> storage_fractions;
    std::vector<int> stage_counts;
    bool include_optimal = true;
    bool include_continuous = true;
    double reference_dry_mass = 1.0;

    /// 512 points on [0.001, 0.999] and stage counts {1, 2, 3, 5, 10}.
    static SweepSpec defaults();
    void validate() const;
};

struct SweepRow {
    double phi;
    std::optional<int> stages;  // empty for continuous staging
    StagingKind kind;
    double normalized_time;
};

struct SweepTable {
    std::vector<SweepRow> rows;
};

std::vector<double> uniform_fractions(std::size_t count, double first, double last);

/// T / T_inf for one configuration. stages is ignored for continuous staging.
double normalized_flight_time(StagingKind kind, int stages, double phi, double reference_dry_mass = 1.0);

/// Rows ordered by (kind, stages, phi).
SweepTable run_sweep(const SweepSpec& spec);

struct Peak {
    double phi;
    double normalized_time;
};

/**
 * @brief Maximum of a normalized curve over phi.
 *
 * Takes the best point of the coarse grid, then refines by golden-section search
 * between its neighbours down to 1e-8 in phi. Throws std::runtime_error when the
 * coarse samples are not unimodal.
 */
Peak locate_peak(StagingKind kind, int stages, std::span<const double> coarse_grid);

struct GainRow {
    int stages;
    Peak equal;
    Peak optimal;
    double gain_percent;
};

/// Optimal-vs-equal peak gain for each stage count (all must be >= 2).
std::vector<GainRow> gain_table(std::span<const int> stage_counts);
std::vector<GainRow> gain_table(std::span<const int> stage_counts, std::span<const double> coarse_grid);

/// CSV with header `phi,stages,kind,normalized_time`; continuous rows carry `inf` as stages.
std::string sweep_to_csv(const SweepTable& table);
/// JSON array of {phi, stages, kind, normalized_time}; continuous rows carry null stages.
std::string sweep_to_json(const SweepTable& table, int indent = -1);

std::string gains_to_csv(std::span<const GainRow> gains);
std::string gains_to_json(std::span<const GainRow> gains, int indent = -1);
/// {"sweep": [...], "gains": [...]}
std::string sweep_with_gains_to_json(const SweepTable& table, std::span<const GainRow> gains, int indent = -1);

}  // namespace staged
