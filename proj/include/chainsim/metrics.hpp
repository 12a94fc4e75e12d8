#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chainsim {

/// Per-run cost and bullwhip summary.
///
/// `per_agent_cv` entries are empty when the coefficient of variation is
/// undefined for that agent (series too short or zero mean); the aggregate
/// is present only when every per-agent value is defined.
struct MetricsReport {
    double cumulative_global_cost = 0.0;
    std::vector<double> per_agent_cost;
    std::vector<std::optional<double>> per_agent_cv;
    std::optional<double> aggregate_bullwhip;

    std::string to_json() const;
    std::string to_csv_row() const;
    static MetricsReport from_json(const std::string& text);
};

/// Population standard deviation divided by mean.
/// Throws MetricError when the series has fewer than two points or mean <= 0.
double coeff_variation(std::span<const double> series);
double coeff_variation(std::span<const int> series);

/// Product of per-echelon coefficients of variation. Throws MetricError on
/// an empty list or a non-finite/negative entry.
double aggregate_bullwhip(std::span<const double> cvs);

/// Sum of a step x agent cost matrix. Empty matrix sums to zero.
double cumulative_global_cost(const std::vector<std::vector<double>>& ledger);

/// Aggregate below 1 means the bullwhip effect is negligible.
bool bullwhip_negligible(double aggregate);

/// Build a full report from a cost matrix (rows = steps, cols = agents) and
/// the per-agent order histories. The first `warmup_steps` orders of each
/// history are excluded from the CV computation.
MetricsReport compute_report(const std::vector<std::vector<double>>& cost_matrix,
                             const std::vector<std::vector<int>>& order_histories,
                             int warmup_steps);

} // namespace chainsim
