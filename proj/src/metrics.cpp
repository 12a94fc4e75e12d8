#include "chainsim/metrics.hpp"

#include "chainsim/util.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

namespace chainsim {

double coeff_variation(std::span<const double> series) {
    if (series.size() < 2) {
        throw MetricError("coeff_variation: need at least two points, got " +
                          std::to_string(series.size()));
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    if (!(mean > 0.0)) {
        throw MetricError("coeff_variation: undefined for mean " + std::to_string(mean));
    }
    double ss = 0.0;
    for (double v : series) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sigma = std::sqrt(ss / static_cast<double>(series.size()));
    return sigma / mean;
}

double coeff_variation(std::span<const int> series) {
    std::vector<double> values(series.begin(), series.end());
    return coeff_variation(std::span<const double>(values));
}

double aggregate_bullwhip(std::span<const double> cvs) {
    if (cvs.empty()) throw MetricError("aggregate_bullwhip: empty list");
    double product = 1.0;
    for (double cv : cvs) {
        if (!std::isfinite(cv) || cv < 0.0) {
            throw MetricError("aggregate_bullwhip: invalid coefficient " + std::to_string(cv));
        }
        product *= cv;
    }
    return product;
}

double cumulative_global_cost(const std::vector<std::vector<double>>& ledger) {
    double total = 0.0;
    for (const auto& row : ledger) {
        for (double cell : row) total += cell;
    }
    return total;
}

bool bullwhip_negligible(double aggregate) {
    return aggregate < 1.0;
}

MetricsReport compute_report(const std::vector<std::vector<double>>& cost_matrix,
                             const std::vector<std::vector<int>>& order_histories,
                             int warmup_steps) {
    MetricsReport report;
    const size_t n_agents = order_histories.size();
    report.per_agent_cost.assign(n_agents, 0.0);
    for (const auto& row : cost_matrix) {
        for (size_t i = 0; i < row.size() && i < n_agents; ++i) {
            report.per_agent_cost[i] += row[i];
        }
    }
    for (double c : report.per_agent_cost) report.cumulative_global_cost += c;

    report.per_agent_cv.assign(n_agents, std::nullopt);
    bool all_defined = n_agents > 0;
    for (size_t i = 0; i < n_agents; ++i) {
        const auto& history = order_histories[i];
        const size_t skip = std::min(history.size(), static_cast<size_t>(std::max(warmup_steps, 0)));
        std::span<const int> window(history.data() + skip, history.size() - skip);
        try {
            report.per_agent_cv[i] = coeff_variation(window);
        } catch (const MetricError&) {
            all_defined = false;
        }
    }
    if (all_defined) {
        std::vector<double> cvs;
        cvs.reserve(n_agents);
        for (const auto& cv : report.per_agent_cv) cvs.push_back(*cv);
        report.aggregate_bullwhip = aggregate_bullwhip(cvs);
    }
    return report;
}

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["cumulative_global_cost"] = cumulative_global_cost;
    j["per_agent_cost"] = per_agent_cost;
    nlohmann::ordered_json cvs = nlohmann::ordered_json::array();
    for (const auto& cv : per_agent_cv) {
        if (cv) cvs.push_back(*cv); else cvs.push_back(nullptr);
    }
    j["per_agent_cv"] = cvs;
    if (aggregate_bullwhip) {
        j["aggregate_bullwhip"] = *aggregate_bullwhip;
    } else {
        j["aggregate_bullwhip"] = nullptr;
    }
    return j.dump(2) + "\n";
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    MetricsReport report;
    report.cumulative_global_cost = j.at("cumulative_global_cost").get<double>();
    report.per_agent_cost = j.at("per_agent_cost").get<std::vector<double>>();
    for (const auto& cv : j.at("per_agent_cv")) {
        if (cv.is_null()) report.per_agent_cv.push_back(std::nullopt);
        else report.per_agent_cv.push_back(cv.get<double>());
    }
    if (!j.at("aggregate_bullwhip").is_null()) {
        report.aggregate_bullwhip = j.at("aggregate_bullwhip").get<double>();
    }
    return report;
}

std::string MetricsReport::to_csv_row() const {
    nlohmann::json num; // reuse the JSON double formatter for stable text
    std::ostringstream out;
    auto fmt = [&num](double v) {
        num = v;
        return num.dump();
    };
    out << "cumulative_global_cost";
    for (size_t i = 0; i < per_agent_cost.size(); ++i) out << ",cost_agent" << i;
    for (size_t i = 0; i < per_agent_cv.size(); ++i) out << ",cv_agent" << i;
    out << ",aggregate_bullwhip\n";
    out << fmt(cumulative_global_cost);
    for (double c : per_agent_cost) out << "," << fmt(c);
    for (const auto& cv : per_agent_cv) {
        out << ",";
        if (cv) out << fmt(*cv);
    }
    out << ",";
    if (aggregate_bullwhip) out << fmt(*aggregate_bullwhip);
    out << "\n";
    return out.str();
}

} // namespace chainsim
