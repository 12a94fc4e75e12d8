#include "chainsim/tools.hpp"

#include "chainsim/util.hpp"

#include <cmath>
#include <fmt/core.h>

namespace chainsim {

std::string tool_id_name(ToolId id) {
    return id == ToolId::forecast ? "forecast" : "eoq";
}

namespace {

std::span<const int> last_window(std::span<const int> series, int lookback) {
    const size_t keep = std::min(series.size(), static_cast<size_t>(std::max(lookback, 0)));
    return series.subspan(series.size() - keep, keep);
}

} // namespace

ToolOutput forecast_demand_linreg(std::span<const int> demand_history, int max_order,
                                  int lookback) {
    ToolOutput out;
    out.tool_id = ToolId::forecast;
    if (demand_history.size() < 3) {
        const int fallback = demand_history.empty() ? 0 : demand_history.back();
        out.recommended_order = clamp_units(fallback, max_order);
        out.inputs_digest = fmt::format("linreg(points={}, fallback=last)", demand_history.size());
        return out;
    }
    const auto window = last_window(demand_history, lookback);
    const double n = static_cast<double>(window.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < window.size(); ++i) {
        const double x = static_cast<double>(i);
        const double y = static_cast<double>(window[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx; // > 0 for n >= 2 distinct indices
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    const double prediction = slope * n + intercept;
    out.recommended_order = clamp_units(round_half_up(prediction), max_order);
    out.inputs_digest = fmt::format("linreg(points={}, window={})", window.size(), lookback);
    return out;
}

ToolOutput eoq(std::span<const int> demand_history, double ordering_cost, double holding_cost,
               int max_order, int lookback) {
    if (!(holding_cost > 0.0)) {
        throw ConfigError("eoq: holding_cost must be positive");
    }
    if (ordering_cost < 0.0) {
        throw ConfigError("eoq: ordering_cost must be non-negative");
    }
    ToolOutput out;
    out.tool_id = ToolId::eoq;
    const auto window = last_window(demand_history, lookback);
    double mean_demand = 0.0;
    if (!window.empty()) {
        for (int v : window) mean_demand += v;
        mean_demand /= static_cast<double>(window.size());
    }
    const double quantity = std::sqrt(2.0 * mean_demand * ordering_cost / holding_cost);
    out.recommended_order = clamp_units(round_half_up(quantity), max_order);
    out.inputs_digest = fmt::format("eoq(mean_demand={:.4f}, points={})", mean_demand, window.size());
    return out;
}

} // namespace chainsim
