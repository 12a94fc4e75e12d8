#pragma once

#include <span>
#include <string>

namespace chainsim {

enum class ToolId { forecast, eoq };

std::string tool_id_name(ToolId id);

/// Result of one decision-support tool invocation.
struct ToolOutput {
    ToolId tool_id = ToolId::forecast;
    int recommended_order = 0;      // always within [0, max_order]
    std::string inputs_digest;      // human-readable summary of the data used
};

inline constexpr int kDefaultToolLookback = 30;

/// Ordinary least squares on (index, value) over the last `lookback` points,
/// evaluated one step past the window. With fewer than three points the
/// forecast falls back to the most recent observed value (0 when empty).
ToolOutput forecast_demand_linreg(std::span<const int> demand_history, int max_order,
                                  int lookback = kDefaultToolLookback);

/// Economic order quantity: round(sqrt(2 * D * ordering_cost / holding_cost))
/// where D is the mean of the last `lookback` downstream demands.
ToolOutput eoq(std::span<const int> demand_history, double ordering_cost, double holding_cost,
               int max_order, int lookback = kDefaultToolLookback);

} // namespace chainsim
