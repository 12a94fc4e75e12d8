#include "chainsim/policies.hpp"

#include "chainsim/util.hpp"

namespace chainsim {

void PolicySpec::validate(int max_order) const {
    if (kind != PolicyKind::ss_policy) return;
    if (reorder_point < 0 || reorder_point > order_up_to || order_up_to > max_order) {
        throw ConfigError("ss_policy: need 0 <= s <= S <= max_order");
    }
}

int ss_policy_decide(const Observation& obs, int order_up_to, int reorder_point, int max_order,
                     SsPositionMode mode) {
    int position = obs.inventory;
    if (mode == SsPositionMode::inventory_position) {
        for (const auto& entry : obs.incoming_deliveries) position += entry.quantity;
        position -= obs.backlog;
    }
    if (position >= reorder_point) return 0; // "falls below" is strict
    return clamp_units(order_up_to - position, max_order);
}

int tool_agent_decide(const Observation&, const ToolOutput& tool_output) {
    return tool_output.recommended_order;
}

} // namespace chainsim
