#pragma once

#include "chainsim/env.hpp"
#include "chainsim/tools.hpp"

namespace chainsim {

enum class PolicyKind { ss_policy, tool_agent };

/// How the (S,s) rule measures "inventory": on-hand plus pipeline minus
/// backlog (the default), or on-hand alone.
enum class SsPositionMode { inventory_position, on_hand_only };

struct PolicySpec {
    PolicyKind kind = PolicyKind::ss_policy;
    int order_up_to = 100; // S
    int reorder_point = 60; // s
    SsPositionMode position_mode = SsPositionMode::inventory_position;
    ToolId tool_id = ToolId::forecast;

    void validate(int max_order) const;
};

/// Order up to S whenever the inventory position falls strictly below s.
int ss_policy_decide(const Observation& obs, int order_up_to, int reorder_point, int max_order,
                     SsPositionMode mode = SsPositionMode::inventory_position);

/// The strong baseline: the tool output becomes the order, verbatim.
int tool_agent_decide(const Observation& obs, const ToolOutput& tool_output);

} // namespace chainsim
