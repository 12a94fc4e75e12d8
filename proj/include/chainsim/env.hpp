#pragma once

#include "chainsim/demand.hpp"

#include <span>
#include <string>
#include <vector>

namespace chainsim {

/// Static parameters of a sequential supply chain run.
struct EnvConfig {
    int n_agents = 3;
    int lead_time = 2;
    int max_order = 100;
    double holding_cost = 1.0;
    double backlog_cost = 1.0;
    double variable_order_cost = 1.0;
    double fixed_order_cost = 1.0;
    int horizon = 100;
    int initial_inventory = 20;
    int memory_window = 10;

    void validate() const;
    bool operator==(const EnvConfig&) const = default;
};

/// One cost breakdown for a single (step, agent) cell.
struct StepCosts {
    double inventory_cost = 0.0;
    double backlog_cost = 0.0;
    double variable_order_cost = 0.0;
    double fixed_order_cost = 0.0;
    double total = 0.0;
    bool operator==(const StepCosts&) const = default;
};

StepCosts compute_step_costs(const EnvConfig& config, int inventory, int backlog, int order);

struct PipelineEntry {
    int arrival_step = 0;
    int quantity = 0;
    bool operator==(const PipelineEntry&) const = default;
};

/// One echelon's private state. Index 0 is the most downstream
/// (customer-facing) agent; the last index buys from an unlimited source.
struct AgentState {
    int inventory = 0;
    int backlog = 0;
    std::vector<PipelineEntry> pipeline;
    std::vector<int> order_history;
    std::vector<int> received_demand_history;
    std::vector<int> shipped_history;
    std::vector<int> inventory_history; // end-of-step levels
    std::vector<int> backlog_history;   // end-of-step levels

    int pipeline_total() const;
    bool operator==(const AgentState&) const = default;
};

/// Full simulator state. step() treats it as an immutable value: the input
/// state is never modified, a new state is returned.
struct EnvState {
    int step = 0;
    EnvConfig config;
    std::vector<AgentState> agents;
    DemandTrace demand_trace;
    std::vector<std::vector<StepCosts>> cost_ledger; // [step][agent]

    /// step x agent matrix of StepCosts::total, for the metrics layer.
    std::vector<std::vector<double>> total_cost_matrix() const;
    bool operator==(const EnvState&) const = default;
};

/// A memory-window entry: realized end-of-step inventory, backlog and order.
struct MemoryTriple {
    int inventory = 0;
    int backlog = 0;
    int order = 0;
    bool operator==(const MemoryTriple&) const = default;
};

/// One agent's local view. Contains no field from any non-adjacent echelon.
struct Observation {
    int agent_index = 0;
    int step = 0;
    int inventory = 0;
    int backlog = 0;
    int last_order = 0;
    std::vector<PipelineEntry> incoming_deliveries;
    int downstream_demand = 0;
    std::vector<MemoryTriple> memory_window;
};

struct StepResult {
    EnvState state;
    std::vector<Observation> observations;
    std::vector<StepCosts> costs;
};

EnvState reset(const EnvConfig& config, const DemandTrace& trace);

/// Advance one step. Per agent, in order: deliver due pipeline entries,
/// receive this step's downstream order as demand, ship what stock allows
/// (backlog first), accrue the rest as backlog, then account costs. The
/// topmost agent's own order is always filled by the raw-material source
/// after the lead time. Orders must already be integers in [0, max_order].
StepResult step(const EnvState& state, std::span<const int> orders);

Observation observe(const EnvState& state, int agent_index);

/// One CSV row per (step, agent): step, agent, order, demand, shipped,
/// inventory, backlog and the four cost components plus their total.
std::string trajectory_csv(const EnvState& state);

} // namespace chainsim
