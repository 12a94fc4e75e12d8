#include "chainsim/env.hpp"

#include "chainsim/util.hpp"

#include <algorithm>
#include <fmt/core.h>
#include <sstream>

namespace chainsim {

void EnvConfig::validate() const {
    if (n_agents < 2) throw ConfigError("env: n_agents must be >= 2");
    if (lead_time < 0) throw ConfigError("env: lead_time must be >= 0");
    if (max_order < 1) throw ConfigError("env: max_order must be >= 1");
    if (horizon < 1) throw ConfigError("env: horizon must be >= 1");
    if (initial_inventory < 0) throw ConfigError("env: initial_inventory must be >= 0");
    if (memory_window < 1) throw ConfigError("env: memory_window must be >= 1");
    for (double c : {holding_cost, backlog_cost, variable_order_cost, fixed_order_cost}) {
        if (c < 0.0) throw ConfigError("env: costs must be >= 0");
    }
}

int AgentState::pipeline_total() const {
    int total = 0;
    for (const auto& entry : pipeline) total += entry.quantity;
    return total;
}

std::vector<std::vector<double>> EnvState::total_cost_matrix() const {
    std::vector<std::vector<double>> matrix;
    matrix.reserve(cost_ledger.size());
    for (const auto& row : cost_ledger) {
        std::vector<double> totals;
        totals.reserve(row.size());
        for (const auto& cell : row) totals.push_back(cell.total);
        matrix.push_back(std::move(totals));
    }
    return matrix;
}

StepCosts compute_step_costs(const EnvConfig& config, int inventory, int backlog, int order) {
    StepCosts costs;
    costs.inventory_cost = config.holding_cost * inventory;
    costs.backlog_cost = config.backlog_cost * backlog;
    costs.variable_order_cost = config.variable_order_cost * order;
    costs.fixed_order_cost = order > 0 ? config.fixed_order_cost : 0.0;
    costs.total = costs.inventory_cost + costs.backlog_cost + costs.variable_order_cost +
                  costs.fixed_order_cost;
    return costs;
}

EnvState reset(const EnvConfig& config, const DemandTrace& trace) {
    config.validate();
    if (trace.length() < static_cast<size_t>(config.horizon)) {
        throw ConfigError(fmt::format("reset: trace length {} shorter than horizon {}",
                                      trace.length(), config.horizon));
    }
    EnvState state;
    state.step = 0;
    state.config = config;
    state.demand_trace = trace;
    state.agents.resize(static_cast<size_t>(config.n_agents));
    for (auto& agent : state.agents) {
        agent.inventory = config.initial_inventory;
        agent.backlog = 0;
    }
    return state;
}

StepResult step(const EnvState& state, std::span<const int> orders) {
    const EnvConfig& config = state.config;
    const int n = config.n_agents;
    if (orders.size() != static_cast<size_t>(n)) {
        throw ConfigError(fmt::format("step: expected {} orders, got {}", n, orders.size()));
    }
    for (int order : orders) {
        if (order < 0 || order > config.max_order) {
            throw ConfigError(fmt::format("step: order {} outside [0, {}]", order, config.max_order));
        }
    }
    if (state.step >= config.horizon) {
        throw ConfigError("step: horizon exhausted");
    }

    StepResult result;
    result.state = state;
    EnvState& next = result.state;
    const int now = state.step;

    // 1. Deliveries due this step arrive.
    for (auto& agent : next.agents) {
        int delivered = 0;
        auto& pipeline = agent.pipeline;
        auto it = pipeline.begin();
        while (it != pipeline.end()) {
            if (it->arrival_step <= now) {
                delivered += it->quantity;
                it = pipeline.erase(it);
            } else {
                ++it;
            }
        }
        agent.inventory += delivered;
    }

    // 2. Demand perception, 3. shipping. Agent i's demand is the order placed
    // by agent i-1 this step; agent 0 serves the customer trace. Backlogged
    // demand ships as soon as inventory allows.
    std::vector<int> demand(static_cast<size_t>(n), 0);
    std::vector<int> shipped(static_cast<size_t>(n), 0);
    // With a zero lead time goods are received the same period, after the
    // receiver has already shipped; otherwise they enter the pipeline.
    auto send_downstream = [&](int recipient, int quantity) {
        if (quantity == 0) return;
        if (config.lead_time == 0) {
            next.agents[static_cast<size_t>(recipient)].inventory += quantity;
        } else {
            next.agents[static_cast<size_t>(recipient)].pipeline.push_back(
                PipelineEntry{now + config.lead_time, quantity});
        }
    };
    for (int i = 0; i < n; ++i) {
        auto& agent = next.agents[static_cast<size_t>(i)];
        demand[static_cast<size_t>(i)] =
            i == 0 ? state.demand_trace.values[static_cast<size_t>(now)]
                   : orders[static_cast<size_t>(i - 1)];
        const int owed = demand[static_cast<size_t>(i)] + agent.backlog;
        const int out = std::min(agent.inventory, owed);
        agent.inventory -= out;
        agent.backlog = owed - out;
        shipped[static_cast<size_t>(i)] = out;
        // Material flows downstream; agent 0's shipment is consumed
        // immediately by the customer.
        if (i > 0) send_downstream(i - 1, out);
    }

    // 4. The topmost agent's order is always filled by the raw-material source.
    send_downstream(n - 1, orders[static_cast<size_t>(n - 1)]);

    // 5. Cost accounting on end-of-step levels, 6. histories and step counter.
    result.costs.reserve(static_cast<size_t>(n));
    std::vector<StepCosts> ledger_row;
    ledger_row.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& agent = next.agents[static_cast<size_t>(i)];
        const int order = orders[static_cast<size_t>(i)];
        const StepCosts costs = compute_step_costs(config, agent.inventory, agent.backlog, order);
        result.costs.push_back(costs);
        ledger_row.push_back(costs);
        agent.order_history.push_back(order);
        agent.received_demand_history.push_back(demand[static_cast<size_t>(i)]);
        agent.shipped_history.push_back(shipped[static_cast<size_t>(i)]);
        agent.inventory_history.push_back(agent.inventory);
        agent.backlog_history.push_back(agent.backlog);
    }
    next.cost_ledger.push_back(std::move(ledger_row));
    next.step = now + 1;

    result.observations.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        result.observations.push_back(observe(next, i));
    }
    return result;
}

Observation observe(const EnvState& state, int agent_index) {
    const int n = state.config.n_agents;
    if (agent_index < 0 || agent_index >= n) {
        throw ConfigError(fmt::format("observe: agent index {} outside [0, {})", agent_index, n));
    }
    const AgentState& agent = state.agents[static_cast<size_t>(agent_index)];

    Observation obs;
    obs.agent_index = agent_index;
    obs.step = state.step;
    obs.inventory = agent.inventory;
    obs.backlog = agent.backlog;
    obs.last_order = agent.order_history.empty() ? 0 : agent.order_history.back();
    obs.incoming_deliveries = agent.pipeline;
    if (agent_index == 0) {
        const auto& values = state.demand_trace.values;
        obs.downstream_demand =
            state.step < static_cast<int>(values.size()) ? values[static_cast<size_t>(state.step)] : 0;
    } else {
        // Upstream agents only learn a downstream order once it has been
        // placed, so at decision time they see the latest received demand.
        obs.downstream_demand = agent.received_demand_history.empty()
                                    ? 0
                                    : agent.received_demand_history.back();
    }

    const size_t completed = agent.order_history.size();
    const size_t window = std::min(completed, static_cast<size_t>(state.config.memory_window));
    obs.memory_window.reserve(window);
    for (size_t s = completed - window; s < completed; ++s) {
        obs.memory_window.push_back(MemoryTriple{agent.inventory_history[s],
                                                 agent.backlog_history[s],
                                                 agent.order_history[s]});
    }
    return obs;
}

std::string trajectory_csv(const EnvState& state) {
    std::ostringstream out;
    out << "step,agent,order,demand,shipped,inventory,backlog,"
           "cost_inventory,cost_backlog,cost_variable,cost_fixed,cost_total\n";
    const size_t steps = state.cost_ledger.size();
    for (size_t t = 0; t < steps; ++t) {
        for (size_t i = 0; i < state.agents.size(); ++i) {
            const AgentState& agent = state.agents[i];
            const StepCosts& costs = state.cost_ledger[t][i];
            out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", t, i,
                               agent.order_history[t], agent.received_demand_history[t],
                               agent.shipped_history[t], agent.inventory_history[t],
                               agent.backlog_history[t], costs.inventory_cost, costs.backlog_cost,
                               costs.variable_order_cost, costs.fixed_order_cost, costs.total);
        }
    }
    return out.str();
}

} // namespace chainsim
