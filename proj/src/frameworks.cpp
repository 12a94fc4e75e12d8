#include "chainsim/frameworks.hpp"

#include "chainsim/util.hpp"

#include <algorithm>
#include <fmt/core.h>
#include <nlohmann/json.hpp>
#include <sstream>

namespace chainsim {

FrameworkKind framework_kind_from_name(const std::string& name) {
    if (name == "standalone") return FrameworkKind::standalone;
    if (name == "standalone_tool") return FrameworkKind::standalone_tool;
    if (name == "info_sharing") return FrameworkKind::info_sharing;
    if (name == "info_sharing_tool") return FrameworkKind::info_sharing_tool;
    if (name == "negotiation_tool") return FrameworkKind::negotiation_tool;
    throw ConfigError("unknown framework kind: " + name);
}

std::string framework_kind_name(FrameworkKind kind) {
    switch (kind) {
        case FrameworkKind::standalone: return "standalone";
        case FrameworkKind::standalone_tool: return "standalone_tool";
        case FrameworkKind::info_sharing: return "info_sharing";
        case FrameworkKind::info_sharing_tool: return "info_sharing_tool";
        case FrameworkKind::negotiation_tool: return "negotiation_tool";
    }
    return "standalone";
}

bool FrameworkSpec::uses_tool() const {
    return kind == FrameworkKind::standalone_tool || kind == FrameworkKind::info_sharing_tool ||
           kind == FrameworkKind::negotiation_tool;
}

void FrameworkSpec::validate() const {
    if (num_iter < 1) throw ConfigError("framework: num_iter must be >= 1");
    if (max_attempts < 1) throw ConfigError("framework: max_attempts must be >= 1");
    if (uses_tool() && !tool) {
        throw ConfigError("framework: " + framework_kind_name(kind) + " requires a tool");
    }
    if (!uses_tool() && tool) {
        throw ConfigError("framework: " + framework_kind_name(kind) + " does not take a tool");
    }
}

BackendSet BackendSet::shared(std::shared_ptr<ChatProvider> provider) {
    BackendSet set;
    set.providers.push_back(std::move(provider));
    return set;
}

ChatProvider& BackendSet::for_agent(int agent_index) const {
    if (providers.empty()) throw ConfigError("backend: no provider configured");
    if (providers.size() == 1) return *providers[0];
    if (agent_index < 0 || agent_index >= static_cast<int>(providers.size())) {
        throw ConfigError(fmt::format("backend: no provider for agent {}", agent_index));
    }
    return *providers[static_cast<size_t>(agent_index)];
}

ToolOutput run_tool(ToolId id, const EnvState& state, int agent_index) {
    const auto& history = state.agents[static_cast<size_t>(agent_index)].received_demand_history;
    if (id == ToolId::forecast) {
        return forecast_demand_linreg(history, state.config.max_order);
    }
    return eoq(history, state.config.variable_order_cost, state.config.holding_cost,
               state.config.max_order);
}

namespace {

std::vector<MemoryTriple> memory_entries(const std::vector<AgentMemory>& memories, int agent) {
    if (agent < 0 || agent >= static_cast<int>(memories.size())) return {};
    const auto& entries = memories[static_cast<size_t>(agent)].entries;
    return {entries.begin(), entries.end()};
}

ChatRequest make_request(const DecisionContext& ctx, std::string prompt) {
    ChatRequest request = ctx.request_defaults;
    request.system_text = ctx.prompts.system_text();
    request.messages = {{"user", std::move(prompt)}};
    return request;
}

/// One standalone decision: observe, optionally embed the tool output,
/// query, parse. Shared messages enrich the prompt for final decisions in
/// the information-sharing framework.
RetryResult standalone_query(const FrameworkSpec& spec, const DecisionContext& ctx, int agent,
                             const std::optional<ToolOutput>& tool,
                             std::vector<std::pair<int, std::string>> shared_messages = {}) {
    PromptInputs inputs;
    inputs.env = ctx.state.config;
    inputs.metric = spec.metric;
    inputs.obs = observe(ctx.state, agent);
    inputs.memory = memory_entries(ctx.memories, agent);
    inputs.tool = tool;
    inputs.directive = spec.directive;
    inputs.shared_messages = std::move(shared_messages);

    const int max_order = ctx.state.config.max_order;
    const auto parser = [max_order](const std::string& text) { return parse_order(text, max_order); };
    const std::optional<int> fallback =
        tool ? tool->recommended_order : inputs.obs.last_order;
    return complete_with_retry(ctx.backend.for_agent(agent),
                               make_request(ctx, ctx.prompts.build_prompt(inputs)), parser,
                               spec.max_attempts, fallback);
}

std::vector<std::optional<ToolOutput>> gather_tools(const FrameworkSpec& spec,
                                                    const DecisionContext& ctx) {
    const int n = ctx.state.config.n_agents;
    std::vector<std::optional<ToolOutput>> tools(static_cast<size_t>(n));
    if (spec.uses_tool()) {
        for (int i = 0; i < n; ++i) {
            tools[static_cast<size_t>(i)] = run_tool(*spec.tool, ctx.state, i);
        }
    }
    return tools;
}

void record_tools(StepDecision& decision, const std::vector<std::optional<ToolOutput>>& tools) {
    for (const auto& tool : tools) {
        if (tool) decision.tool_outputs.push_back(*tool);
    }
}

/// Bounded proposal: out-of-range values are clamped to the nearest bound
/// and counted as violations.
int confine(int value, std::pair<int, int> bounds, int& violations) {
    if (value < bounds.first) {
        ++violations;
        return bounds.first;
    }
    if (value > bounds.second) {
        ++violations;
        return bounds.second;
    }
    return value;
}

struct NegotiationTurn {
    int value = 0;
    std::string text;
};

NegotiationTurn negotiation_query(const FrameworkSpec& spec, const DecisionContext& ctx, int agent,
                                  const std::optional<ToolOutput>& tool, const NegotiationView& view,
                                  int& violations) {
    PromptInputs inputs;
    inputs.env = ctx.state.config;
    inputs.metric = spec.metric;
    inputs.obs = observe(ctx.state, agent);
    inputs.memory = memory_entries(ctx.memories, agent);
    inputs.tool = tool;
    inputs.directive = spec.directive;
    inputs.negotiation = view;

    const int max_order = ctx.state.config.max_order;
    const auto parser = [max_order](const std::string& text) { return parse_order(text, max_order); };
    const std::optional<int> fallback = tool ? std::optional<int>(tool->recommended_order)
                                             : std::nullopt;
    const RetryResult result =
        complete_with_retry(ctx.backend.for_agent(agent),
                            make_request(ctx, ctx.prompts.build_prompt(inputs)), parser,
                            spec.max_attempts, fallback);
    NegotiationTurn turn;
    turn.value = confine(result.value, {view.range_low, view.range_high}, violations);
    turn.text = result.response;
    return turn;
}

} // namespace

StepDecision decide_standalone(const FrameworkSpec& spec, const DecisionContext& ctx) {
    spec.validate();
    if (spec.kind != FrameworkKind::standalone && spec.kind != FrameworkKind::standalone_tool) {
        throw ConfigError("decide_standalone: wrong framework kind");
    }
    const int n = ctx.state.config.n_agents;
    const auto tools = gather_tools(spec, ctx);

    StepDecision decision;
    record_tools(decision, tools);
    for (int i = 0; i < n; ++i) {
        const auto result = standalone_query(spec, ctx, i, tools[static_cast<size_t>(i)]);
        decision.final_orders.push_back(result.value);
    }
    decision.tentative_orders = decision.final_orders;
    return decision;
}

StepDecision decide_info_sharing(const FrameworkSpec& spec, const DecisionContext& ctx) {
    spec.validate();
    if (spec.kind != FrameworkKind::info_sharing && spec.kind != FrameworkKind::info_sharing_tool) {
        throw ConfigError("decide_info_sharing: wrong framework kind");
    }
    const int n = ctx.state.config.n_agents;
    const auto tools = gather_tools(spec, ctx);

    StepDecision decision;
    record_tools(decision, tools);

    for (int i = 0; i < n; ++i) {
        const auto result = standalone_query(spec, ctx, i, tools[static_cast<size_t>(i)]);
        decision.tentative_orders.push_back(result.value);
    }

    // Pairs run downstream to upstream: each agent composes one structured
    // message about its own local state for its upstream neighbour, so an
    // intermediate agent has received from below before it sends above.
    std::vector<std::optional<std::pair<int, std::string>>> received(static_cast<size_t>(n));
    for (int down = 0; down + 1 < n; ++down) {
        const Observation obs = observe(ctx.state, down);
        const std::string text = ctx.prompts.render_shared_message(
            obs, decision.tentative_orders[static_cast<size_t>(down)],
            tools[static_cast<size_t>(down)]);
        Conversation conversation;
        conversation.pair = {down, down + 1};
        conversation.messages.push_back(ConversationMessage{down, 0, text, std::nullopt});
        decision.conversations.push_back(std::move(conversation));
        received[static_cast<size_t>(down + 1)] = std::make_pair(down, text);
    }

    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, std::string>> shared;
        if (received[static_cast<size_t>(i)]) shared.push_back(*received[static_cast<size_t>(i)]);
        const auto result =
            standalone_query(spec, ctx, i, tools[static_cast<size_t>(i)], std::move(shared));
        decision.final_orders.push_back(result.value);
    }
    return decision;
}

StepDecision decide_negotiation(const FrameworkSpec& spec, const DecisionContext& ctx) {
    spec.validate();
    if (spec.kind != FrameworkKind::negotiation_tool) {
        throw ConfigError("decide_negotiation: wrong framework kind");
    }
    const int n = ctx.state.config.n_agents;
    const auto tools = gather_tools(spec, ctx);

    StepDecision decision;
    record_tools(decision, tools);
    for (int i = 0; i < n; ++i) {
        const auto result = standalone_query(spec, ctx, i, tools[static_cast<size_t>(i)]);
        decision.tentative_orders.push_back(result.value);
    }
    decision.final_orders.assign(static_cast<size_t>(n), 0);

    for (int down = 0; down + 1 < n; ++down) {
        const int up = down + 1;
        const int down_tool = tools[static_cast<size_t>(down)]->recommended_order;
        const int up_tool = tools[static_cast<size_t>(up)]->recommended_order;
        const std::pair<int, int> bounds{std::min(down_tool, up_tool), std::max(down_tool, up_tool)};

        Conversation conversation;
        conversation.pair = {down, up};
        conversation.bounds = bounds;

        std::optional<int> down_proposal;
        std::optional<int> up_proposal;
        auto make_view = [&](int agent, bool agreement) {
            NegotiationView view;
            view.down_index = down;
            view.up_index = up;
            const bool is_down = agent == down;
            view.counterpart_index = is_down ? up : down;
            view.counterpart_is_upstream = is_down;
            view.range_low = bounds.first;
            view.range_high = bounds.second;
            view.own_tool_value = is_down ? down_tool : up_tool;
            view.counterpart_tool_value = is_down ? up_tool : down_tool;
            for (const auto& message : conversation.messages) {
                view.transcript.emplace_back(message.speaker, message.text);
            }
            view.own_previous_proposal = is_down ? down_proposal : up_proposal;
            view.counterpart_proposal = is_down ? up_proposal : down_proposal;
            view.agreement_stage = agreement;
            return view;
        };

        // The downstream agent opens every pass; num_iter passes precede the
        // agreement stage.
        for (int round = 0; round < spec.num_iter; ++round) {
            for (const int agent : {down, up}) {
                const auto turn =
                    negotiation_query(spec, ctx, agent, tools[static_cast<size_t>(agent)],
                                      make_view(agent, false), decision.bound_violations);
                conversation.messages.push_back(
                    ConversationMessage{agent, round, turn.text, turn.value});
                (agent == down ? down_proposal : up_proposal) = turn.value;
            }
        }

        // Agreement stage: both parties name a definitive amount. The
        // downstream agent places the order, so its amount is executed; the
        // upstream amount is kept for analysis.
        const auto down_final =
            negotiation_query(spec, ctx, down, tools[static_cast<size_t>(down)],
                              make_view(down, true), decision.bound_violations);
        conversation.messages.push_back(
            ConversationMessage{down, spec.num_iter, down_final.text, down_final.value});
        down_proposal = down_final.value;
        const auto up_final =
            negotiation_query(spec, ctx, up, tools[static_cast<size_t>(up)], make_view(up, true),
                              decision.bound_violations);
        conversation.messages.push_back(
            ConversationMessage{up, spec.num_iter, up_final.text, up_final.value});

        conversation.agreement = std::make_pair(down_final.value, up_final.value);
        decision.final_orders[static_cast<size_t>(down)] = down_final.value;
        if (up == n - 1) {
            // The topmost agent has no pair of its own; it orders the amount
            // it committed to as the upstream party.
            decision.final_orders[static_cast<size_t>(up)] = up_final.value;
        }
        decision.conversations.push_back(std::move(conversation));
    }
    return decision;
}

StepDecision decide(const FrameworkSpec& spec, const DecisionContext& ctx) {
    switch (spec.kind) {
        case FrameworkKind::standalone:
        case FrameworkKind::standalone_tool:
            return decide_standalone(spec, ctx);
        case FrameworkKind::info_sharing:
        case FrameworkKind::info_sharing_tool:
            return decide_info_sharing(spec, ctx);
        case FrameworkKind::negotiation_tool:
            return decide_negotiation(spec, ctx);
    }
    throw ConfigError("decide: unknown framework kind");
}

StepDecision decide_policy(const PolicySpec& spec, const EnvState& state) {
    spec.validate(state.config.max_order);
    const int n = state.config.n_agents;
    StepDecision decision;
    for (int i = 0; i < n; ++i) {
        const Observation obs = observe(state, i);
        int order = 0;
        if (spec.kind == PolicyKind::ss_policy) {
            order = ss_policy_decide(obs, spec.order_up_to, spec.reorder_point,
                                     state.config.max_order, spec.position_mode);
        } else {
            const ToolOutput tool = run_tool(spec.tool_id, state, i);
            decision.tool_outputs.push_back(tool);
            order = tool_agent_decide(obs, tool);
        }
        decision.final_orders.push_back(order);
    }
    decision.tentative_orders = decision.final_orders;
    return decision;
}

std::string TranscriptEntry::to_json_line() const {
    nlohmann::ordered_json j;
    j["step"] = step;
    j["pair"] = {pair.first, pair.second};
    j["round"] = round;
    j["speaker"] = speaker;
    j["text"] = text;
    if (parsed_value) j["parsed_value"] = *parsed_value; else j["parsed_value"] = nullptr;
    return j.dump();
}

EpisodeResult run_episode(const DecisionSpec& spec, const EnvConfig& env_config,
                          const DemandTrace& trace, const BackendSet& backend,
                          const PromptLibrary* prompts, const EpisodeOptions& options) {
    EpisodeResult result;
    if (env_config.horizon == 0) {
        // Nothing to simulate; still validate the rest of the configuration.
        EnvConfig probe = env_config;
        probe.horizon = 1;
        probe.validate();
        result.metrics = compute_report({}, std::vector<std::vector<int>>(
                                                static_cast<size_t>(env_config.n_agents)),
                                        0);
        return result;
    }

    if (const auto* framework = std::get_if<FrameworkSpec>(&spec)) {
        framework->validate();
        if (backend.empty()) throw ConfigError("run_episode: framework needs a provider");
        if (prompts == nullptr) throw ConfigError("run_episode: framework needs templates");
    }

    EnvState state = reset(env_config, trace);
    std::vector<AgentMemory> memories(static_cast<size_t>(env_config.n_agents),
                                      AgentMemory{env_config.memory_window, {}});

    auto emit = [&](const StepDecision& decision, int step_index) {
        for (const auto& conversation : decision.conversations) {
            for (const auto& message : conversation.messages) {
                TranscriptEntry entry;
                entry.step = step_index;
                entry.pair = conversation.pair;
                entry.round = message.round;
                entry.speaker = message.speaker;
                entry.text = message.text;
                entry.parsed_value = message.parsed_value;
                if (options.transcript_sink) options.transcript_sink(entry);
                result.transcript.push_back(std::move(entry));
            }
        }
    };

    for (int t = 0; t < env_config.horizon; ++t) {
        StepDecision decision;
        if (const auto* framework = std::get_if<FrameworkSpec>(&spec)) {
            DecisionContext ctx{state, *prompts, backend, memories, options.request_defaults};
            decision = decide(*framework, ctx);
        } else {
            decision = decide_policy(std::get<PolicySpec>(spec), state);
        }
        emit(decision, t);

        StepResult stepped = step(state, decision.final_orders);
        for (int i = 0; i < env_config.n_agents; ++i) {
            memories[static_cast<size_t>(i)] = update_memory(memories[static_cast<size_t>(i)],
                                                             stepped.observations[static_cast<size_t>(i)]);
        }
        result.decisions.push_back(std::move(decision));
        state = std::move(stepped.state);
    }

    std::vector<std::vector<int>> order_histories;
    order_histories.reserve(state.agents.size());
    for (const auto& agent : state.agents) order_histories.push_back(agent.order_history);
    const int warmup = options.metrics_warmup >= 0 ? options.metrics_warmup : env_config.lead_time;
    result.metrics = compute_report(state.total_cost_matrix(), order_histories, warmup);
    result.final_state = std::move(state);
    return result;
}

std::string decisions_csv(const std::vector<StepDecision>& decisions) {
    std::ostringstream out;
    out << "step,agent,tentative_order,tool_order,final_order\n";
    for (size_t t = 0; t < decisions.size(); ++t) {
        const StepDecision& d = decisions[t];
        for (size_t i = 0; i < d.final_orders.size(); ++i) {
            std::string tool_value;
            if (i < d.tool_outputs.size()) {
                tool_value = std::to_string(d.tool_outputs[i].recommended_order);
            }
            const std::string tentative =
                i < d.tentative_orders.size() ? std::to_string(d.tentative_orders[i]) : "";
            out << fmt::format("{},{},{},{},{}\n", t, i, tentative, tool_value, d.final_orders[i]);
        }
    }
    return out.str();
}

} // namespace chainsim
