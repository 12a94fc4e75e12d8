#pragma once

#include "chainsim/env.hpp"
#include "chainsim/llm.hpp"
#include "chainsim/metrics.hpp"
#include "chainsim/policies.hpp"
#include "chainsim/prompt.hpp"
#include "chainsim/tools.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace chainsim {

enum class FrameworkKind {
    standalone,
    standalone_tool,
    info_sharing,
    info_sharing_tool,
    negotiation_tool,
};

FrameworkKind framework_kind_from_name(const std::string& name);
std::string framework_kind_name(FrameworkKind kind);

struct FrameworkSpec {
    FrameworkKind kind = FrameworkKind::standalone;
    int num_iter = 3; // full back-and-forth passes before the agreement stage
    Metric metric = Metric::cost;
    std::optional<ToolId> tool;
    ToolDirectiveStrength directive = ToolDirectiveStrength::standard;
    int max_attempts = 3;

    bool uses_tool() const;
    void validate() const;
};

struct ConversationMessage {
    int speaker = 0; // agent index
    int round = 0;   // proposal pass; the agreement stage uses num_iter
    std::string text;
    std::optional<int> parsed_value;
};

/// Ordered transcript for one adjacent pair in one step. Messages alternate
/// speakers and the downstream agent always opens.
struct Conversation {
    std::pair<int, int> pair{0, 1}; // (downstream, upstream)
    std::vector<ConversationMessage> messages;
    std::optional<std::pair<int, int>> bounds;    // negotiation only
    std::optional<std::pair<int, int>> agreement; // (downstream_final, upstream_final)
};

struct StepDecision {
    std::vector<int> tentative_orders;
    std::vector<int> final_orders;
    std::vector<Conversation> conversations;
    std::vector<ToolOutput> tool_outputs;
    int bound_violations = 0; // out-of-range proposals clamped to the nearest bound
};

/// One provider shared by every agent, or one per agent.
struct BackendSet {
    std::vector<std::shared_ptr<ChatProvider>> providers;

    static BackendSet shared(std::shared_ptr<ChatProvider> provider);
    ChatProvider& for_agent(int agent_index) const;
    bool empty() const { return providers.empty(); }
};

struct DecisionContext {
    const EnvState& state;
    const PromptLibrary& prompts;
    const BackendSet& backend;
    const std::vector<AgentMemory>& memories;
    ChatRequest request_defaults; // model_id, temperature, max_output_tokens
};

StepDecision decide_standalone(const FrameworkSpec& spec, const DecisionContext& ctx);
StepDecision decide_info_sharing(const FrameworkSpec& spec, const DecisionContext& ctx);
StepDecision decide_negotiation(const FrameworkSpec& spec, const DecisionContext& ctx);
StepDecision decide(const FrameworkSpec& spec, const DecisionContext& ctx);

StepDecision decide_policy(const PolicySpec& spec, const EnvState& state);

/// Run the metric-appropriate tool on the agent's received-demand history.
ToolOutput run_tool(ToolId id, const EnvState& state, int agent_index);

using DecisionSpec = std::variant<FrameworkSpec, PolicySpec>;

struct TranscriptEntry {
    int step = 0;
    std::pair<int, int> pair{0, 0};
    int round = 0;
    int speaker = 0;
    std::string text;
    std::optional<int> parsed_value;

    std::string to_json_line() const;
};

struct EpisodeOptions {
    int metrics_warmup = -1; // negative selects the lead time
    ChatRequest request_defaults;
    std::function<void(const TranscriptEntry&)> transcript_sink;
};

struct EpisodeResult {
    EnvState final_state;
    std::vector<StepDecision> decisions;
    std::vector<TranscriptEntry> transcript;
    MetricsReport metrics;
};

/// Horizon steps of decide -> step, with per-agent memories maintained from
/// post-step observations and transcripts retained for audit.
EpisodeResult run_episode(const DecisionSpec& spec, const EnvConfig& env_config,
                          const DemandTrace& trace, const BackendSet& backend,
                          const PromptLibrary* prompts, const EpisodeOptions& options = {});

/// Per-step decision summary: step, agent, tentative, tool and final orders.
std::string decisions_csv(const std::vector<StepDecision>& decisions);

} // namespace chainsim
