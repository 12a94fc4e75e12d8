#pragma once

#include "chainsim/env.hpp"
#include "chainsim/tools.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chainsim {

enum class Metric { cost, bullwhip };

Metric metric_from_name(const std::string& name);
std::string metric_name(Metric metric);

/// How forcefully the prompt pushes the agent toward the tool output; some
/// models need more insistence than others, so this is per-model config.
enum class ToolDirectiveStrength { standard, emphatic };

ToolDirectiveStrength directive_from_name(const std::string& name);
std::string directive_name(ToolDirectiveStrength strength);

/// Ring buffer of the last `capacity` realized (inventory, backlog, order)
/// triples, one per completed step.
struct AgentMemory {
    int capacity = 10;
    std::deque<MemoryTriple> entries;
};

/// Append the realized triple from a post-step observation, evicting the
/// oldest entry beyond the window.
AgentMemory update_memory(AgentMemory memory, const Observation& obs);

/// Extract the first standalone integer and clamp it to [0, max_order].
/// Returns nullopt when the text contains no integer at all.
std::optional<int> parse_order(const std::string& text, int max_order);

/// Everything rendered into one negotiation turn.
struct NegotiationView {
    int down_index = 0;
    int up_index = 1;
    int counterpart_index = 0;
    bool counterpart_is_upstream = true;
    int range_low = 0;
    int range_high = 0;
    int own_tool_value = 0;
    int counterpart_tool_value = 0;
    std::vector<std::pair<int, std::string>> transcript; // (speaker index, text)
    std::optional<int> own_previous_proposal;
    std::optional<int> counterpart_proposal;
    bool agreement_stage = false;
};

struct PromptInputs {
    EnvConfig env;
    Metric metric = Metric::cost;
    Observation obs;
    std::vector<MemoryTriple> memory;
    std::optional<ToolOutput> tool;
    ToolDirectiveStrength directive = ToolDirectiveStrength::standard;
    std::vector<std::pair<int, std::string>> shared_messages; // (sender index, text)
    std::optional<NegotiationView> negotiation;
};

/// Loads the prompt component files from a directory and assembles them.
/// The assembled prompt always carries the five baseline components in
/// order (setting, objective, observation, memory, question); tool,
/// shared-information and negotiation blocks slot between memory and the
/// final question.
class PromptLibrary {
public:
    explicit PromptLibrary(const std::string& directory);

    std::string system_text() const;
    std::string build_prompt(const PromptInputs& inputs) const;

    /// The structured message an agent shares with its upstream neighbour.
    std::string render_shared_message(const Observation& obs, int tentative_order,
                                      const std::optional<ToolOutput>& tool) const;

    /// Hash over every template file, used to version run digests.
    std::uint64_t content_hash() const { return content_hash_; }
    const std::string& directory() const { return directory_; }

private:
    const std::string& piece(const std::string& name) const;

    std::string directory_;
    std::map<std::string, std::string> pieces_;
    std::uint64_t content_hash_ = 0;
};

/// Substitute {{name}} placeholders; unknown or leftover placeholders raise
/// ConfigError so template typos fail loudly.
std::string substitute_placeholders(const std::string& text,
                                    const std::map<std::string, std::string>& values);

} // namespace chainsim
