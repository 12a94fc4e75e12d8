#include "chainsim/prompt.hpp"

#include "chainsim/util.hpp"

#include <fmt/core.h>
#include <fstream>
#include <sstream>

namespace chainsim {

Metric metric_from_name(const std::string& name) {
    if (name == "cost") return Metric::cost;
    if (name == "bullwhip") return Metric::bullwhip;
    throw ConfigError("unknown metric: " + name);
}

std::string metric_name(Metric metric) {
    return metric == Metric::cost ? "cost" : "bullwhip";
}

ToolDirectiveStrength directive_from_name(const std::string& name) {
    if (name == "standard") return ToolDirectiveStrength::standard;
    if (name == "emphatic") return ToolDirectiveStrength::emphatic;
    throw ConfigError("unknown tool directive strength: " + name);
}

std::string directive_name(ToolDirectiveStrength strength) {
    return strength == ToolDirectiveStrength::standard ? "standard" : "emphatic";
}

AgentMemory update_memory(AgentMemory memory, const Observation& obs) {
    memory.entries.push_back(MemoryTriple{obs.inventory, obs.backlog, obs.last_order});
    while (static_cast<int>(memory.entries.size()) > memory.capacity) {
        memory.entries.pop_front();
    }
    return memory;
}

std::optional<int> parse_order(const std::string& text, int max_order) {
    long long value = 0;
    if (!find_first_integer(text, value)) return std::nullopt;
    if (value < 0) return 0;
    if (value > max_order) return max_order;
    return static_cast<int>(value);
}

std::string substitute_placeholders(const std::string& text,
                                    const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        const size_t open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        const size_t close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            throw ConfigError("template: unterminated placeholder near: " + text.substr(open, 24));
        }
        const std::string key = text.substr(open + 2, close - open - 2);
        const auto it = values.find(key);
        if (it == values.end()) {
            throw ConfigError("template: no value for placeholder {{" + key + "}}");
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

namespace {

const char* kPieceFiles[] = {
    "system",
    "setting",
    "objective_cost",
    "objective_bullwhip",
    "observation",
    "memory",
    "tool_directive_standard",
    "tool_directive_emphatic",
    "shared_info",
    "shared_message",
    "negotiation_round",
    "negotiation_agreement",
    "question_cost",
    "question_bullwhip",
    "question_negotiation",
    "question_agreement",
};

std::string format_number(double value) {
    return fmt::format("{}", value);
}

std::string render_deliveries(const std::vector<PipelineEntry>& entries) {
    if (entries.empty()) return "(none)";
    std::string out;
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i > 0) out += ", ";
        out += fmt::format("period {}: {}", entries[i].arrival_step, entries[i].quantity);
    }
    return out;
}

std::string render_memory_rows(const std::vector<MemoryTriple>& memory, int current_step) {
    if (memory.empty()) return "(no completed periods yet)";
    std::string out;
    const int first_period = current_step - static_cast<int>(memory.size());
    for (size_t i = 0; i < memory.size(); ++i) {
        if (i > 0) out += "\n";
        out += fmt::format("period {}: inventory={}, backlog={}, order={}",
                           first_period + static_cast<int>(i), memory[i].inventory,
                           memory[i].backlog, memory[i].order);
    }
    return out;
}

std::string render_transcript(const std::vector<std::pair<int, std::string>>& transcript) {
    if (transcript.empty()) return "(no messages yet)";
    std::string out;
    for (size_t i = 0; i < transcript.size(); ++i) {
        if (i > 0) out += "\n";
        out += fmt::format("echelon {}: {}", transcript[i].first, transcript[i].second);
    }
    return out;
}

} // namespace

PromptLibrary::PromptLibrary(const std::string& directory) : directory_(directory) {
    std::string combined;
    for (const char* name : kPieceFiles) {
        const std::string path = directory + "/" + name + ".txt";
        std::ifstream in(path);
        if (!in) throw ConfigError("templates: missing " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        combined += name;
        combined += '\x1f';
        combined += text;
        combined += '\x1e';
        pieces_[name] = std::move(text);
    }
    content_hash_ = fnv1a64(combined);
}

const std::string& PromptLibrary::piece(const std::string& name) const {
    const auto it = pieces_.find(name);
    if (it == pieces_.end()) throw ConfigError("templates: unknown piece " + name);
    return it->second;
}

std::string PromptLibrary::system_text() const {
    return piece("system");
}

std::string PromptLibrary::build_prompt(const PromptInputs& inputs) const {
    if (!inputs.shared_messages.empty() && inputs.negotiation) {
        throw ConfigError("build_prompt: shared-info and negotiation blocks are exclusive");
    }
    const EnvConfig& env = inputs.env;
    const Observation& obs = inputs.obs;

    std::map<std::string, std::string> values;
    values["agent_index"] = std::to_string(obs.agent_index);
    values["n_agents"] = std::to_string(env.n_agents);
    values["top_index"] = std::to_string(env.n_agents - 1);
    values["lead_time"] = std::to_string(env.lead_time);
    values["max_order"] = std::to_string(env.max_order);
    values["holding_cost"] = format_number(env.holding_cost);
    values["backlog_cost"] = format_number(env.backlog_cost);
    values["variable_order_cost"] = format_number(env.variable_order_cost);
    values["fixed_order_cost"] = format_number(env.fixed_order_cost);
    values["step"] = std::to_string(obs.step);
    values["inventory"] = std::to_string(obs.inventory);
    values["backlog"] = std::to_string(obs.backlog);
    values["last_order"] = std::to_string(obs.last_order);
    values["incoming_deliveries"] = render_deliveries(obs.incoming_deliveries);
    values["downstream_demand"] = std::to_string(obs.downstream_demand);
    values["memory_window"] = std::to_string(env.memory_window);
    values["memory_rows"] = render_memory_rows(inputs.memory, obs.step);

    std::vector<std::string> blocks;
    blocks.push_back(substitute_placeholders(piece("setting"), values));
    blocks.push_back(substitute_placeholders(
        piece(inputs.metric == Metric::cost ? "objective_cost" : "objective_bullwhip"), values));
    blocks.push_back(substitute_placeholders(piece("observation"), values));
    blocks.push_back(substitute_placeholders(piece("memory"), values));

    if (inputs.tool) {
        auto tool_values = values;
        tool_values["tool_name"] = tool_id_name(inputs.tool->tool_id);
        tool_values["tool_digest"] = inputs.tool->inputs_digest;
        tool_values["tool_value"] = std::to_string(inputs.tool->recommended_order);
        const char* name = inputs.directive == ToolDirectiveStrength::standard
                               ? "tool_directive_standard"
                               : "tool_directive_emphatic";
        blocks.push_back(substitute_placeholders(piece(name), tool_values));
    }

    if (!inputs.shared_messages.empty()) {
        std::string rendered;
        for (size_t i = 0; i < inputs.shared_messages.size(); ++i) {
            if (i > 0) rendered += "\n";
            const auto& [sender, text] = inputs.shared_messages[i];
            const char* relation = sender < obs.agent_index ? "downstream" : "upstream";
            rendered += fmt::format("From echelon {} (your {} neighbour): \"{}\"", sender, relation,
                                    text);
        }
        auto info_values = values;
        info_values["messages"] = rendered;
        blocks.push_back(substitute_placeholders(piece("shared_info"), info_values));
    }

    std::string question_piece = inputs.metric == Metric::cost ? "question_cost" : "question_bullwhip";
    if (inputs.negotiation) {
        const NegotiationView& neg = *inputs.negotiation;
        auto neg_values = values;
        neg_values["down_index"] = std::to_string(neg.down_index);
        neg_values["up_index"] = std::to_string(neg.up_index);
        neg_values["counterpart_index"] = std::to_string(neg.counterpart_index);
        neg_values["counterpart_role"] =
            neg.counterpart_is_upstream ? "upstream supplier" : "downstream customer";
        neg_values["range_low"] = std::to_string(neg.range_low);
        neg_values["range_high"] = std::to_string(neg.range_high);
        neg_values["own_tool_value"] = std::to_string(neg.own_tool_value);
        neg_values["counterpart_tool_value"] = std::to_string(neg.counterpart_tool_value);
        neg_values["transcript"] = render_transcript(neg.transcript);
        std::string proposal_lines;
        if (neg.own_previous_proposal) {
            proposal_lines += fmt::format("YOUR PREVIOUS PROPOSAL: {}", *neg.own_previous_proposal);
        }
        if (neg.counterpart_proposal) {
            if (!proposal_lines.empty()) proposal_lines += "\n";
            proposal_lines += fmt::format("COUNTERPART PROPOSAL: {}", *neg.counterpart_proposal);
        }
        if (proposal_lines.empty()) {
            proposal_lines = "(no proposals yet; you open the negotiation)";
        }
        neg_values["proposal_lines"] = proposal_lines;
        blocks.push_back(substitute_placeholders(
            piece(neg.agreement_stage ? "negotiation_agreement" : "negotiation_round"), neg_values));
        question_piece = neg.agreement_stage ? "question_agreement" : "question_negotiation";
        values["range_low"] = neg_values["range_low"];
        values["range_high"] = neg_values["range_high"];
    }

    blocks.push_back(substitute_placeholders(piece(question_piece), values));

    std::string prompt;
    for (size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) prompt += "\n\n";
        prompt += blocks[i];
    }
    return prompt;
}

std::string PromptLibrary::render_shared_message(const Observation& obs, int tentative_order,
                                                 const std::optional<ToolOutput>& tool) const {
    std::map<std::string, std::string> values;
    values["inventory"] = std::to_string(obs.inventory);
    values["backlog"] = std::to_string(obs.backlog);
    values["downstream_demand"] = std::to_string(obs.downstream_demand);
    values["tentative_order"] = std::to_string(tentative_order);
    values["tool_sentence"] =
        tool ? fmt::format(" My decision-support tool suggests ordering {} units.",
                           tool->recommended_order)
             : "";
    return substitute_placeholders(piece("shared_message"), values);
}

} // namespace chainsim
