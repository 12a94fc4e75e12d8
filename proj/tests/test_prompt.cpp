#include "chainsim/prompt.hpp"

#include "chainsim/llm.hpp"
#include "chainsim/util.hpp"

#include <doctest.h>

using namespace chainsim;

namespace {

const PromptLibrary& library() {
    static PromptLibrary instance(std::string(CHAINSIM_SOURCE_DIR) + "/templates");
    return instance;
}

PromptInputs base_inputs() {
    PromptInputs inputs;
    inputs.env = EnvConfig{};
    inputs.metric = Metric::cost;
    inputs.obs.agent_index = 1;
    inputs.obs.step = 5;
    inputs.obs.inventory = 12;
    inputs.obs.backlog = 3;
    inputs.obs.last_order = 8;
    inputs.obs.downstream_demand = 6;
    inputs.obs.incoming_deliveries = {{6, 4}};
    inputs.memory = {{15, 0, 7}, {12, 3, 8}};
    return inputs;
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

} // namespace

TEST_CASE("placeholder substitution") {
    CHECK(substitute_placeholders("a {{x}} b {{y}}", {{"x", "1"}, {"y", "2"}}) == "a 1 b 2");
    CHECK_THROWS_AS(substitute_placeholders("{{missing}}", {}), ConfigError);
    CHECK_THROWS_AS(substitute_placeholders("{{unterminated", {}), ConfigError);
    CHECK(substitute_placeholders("no placeholders", {}) == "no placeholders");
}

TEST_CASE("prompts without a tool carry no tool marker") {
    const std::string prompt = library().build_prompt(base_inputs());
    CHECK(count_occurrences(prompt, "TOOL RECOMMENDATION") == 0);
}

TEST_CASE("tool prompts carry the marker exactly once") {
    PromptInputs inputs = base_inputs();
    ToolOutput tool;
    tool.tool_id = ToolId::forecast;
    tool.recommended_order = 10;
    tool.inputs_digest = "linreg(points=5, window=30)";
    inputs.tool = tool;
    const std::string prompt = library().build_prompt(inputs);
    CHECK(count_occurrences(prompt, "TOOL RECOMMENDATION: 10") == 1);
    CHECK(count_occurrences(prompt, "TOOL RECOMMENDATION") == 1);
}

TEST_CASE("prompt construction is deterministic") {
    PromptInputs inputs = base_inputs();
    CHECK(library().build_prompt(inputs) == library().build_prompt(inputs));
}

TEST_CASE("the five baseline components appear in order") {
    const std::string prompt = library().build_prompt(base_inputs());
    const size_t setting = prompt.find("You manage echelon 1");
    const size_t objective = prompt.find("Your goal is to minimise the cumulative cost");
    const size_t observation = prompt.find("Your current situation in period 5");
    const size_t memory = prompt.find("Your recent history");
    const size_t question = prompt.find("How many units do you order");
    REQUIRE(setting != std::string::npos);
    REQUIRE(objective != std::string::npos);
    REQUIRE(observation != std::string::npos);
    REQUIRE(memory != std::string::npos);
    REQUIRE(question != std::string::npos);
    CHECK(setting < objective);
    CHECK(objective < observation);
    CHECK(observation < memory);
    CHECK(memory < question);

    // optional blocks sit between memory and the question
    PromptInputs with_tool = base_inputs();
    with_tool.tool = ToolOutput{ToolId::forecast, 9, "d"};
    const std::string tool_prompt = library().build_prompt(with_tool);
    const size_t tool_pos = tool_prompt.find("TOOL RECOMMENDATION");
    CHECK(tool_pos > tool_prompt.find("Your recent history"));
    CHECK(tool_pos < tool_prompt.find("How many units do you order"));
}

TEST_CASE("metric changes only objective and question blocks") {
    PromptInputs cost_inputs = base_inputs();
    PromptInputs bullwhip_inputs = base_inputs();
    bullwhip_inputs.metric = Metric::bullwhip;
    const std::string cost_prompt = library().build_prompt(cost_inputs);
    const std::string bullwhip_prompt = library().build_prompt(bullwhip_inputs);
    CHECK(cost_prompt != bullwhip_prompt);

    // shared blocks are identical: compare the segment between the end of the
    // objective block and the question block
    const std::string observation_header = "Your current situation";
    const std::string question_cost = "How many units do you order";
    const std::string middle_cost = cost_prompt.substr(
        cost_prompt.find(observation_header),
        cost_prompt.find(question_cost) - cost_prompt.find(observation_header));
    const std::string middle_bw = bullwhip_prompt.substr(
        bullwhip_prompt.find(observation_header),
        bullwhip_prompt.find(question_cost) - bullwhip_prompt.find(observation_header));
    CHECK(middle_cost == middle_bw);
    // setting block identical too
    CHECK(cost_prompt.substr(0, cost_prompt.find("Your goal")) ==
          bullwhip_prompt.substr(0, bullwhip_prompt.find("Your goal")));
}

TEST_CASE("emphatic directive changes only the tool block") {
    PromptInputs standard = base_inputs();
    standard.tool = ToolOutput{ToolId::forecast, 9, "d"};
    PromptInputs emphatic = standard;
    emphatic.directive = ToolDirectiveStrength::emphatic;
    const std::string a = library().build_prompt(standard);
    const std::string b = library().build_prompt(emphatic);
    CHECK(a != b);
    CHECK(count_occurrences(b, "TOOL RECOMMENDATION: 9") == 1);
    CHECK(b.find("decisive weight") != std::string::npos);
}

TEST_CASE("empty memory renders a placeholder line") {
    PromptInputs inputs = base_inputs();
    inputs.memory.clear();
    const std::string prompt = library().build_prompt(inputs);
    CHECK(prompt.find("(no completed periods yet)") != std::string::npos);
}

TEST_CASE("negotiation prompts carry range and proposals") {
    PromptInputs inputs = base_inputs();
    inputs.tool = ToolOutput{ToolId::eoq, 4, "d"};
    NegotiationView view;
    view.down_index = 1;
    view.up_index = 2;
    view.counterpart_index = 2;
    view.counterpart_is_upstream = true;
    view.range_low = 4;
    view.range_high = 10;
    view.own_tool_value = 4;
    view.counterpart_tool_value = 10;
    view.transcript = {{1, "4"}, {2, "10"}};
    view.own_previous_proposal = 4;
    view.counterpart_proposal = 10;
    inputs.negotiation = view;
    const std::string prompt = library().build_prompt(inputs);
    CHECK(prompt.find("NEGOTIATION RANGE: 4-10") != std::string::npos);
    CHECK(prompt.find("YOUR PREVIOUS PROPOSAL: 4") != std::string::npos);
    CHECK(prompt.find("COUNTERPART PROPOSAL: 10") != std::string::npos);
    CHECK(prompt.find("echelon 1: 4") != std::string::npos);

    // agreement stage swaps the question
    NegotiationView agreement = view;
    agreement.agreement_stage = true;
    inputs.negotiation = agreement;
    const std::string agreement_prompt = library().build_prompt(inputs);
    CHECK(agreement_prompt.find("definitive order amount") != std::string::npos);
}

TEST_CASE("shared messages embed only sender-local fields") {
    Observation obs;
    obs.agent_index = 0;
    obs.inventory = 14;
    obs.backlog = 2;
    obs.downstream_demand = 6;
    ToolOutput tool{ToolId::forecast, 7, "d"};
    const std::string message = library().render_shared_message(obs, 9, tool);
    CHECK(message.find("14") != std::string::npos);
    CHECK(message.find("9") != std::string::npos);
    CHECK(message.find("7") != std::string::npos);
    // no uppercase tool marker leaks into shared messages
    CHECK(message.find("TOOL RECOMMENDATION") == std::string::npos);

    const std::string without_tool = library().render_shared_message(obs, 9, std::nullopt);
    CHECK(without_tool.find("decision-support tool") == std::string::npos);
}

TEST_CASE("parse_order extracts and clamps") {
    CHECK(parse_order("I order 37 units", 100) == 37);
    CHECK(parse_order("250", 100) == 100);
    CHECK(parse_order("-5", 100) == 0);
    CHECK(parse_order("order 0", 100) == 0);
    CHECK_FALSE(parse_order("no idea", 100).has_value());
    CHECK_FALSE(parse_order("", 100).has_value());
}

TEST_CASE("parse round-trips through the scripted echo provider") {
    ScriptedProvider echo(ScriptedStrategy::echo_tool);
    for (const int n : {0, 1, 7, 42, 100, 150, 999999}) {
        PromptInputs inputs = base_inputs();
        inputs.tool = ToolOutput{ToolId::forecast, n, "d"};
        ChatRequest request;
        request.messages = {{"user", library().build_prompt(inputs)}};
        const std::string response = echo.complete(request);
        const auto parsed = parse_order(response, 100);
        REQUIRE(parsed.has_value());
        CHECK(*parsed == std::clamp(n, 0, 100));
    }
}

TEST_CASE("memory window eviction") {
    AgentMemory memory;
    memory.capacity = 10;
    Observation obs;
    for (int i = 1; i <= 11; ++i) {
        obs.inventory = i;
        obs.backlog = 0;
        obs.last_order = i;
        memory = update_memory(memory, obs);
    }
    CHECK(memory.entries.size() == 10);
    CHECK(memory.entries.front().order == 2); // the first insert was evicted
    CHECK(memory.entries.back().order == 11);

    AgentMemory tiny;
    tiny.capacity = 1;
    tiny = update_memory(tiny, obs);
    obs.last_order = 99;
    tiny = update_memory(tiny, obs);
    REQUIRE(tiny.entries.size() == 1);
    CHECK(tiny.entries.back().order == 99);
}

TEST_CASE("missing template directory fails loudly") {
    CHECK_THROWS_AS(PromptLibrary("/no/such/dir"), ConfigError);
}

TEST_CASE("template content hash tracks edits") {
    const PromptLibrary& lib = library();
    CHECK(lib.content_hash() == PromptLibrary(lib.directory()).content_hash());
    CHECK(lib.content_hash() != 0);
}
