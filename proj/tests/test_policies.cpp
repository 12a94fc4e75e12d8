#include "chainsim/policies.hpp"

#include "chainsim/frameworks.hpp"

#include "chainsim/util.hpp"

#include <doctest.h>

using namespace chainsim;

namespace {

Observation make_obs(int inventory, int backlog, std::vector<PipelineEntry> pipeline = {}) {
    Observation obs;
    obs.inventory = inventory;
    obs.backlog = backlog;
    obs.incoming_deliveries = std::move(pipeline);
    return obs;
}

} // namespace

TEST_CASE("order-up-to arithmetic") {
    CHECK(ss_policy_decide(make_obs(55, 0), 100, 60, 100) == 45);
    // the threshold is strict: exactly s orders nothing
    CHECK(ss_policy_decide(make_obs(60, 0), 100, 60, 100) == 0);
    CHECK(ss_policy_decide(make_obs(61, 0), 100, 60, 100) == 0);
    // position = 10 + 30 - 5 = 35 < 60 -> order 100 - 35 = 65
    CHECK(ss_policy_decide(make_obs(10, 5, {{4, 30}}), 100, 60, 100) == 65);
}

TEST_CASE("order-up-to clamps to max_order") {
    // deep deficit: position = 0 + 0 - 80 = -80 -> order 180, clamped
    CHECK(ss_policy_decide(make_obs(0, 80), 100, 60, 100) == 100);
}

TEST_CASE("on-hand-only variant ignores pipeline and backlog") {
    const auto obs = make_obs(10, 5, {{4, 30}});
    CHECK(ss_policy_decide(obs, 100, 60, 100, SsPositionMode::on_hand_only) == 90);
    CHECK(ss_policy_decide(make_obs(70, 50, {}), 100, 60, 100, SsPositionMode::on_hand_only) == 0);
}

TEST_CASE("unrelated observation fields do not change the decision") {
    Observation obs = make_obs(30, 2, {{5, 10}});
    const int base = ss_policy_decide(obs, 100, 60, 100);
    obs.last_order = 42;
    obs.downstream_demand = 17;
    obs.agent_index = 2;
    obs.step = 99;
    obs.memory_window = {{1, 2, 3}, {4, 5, 6}};
    CHECK(ss_policy_decide(obs, 100, 60, 100) == base);
}

TEST_CASE("policy spec validation") {
    PolicySpec spec;
    spec.kind = PolicyKind::ss_policy;
    spec.order_up_to = 100;
    spec.reorder_point = 60;
    CHECK_NOTHROW(spec.validate(100));
    spec.reorder_point = 101;
    CHECK_THROWS_AS(spec.validate(100), ConfigError);
    spec.order_up_to = 120;
    spec.reorder_point = 60;
    CHECK_THROWS_AS(spec.validate(100), ConfigError);
    spec.order_up_to = 50;
    spec.reorder_point = -1;
    CHECK_THROWS_AS(spec.validate(100), ConfigError);
}

TEST_CASE("tool agent passes the recommendation through") {
    ToolOutput tool;
    tool.tool_id = ToolId::eoq;
    tool.recommended_order = 10;
    CHECK(tool_agent_decide(make_obs(0, 0), tool) == 10);
    tool.recommended_order = 0;
    CHECK(tool_agent_decide(make_obs(50, 10), tool) == 0);
}

TEST_CASE("tool agent order series equals the tool output series over a run") {
    EnvConfig config;
    config.horizon = 60;
    const auto trace = merton_jump_diffusion(MjdParams{}, 23, 60);
    PolicySpec spec;
    spec.kind = PolicyKind::tool_agent;
    spec.tool_id = ToolId::eoq;
    const auto episode = run_episode(spec, config, trace, BackendSet{}, nullptr);
    REQUIRE(episode.decisions.size() == 60);
    for (size_t t = 0; t < episode.decisions.size(); ++t) {
        const auto& decision = episode.decisions[t];
        REQUIRE(decision.tool_outputs.size() == 3);
        for (size_t i = 0; i < 3; ++i) {
            CHECK(decision.final_orders[i] == decision.tool_outputs[i].recommended_order);
            CHECK(episode.final_state.agents[i].order_history[t] ==
                  decision.tool_outputs[i].recommended_order);
        }
    }
}
