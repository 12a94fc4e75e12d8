#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace chainsim {

struct ChatMessage {
    std::string role; // "user" or "assistant"
    std::string text;
};

struct ChatRequest {
    std::string system_text;
    std::vector<ChatMessage> messages;
    double temperature = 0.1;
    int max_output_tokens = 90;
    std::string model_id = "scripted";
};

/// Stable identifier for a request; replay cassettes are keyed by it.
/// Covers model, system text, every message, and the temperature, so that
/// parameter drift invalidates recorded exchanges loudly.
std::string request_digest(const ChatRequest& request);

/// Abstract chat-completion provider.
class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string describe() const = 0;
};

enum class ScriptedStrategy { echo_tool, midpoint, stubborn, suggestible };

ScriptedStrategy scripted_strategy_from_name(const std::string& name);
std::string scripted_strategy_name(ScriptedStrategy strategy);

/// Deterministic provider driven by structured markers in the prompt:
///   TOOL RECOMMENDATION: <n>     the agent's own tool output
///   NEGOTIATION RANGE: <a>-<b>   bounds of the current negotiation
///   YOUR PREVIOUS PROPOSAL: <n>  the agent's latest proposal, if any
///   COUNTERPART PROPOSAL: <n>    the counterpart's latest proposal, if any
///   DOWNSTREAM DEMAND: <n>       current demand seen by the agent
/// echo_tool answers the tool value, midpoint the floor midpoint of the
/// range, stubborn repeats its own previous proposal and suggestible adopts
/// the counterpart's. Each falls back along tool -> demand -> 0 when its
/// preferred marker is absent. Responses are a pure function of the request.
class ScriptedProvider final : public ChatProvider {
public:
    explicit ScriptedProvider(ScriptedStrategy strategy) : strategy_(strategy) {}
    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

private:
    ScriptedStrategy strategy_;
};

struct CassetteEntry {
    std::string digest;
    ChatRequest request;
    std::string response;
    std::string timestamp;
};

/// Serializes exchanges as append-only JSON lines.
class CassetteWriter {
public:
    explicit CassetteWriter(std::string path);
    void append(const ChatRequest& request, const std::string& response);
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::mutex mutex_;
};

std::vector<CassetteEntry> load_cassette(const std::string& path);

/// Wraps any provider and records every exchange to a cassette file.
class RecordingProvider final : public ChatProvider {
public:
    RecordingProvider(std::shared_ptr<ChatProvider> inner, std::string cassette_path);
    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

private:
    std::shared_ptr<ChatProvider> inner_;
    CassetteWriter writer_;
};

/// Replays recorded responses by request digest, in recorded order for
/// repeated identical requests. Never touches the network.
class ReplayProvider final : public ChatProvider {
public:
    explicit ReplayProvider(const std::string& cassette_path);
    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

private:
    struct Queue {
        std::vector<std::string> responses;
        size_t next = 0;
    };
    std::string path_;
    std::unordered_map<std::string, Queue> by_digest_;
    std::mutex mutex_;
};

struct RemoteConfig {
    std::string endpoint;            // e.g. http://localhost:8089/v1/chat/completions
    std::string model_id;
    std::string credential_env;      // name of the env var holding the API key
    int timeout_seconds = 60;
};

/// Thin HTTP JSON client speaking the common chat-completions shape.
class RemoteProvider final : public ChatProvider {
public:
    explicit RemoteProvider(RemoteConfig config);
    std::string complete(const ChatRequest& request) override;
    std::string describe() const override;

private:
    RemoteConfig config_;
};

struct ProviderSpec {
    std::string kind = "scripted"; // scripted | replay | remote
    ScriptedStrategy strategy = ScriptedStrategy::echo_tool;
    std::string cassette_path;
    RemoteConfig remote;

    std::shared_ptr<ChatProvider> make() const;
};

using OrderParser = std::function<std::optional<int>(const std::string&)>;

struct RetryAttempt {
    int attempt = 0; // 1-based
    std::string response;
    bool parsed = false;
};

struct RetryResult {
    int value = 0;
    int attempts = 0;
    bool used_fallback = false;
    std::string response; // accepted text; synthesized from the fallback value
};

/// Call the provider until the parser accepts a response, at most
/// `max_attempts` times; then fall back to `fallback` if given,
/// otherwise raise BackendError carrying the request digest.
RetryResult complete_with_retry(ChatProvider& provider, const ChatRequest& request,
                                const OrderParser& parser, int max_attempts = 3,
                                std::optional<int> fallback = std::nullopt,
                                std::vector<RetryAttempt>* attempt_log = nullptr);

} // namespace chainsim
