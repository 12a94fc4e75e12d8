#include "chainsim/llm.hpp"

#include "chainsim/util.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fmt/core.h>
#include <fstream>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace chainsim {

std::string request_digest(const ChatRequest& request) {
    std::string canonical = request.model_id;
    canonical += '\x1f';
    canonical += request.system_text;
    canonical += '\x1f';
    for (const auto& message : request.messages) {
        canonical += message.role;
        canonical += '\x1e';
        canonical += message.text;
        canonical += '\x1f';
    }
    canonical += fmt::format("{:.6g}", request.temperature);
    return to_hex(fnv1a64(canonical));
}

ScriptedStrategy scripted_strategy_from_name(const std::string& name) {
    if (name == "echo_tool") return ScriptedStrategy::echo_tool;
    if (name == "midpoint") return ScriptedStrategy::midpoint;
    if (name == "stubborn") return ScriptedStrategy::stubborn;
    if (name == "suggestible") return ScriptedStrategy::suggestible;
    throw ConfigError("unknown scripted strategy: " + name);
}

std::string scripted_strategy_name(ScriptedStrategy strategy) {
    switch (strategy) {
        case ScriptedStrategy::echo_tool: return "echo_tool";
        case ScriptedStrategy::midpoint: return "midpoint";
        case ScriptedStrategy::stubborn: return "stubborn";
        case ScriptedStrategy::suggestible: return "suggestible";
    }
    return "echo_tool";
}

namespace {

std::string full_prompt_text(const ChatRequest& request) {
    std::string text = request.system_text;
    for (const auto& message : request.messages) {
        text += '\n';
        text += message.text;
    }
    return text;
}

std::optional<long long> marker_value(const std::string& text, std::string_view marker) {
    long long value = 0;
    if (find_marker_value(text, marker, value)) return value;
    return std::nullopt;
}

/// "NEGOTIATION RANGE: <a>-<b>"
std::optional<std::pair<long long, long long>> range_value(const std::string& text) {
    const std::string marker = "NEGOTIATION RANGE:";
    size_t pos = text.find(marker);
    if (pos == std::string::npos) return std::nullopt;
    std::string_view tail = std::string_view(text).substr(pos + marker.size());
    long long low = 0;
    if (!find_first_integer(tail, low)) return std::nullopt;
    size_t dash = tail.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    long long high = 0;
    if (!find_first_integer(tail.substr(dash + 1), high)) return std::nullopt;
    return std::make_pair(low, high);
}

std::string answer(long long value) {
    return std::to_string(value);
}

} // namespace

std::string ScriptedProvider::complete(const ChatRequest& request) {
    const std::string text = full_prompt_text(request);
    const auto tool = marker_value(text, "TOOL RECOMMENDATION:");
    const auto demand = marker_value(text, "DOWNSTREAM DEMAND:");
    const auto fallback = [&]() { return answer(tool ? *tool : (demand ? *demand : 0)); };

    switch (strategy_) {
        case ScriptedStrategy::echo_tool:
            return fallback();
        case ScriptedStrategy::midpoint: {
            if (const auto range = range_value(text)) {
                return answer((range->first + range->second) / 2);
            }
            return fallback();
        }
        case ScriptedStrategy::stubborn: {
            if (const auto own = marker_value(text, "YOUR PREVIOUS PROPOSAL:")) {
                return answer(*own);
            }
            return fallback();
        }
        case ScriptedStrategy::suggestible: {
            if (const auto theirs = marker_value(text, "COUNTERPART PROPOSAL:")) {
                return answer(*theirs);
            }
            return fallback();
        }
    }
    return fallback();
}

std::string ScriptedProvider::describe() const {
    return "scripted:" + scripted_strategy_name(strategy_);
}

namespace {

nlohmann::ordered_json request_to_json(const ChatRequest& request) {
    nlohmann::ordered_json j;
    j["model_id"] = request.model_id;
    j["system_text"] = request.system_text;
    nlohmann::ordered_json messages = nlohmann::ordered_json::array();
    for (const auto& message : request.messages) {
        messages.push_back({{"role", message.role}, {"text", message.text}});
    }
    j["messages"] = messages;
    j["temperature"] = request.temperature;
    j["max_output_tokens"] = request.max_output_tokens;
    return j;
}

ChatRequest request_from_json(const nlohmann::json& j) {
    ChatRequest request;
    request.model_id = j.at("model_id").get<std::string>();
    request.system_text = j.at("system_text").get<std::string>();
    for (const auto& message : j.at("messages")) {
        request.messages.push_back(
            {message.at("role").get<std::string>(), message.at("text").get<std::string>()});
    }
    request.temperature = j.at("temperature").get<double>();
    request.max_output_tokens = j.at("max_output_tokens").get<int>();
    return request;
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buffer[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

} // namespace

CassetteWriter::CassetteWriter(std::string path) : path_(std::move(path)) {
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cassette: cannot open " + path_);
}

void CassetteWriter::append(const ChatRequest& request, const std::string& response) {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::ordered_json j;
    j["digest"] = request_digest(request);
    j["request"] = request_to_json(request);
    j["response"] = response;
    j["timestamp"] = iso_timestamp();
    std::ofstream out(path_, std::ios::app);
    if (!out) throw BackendError("cassette: cannot append to " + path_);
    out << j.dump() << "\n";
    if (!out) throw BackendError("cassette: write failed for " + path_);
}

std::vector<CassetteEntry> load_cassette(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cassette: cannot open " + path);
    std::vector<CassetteEntry> entries;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(fmt::format("cassette: malformed line {} in {}: {}", line_no, path,
                                          e.what()));
        }
        CassetteEntry entry;
        entry.digest = j.at("digest").get<std::string>();
        entry.request = request_from_json(j.at("request"));
        entry.response = j.at("response").get<std::string>();
        entry.timestamp = j.value("timestamp", "");
        entries.push_back(std::move(entry));
    }
    return entries;
}

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner, std::string cassette_path)
    : inner_(std::move(inner)), writer_(std::move(cassette_path)) {}

std::string RecordingProvider::complete(const ChatRequest& request) {
    const std::string response = inner_->complete(request);
    writer_.append(request, response);
    return response;
}

std::string RecordingProvider::describe() const {
    return "recording(" + inner_->describe() + ")";
}

ReplayProvider::ReplayProvider(const std::string& cassette_path) : path_(cassette_path) {
    for (auto& entry : load_cassette(cassette_path)) {
        by_digest_[entry.digest].responses.push_back(std::move(entry.response));
    }
}

std::string ReplayProvider::complete(const ChatRequest& request) {
    const std::string digest = request_digest(request);
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = by_digest_.find(digest);
    if (it == by_digest_.end()) {
        throw BackendError(fmt::format("replay: no recorded response for digest {} in {}", digest,
                                       path_));
    }
    Queue& queue = it->second;
    if (queue.next >= queue.responses.size()) {
        throw BackendError(fmt::format("replay: recorded responses for digest {} exhausted in {}",
                                       digest, path_));
    }
    return queue.responses[queue.next++];
}

std::string ReplayProvider::describe() const {
    return "replay(" + path_ + ")";
}

RemoteProvider::RemoteProvider(RemoteConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw ConfigError("remote: endpoint required");
}

std::string RemoteProvider::complete(const ChatRequest& request) {
    // Split endpoint into host base and path for the HTTP client.
    const auto scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("remote: endpoint must start with http://");
    }
    const auto path_start = config_.endpoint.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos
                                 ? config_.endpoint
                                 : config_.endpoint.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/"
                                                             : config_.endpoint.substr(path_start);

    nlohmann::ordered_json body;
    body["model"] = request.model_id.empty() ? config_.model_id : request.model_id;
    nlohmann::ordered_json messages = nlohmann::ordered_json::array();
    if (!request.system_text.empty()) {
        messages.push_back({{"role", "system"}, {"content", request.system_text}});
    }
    for (const auto& message : request.messages) {
        messages.push_back({{"role", message.role}, {"content", message.text}});
    }
    body["messages"] = messages;
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;

    httplib::Client client(base);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
        const char* key = std::getenv(config_.credential_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw BackendError("remote: credential env var not set: " + config_.credential_env);
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const std::string digest = request_digest(request);
    auto result = client.Post(path, headers, body.dump(), "application/json");
    if (!result) {
        throw BackendError(fmt::format("remote: transport error for request {} against {}", digest,
                                       config_.endpoint));
    }
    if (result->status != 200) {
        throw BackendError(fmt::format("remote: status {} for request {}: {}", result->status,
                                       digest, result->body));
    }
    try {
        const auto j = nlohmann::json::parse(result->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(fmt::format("remote: unexpected response shape for request {}: {}",
                                       digest, e.what()));
    }
}

std::string RemoteProvider::describe() const {
    return "remote(" + config_.endpoint + ")";
}

std::shared_ptr<ChatProvider> ProviderSpec::make() const {
    if (kind == "scripted") return std::make_shared<ScriptedProvider>(strategy);
    if (kind == "replay") {
        if (cassette_path.empty()) throw ConfigError("replay provider needs cassette_path");
        return std::make_shared<ReplayProvider>(cassette_path);
    }
    if (kind == "remote") return std::make_shared<RemoteProvider>(remote);
    throw ConfigError("unknown provider kind: " + kind);
}

RetryResult complete_with_retry(ChatProvider& provider, const ChatRequest& request,
                                const OrderParser& parser, int max_attempts,
                                std::optional<int> fallback,
                                std::vector<RetryAttempt>* attempt_log) {
    if (max_attempts < 1) throw ConfigError("complete_with_retry: max_attempts must be >= 1");
    RetryResult result;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        const std::string response = provider.complete(request);
        const auto parsed = parser(response);
        if (attempt_log != nullptr) {
            attempt_log->push_back(RetryAttempt{attempt, response, parsed.has_value()});
        }
        result.attempts = attempt;
        if (parsed) {
            result.value = *parsed;
            result.response = response;
            return result;
        }
    }
    if (fallback) {
        result.value = *fallback;
        result.used_fallback = true;
        result.response = std::to_string(*fallback);
        return result;
    }
    throw BackendError(fmt::format("retry: {} attempts exhausted with no fallback for request {}",
                                   max_attempts, request_digest(request)));
}

} // namespace chainsim
