#include "chainsim/experiment.hpp"

#include "chainsim/util.hpp"

#include <chrono>
#include <filesystem>
#include <fmt/core.h>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fs = std::filesystem;

namespace chainsim {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
    if (!out) throw ConfigError("write failed for " + path);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return path;
    return (fs::path(base_dir) / p).lexically_normal().string();
}

std::string trace_digest_of(const DemandTrace& trace) {
    std::string canonical = trace.generator_id + ":";
    for (int v : trace.values) {
        canonical += std::to_string(v);
        canonical += ',';
    }
    return to_hex(fnv1a64(canonical));
}

nlohmann::ordered_json env_to_json(const EnvConfig& env) {
    nlohmann::ordered_json j;
    j["n_agents"] = env.n_agents;
    j["lead_time"] = env.lead_time;
    j["max_order"] = env.max_order;
    j["holding_cost"] = env.holding_cost;
    j["backlog_cost"] = env.backlog_cost;
    j["variable_order_cost"] = env.variable_order_cost;
    j["fixed_order_cost"] = env.fixed_order_cost;
    j["horizon"] = env.horizon;
    j["initial_inventory"] = env.initial_inventory;
    j["memory_window"] = env.memory_window;
    return j;
}

EnvConfig env_from_json(const nlohmann::json& j) {
    EnvConfig env;
    env.n_agents = j.value("n_agents", env.n_agents);
    env.lead_time = j.value("lead_time", env.lead_time);
    env.max_order = j.value("max_order", env.max_order);
    env.holding_cost = j.value("holding_cost", env.holding_cost);
    env.backlog_cost = j.value("backlog_cost", env.backlog_cost);
    env.variable_order_cost = j.value("variable_order_cost", env.variable_order_cost);
    env.fixed_order_cost = j.value("fixed_order_cost", env.fixed_order_cost);
    env.horizon = j.value("horizon", env.horizon);
    env.initial_inventory = j.value("initial_inventory", env.initial_inventory);
    env.memory_window = j.value("memory_window", env.memory_window);
    return env;
}

nlohmann::ordered_json trace_to_json(const TraceSource& trace) {
    nlohmann::ordered_json j;
    if (!trace.file.empty()) {
        j["file"] = trace.file;
        return j;
    }
    j["generator"] = trace.generator;
    j["seed"] = trace.seed;
    j["length"] = trace.length;
    if (trace.generator == "mjd") {
        j["params"] = {{"drift", trace.mjd.drift},
                       {"volatility", trace.mjd.volatility},
                       {"jump_intensity", trace.mjd.jump_intensity},
                       {"jump_mean", trace.mjd.jump_mean},
                       {"jump_sd", trace.mjd.jump_sd},
                       {"initial_level", trace.mjd.initial_level}};
    } else if (trace.generator == "constant") {
        j["level"] = trace.level;
    } else if (trace.generator == "uniform") {
        j["low"] = trace.low;
        j["high"] = trace.high;
    }
    return j;
}

TraceSource trace_from_json(const nlohmann::json& j, const std::string& base_dir) {
    TraceSource trace;
    if (j.contains("file")) {
        trace.file = resolve(base_dir, j.at("file").get<std::string>());
        return trace;
    }
    trace.generator = j.value("generator", trace.generator);
    trace.seed = j.value("seed", trace.seed);
    trace.length = j.value("length", trace.length);
    if (j.contains("params")) {
        const auto& p = j.at("params");
        trace.mjd.drift = p.value("drift", trace.mjd.drift);
        trace.mjd.volatility = p.value("volatility", trace.mjd.volatility);
        trace.mjd.jump_intensity = p.value("jump_intensity", trace.mjd.jump_intensity);
        trace.mjd.jump_mean = p.value("jump_mean", trace.mjd.jump_mean);
        trace.mjd.jump_sd = p.value("jump_sd", trace.mjd.jump_sd);
        trace.mjd.initial_level = p.value("initial_level", trace.mjd.initial_level);
    }
    trace.level = j.value("level", trace.level);
    trace.low = j.value("low", trace.low);
    trace.high = j.value("high", trace.high);
    return trace;
}

nlohmann::ordered_json decision_to_json(const DecisionSpec& decision) {
    nlohmann::ordered_json j;
    if (const auto* framework = std::get_if<FrameworkSpec>(&decision)) {
        j["type"] = "framework";
        j["kind"] = framework_kind_name(framework->kind);
        j["num_iter"] = framework->num_iter;
        if (framework->tool) j["tool"] = tool_id_name(*framework->tool);
        j["directive"] = directive_name(framework->directive);
        j["max_attempts"] = framework->max_attempts;
    } else {
        const auto& policy = std::get<PolicySpec>(decision);
        j["type"] = "policy";
        if (policy.kind == PolicyKind::ss_policy) {
            j["kind"] = "ss_policy";
            j["S"] = policy.order_up_to;
            j["s"] = policy.reorder_point;
            j["position_mode"] = policy.position_mode == SsPositionMode::inventory_position
                                     ? "inventory_position"
                                     : "on_hand_only";
        } else {
            j["kind"] = "tool_agent";
            j["tool"] = tool_id_name(policy.tool_id);
        }
    }
    return j;
}

ToolId tool_from_name(const std::string& name) {
    if (name == "forecast") return ToolId::forecast;
    if (name == "eoq") return ToolId::eoq;
    throw ConfigError("unknown tool: " + name);
}

DecisionSpec decision_from_json(const nlohmann::json& j, Metric metric) {
    const std::string type = j.value("type", "framework");
    if (type == "policy") {
        PolicySpec policy;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "ss_policy") {
            policy.kind = PolicyKind::ss_policy;
            policy.order_up_to = j.value("S", policy.order_up_to);
            policy.reorder_point = j.value("s", policy.reorder_point);
            const std::string mode = j.value("position_mode", "inventory_position");
            if (mode == "inventory_position") {
                policy.position_mode = SsPositionMode::inventory_position;
            } else if (mode == "on_hand_only") {
                policy.position_mode = SsPositionMode::on_hand_only;
            } else {
                throw ConfigError("unknown position_mode: " + mode);
            }
        } else if (kind == "tool_agent") {
            policy.kind = PolicyKind::tool_agent;
            policy.tool_id = j.contains("tool") ? tool_from_name(j.at("tool").get<std::string>())
                                                : (metric == Metric::cost ? ToolId::forecast
                                                                          : ToolId::eoq);
        } else {
            throw ConfigError("unknown policy kind: " + kind);
        }
        return policy;
    }
    if (type != "framework") throw ConfigError("unknown decision type: " + type);
    FrameworkSpec framework;
    framework.kind = framework_kind_from_name(j.at("kind").get<std::string>());
    framework.num_iter = j.value("num_iter", framework.num_iter);
    framework.max_attempts = j.value("max_attempts", framework.max_attempts);
    framework.metric = metric;
    framework.directive = directive_from_name(j.value("directive", "standard"));
    if (j.contains("tool")) {
        framework.tool = tool_from_name(j.at("tool").get<std::string>());
    } else if (framework.uses_tool()) {
        framework.tool = metric == Metric::cost ? ToolId::forecast : ToolId::eoq;
    }
    return framework;
}

nlohmann::ordered_json provider_to_json(const ProviderSpec& provider) {
    nlohmann::ordered_json j;
    j["kind"] = provider.kind;
    if (provider.kind == "scripted") j["strategy"] = scripted_strategy_name(provider.strategy);
    if (provider.kind == "replay") j["cassette"] = provider.cassette_path;
    if (provider.kind == "remote") {
        j["endpoint"] = provider.remote.endpoint;
        j["credential_env"] = provider.remote.credential_env;
        j["timeout_seconds"] = provider.remote.timeout_seconds;
    }
    return j;
}

ProviderSpec provider_from_json(const nlohmann::json& j, const std::string& base_dir) {
    ProviderSpec provider;
    provider.kind = j.value("kind", "scripted");
    if (provider.kind == "scripted") {
        provider.strategy = scripted_strategy_from_name(j.value("strategy", "echo_tool"));
    } else if (provider.kind == "replay") {
        provider.cassette_path = resolve(base_dir, j.at("cassette").get<std::string>());
    } else if (provider.kind == "remote") {
        provider.remote.endpoint = j.at("endpoint").get<std::string>();
        provider.remote.credential_env = j.value("credential_env", "");
        provider.remote.timeout_seconds = j.value("timeout_seconds", 60);
    } else {
        throw ConfigError("unknown provider kind: " + provider.kind);
    }
    return provider;
}

} // namespace

DemandTrace TraceSource::realize() const {
    if (!file.empty()) return load_trace(file);
    if (generator == "mjd") return merton_jump_diffusion(mjd, seed, length);
    if (generator == "constant") return constant_trace(level, length);
    if (generator == "uniform") return uniform_trace(low, high, seed, length);
    throw ConfigError("unknown trace generator: " + generator);
}

void ExperimentConfig::validate() const {
    EnvConfig probe = env;
    probe.horizon = std::max(env.horizon, 1);
    probe.validate();
    if (env.horizon < 0) throw ConfigError("experiment: horizon must be >= 0");
    if (repeats < 1) throw ConfigError("experiment: repeats must be >= 1");

    const ToolId expected = metric == Metric::cost ? ToolId::forecast : ToolId::eoq;
    if (const auto* framework = std::get_if<FrameworkSpec>(&decision)) {
        framework->validate();
        if (framework->tool && *framework->tool != expected) {
            throw ConfigError(fmt::format(
                "experiment: metric '{}' pairs with tool '{}', got '{}' (cost pairs with the "
                "demand forecast, bullwhip with the order-quantity tool)",
                metric_name(metric), tool_id_name(expected), tool_id_name(*framework->tool)));
        }
        if (!has_provider) throw ConfigError("experiment: framework cell needs a provider");
    } else {
        const auto& policy = std::get<PolicySpec>(decision);
        policy.validate(env.max_order);
        if (policy.kind == PolicyKind::tool_agent && policy.tool_id != expected) {
            throw ConfigError(fmt::format(
                "experiment: metric '{}' pairs with tool '{}', got '{}'", metric_name(metric),
                tool_id_name(expected), tool_id_name(policy.tool_id)));
        }
    }
    if (!trace.file.empty() && !fs::exists(trace.file)) {
        throw ConfigError("experiment: trace file does not exist: " + trace.file);
    }
    if (needs_provider() && !fs::exists(template_dir)) {
        throw ConfigError("experiment: template directory does not exist: " + template_dir);
    }
}

std::string ExperimentConfig::canonical_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["metric"] = metric_name(metric);
    j["env"] = env_to_json(env);
    j["decision"] = decision_to_json(decision);
    if (has_provider) {
        j["provider"] = provider_to_json(provider);
        j["model_id"] = model_id;
        j["temperature"] = temperature;
        j["max_output_tokens"] = max_output_tokens;
    }
    j["trace"] = trace_to_json(trace);
    j["repeats"] = repeats;
    j["metrics_warmup"] = metrics_warmup;
    return j.dump();
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text,
                                                  const std::string& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("experiment: malformed JSON: ") + e.what());
    }
    ExperimentConfig config;
    config.name = j.value("name", config.name);
    config.metric = metric_from_name(j.value("metric", "cost"));
    if (j.contains("env")) config.env = env_from_json(j.at("env"));
    if (j.contains("decision")) config.decision = decision_from_json(j.at("decision"), config.metric);
    if (j.contains("provider")) {
        config.has_provider = true;
        config.provider = provider_from_json(j.at("provider"), base_dir);
    }
    config.model_id = j.value("model_id", config.model_id);
    config.temperature = j.value("temperature", config.temperature);
    config.max_output_tokens = j.value("max_output_tokens", config.max_output_tokens);
    if (j.contains("trace")) config.trace = trace_from_json(j.at("trace"), base_dir);
    config.template_dir = resolve(base_dir, j.value("templates", config.template_dir));
    config.output_dir = j.value("output_dir", config.output_dir);
    config.record_cassette = j.value("record_cassette", config.record_cassette);
    config.repeats = j.value("repeats", config.repeats);
    config.metrics_warmup = j.value("metrics_warmup", config.metrics_warmup);
    return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_json_text(read_file(path), fs::path(path).parent_path().string());
}

std::string RunRecord::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["digest"] = digest;
    j["trace_digest"] = trace_digest;
    j["env_digest"] = env_digest;
    j["metrics"] = nlohmann::ordered_json::parse(metrics.to_json());
    j["wall_time_ms"] = wall_time_ms;
    j["output_dir"] = output_dir;
    j["artifacts"] = artifacts;
    return j.dump(2) + "\n";
}

RunRecord RunRecord::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    RunRecord record;
    record.name = j.at("name").get<std::string>();
    record.digest = j.at("digest").get<std::string>();
    record.trace_digest = j.at("trace_digest").get<std::string>();
    record.env_digest = j.at("env_digest").get<std::string>();
    record.metrics = MetricsReport::from_json(j.at("metrics").dump());
    record.wall_time_ms = j.at("wall_time_ms").get<double>();
    record.output_dir = j.value("output_dir", "");
    if (j.contains("artifacts")) {
        record.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
    }
    return record;
}

RunRecord RunRecord::from_file(const std::string& path) {
    return from_json(read_file(path));
}

namespace {

std::string pick_run_directory(const std::string& output_dir, const std::string& name,
                               const std::string& digest) {
    fs::create_directories(output_dir);
    const std::string stem = fmt::format("{}/{}-{}", output_dir, name, digest.substr(0, 8));
    std::string candidate = stem;
    int suffix = 2;
    while (fs::exists(candidate)) {
        candidate = fmt::format("{}-{}", stem, suffix++);
    }
    fs::create_directories(candidate);
    return candidate;
}

} // namespace

RunRecord run(const ExperimentConfig& config) {
    config.validate();

    const DemandTrace trace = config.trace.realize();

    std::unique_ptr<PromptLibrary> prompts;
    BackendSet backend;
    if (config.needs_provider()) {
        prompts = std::make_unique<PromptLibrary>(config.template_dir);
        auto provider = config.provider.make();
        if (!config.record_cassette.empty()) {
            provider = std::make_shared<RecordingProvider>(provider, config.record_cassette);
        }
        backend = BackendSet::shared(std::move(provider));
    }

    RunRecord record;
    record.name = config.name;
    const std::uint64_t template_hash = prompts ? prompts->content_hash() : 0;
    record.digest =
        to_hex(fnv1a64(config.canonical_json() + "|templates:" + to_hex(template_hash)));
    record.trace_digest = trace_digest_of(trace);
    record.env_digest = to_hex(fnv1a64(env_to_json(config.env).dump()));
    record.output_dir = pick_run_directory(config.output_dir, config.name, record.digest);

    EpisodeOptions options;
    options.metrics_warmup = config.metrics_warmup;
    options.request_defaults.model_id = config.model_id;
    options.request_defaults.temperature = config.temperature;
    options.request_defaults.max_output_tokens = config.max_output_tokens;

    const std::string transcript_path = record.output_dir + "/transcript.jsonl";
    std::ofstream transcript_file(transcript_path);
    if (!transcript_file) throw ConfigError("cannot write " + transcript_path);
    options.transcript_sink = [&transcript_file](const TranscriptEntry& entry) {
        transcript_file << entry.to_json_line() << "\n";
        transcript_file.flush(); // keep a partial log on abort
    };

    const auto started = std::chrono::steady_clock::now();
    EpisodeResult episode;
    for (int repeat = 0; repeat < config.repeats; ++repeat) {
        DemandTrace repeat_trace = trace;
        if (repeat > 0) {
            TraceSource shifted = config.trace;
            if (shifted.file.empty()) {
                shifted.seed = config.trace.seed + static_cast<std::uint64_t>(repeat);
                repeat_trace = shifted.realize();
            }
        }
        EpisodeOptions repeat_options = options;
        if (repeat > 0) repeat_options.transcript_sink = nullptr; // one transcript file per run
        EpisodeResult current = run_episode(config.decision, config.env, repeat_trace, backend,
                                            prompts.get(), repeat_options);
        if (repeat == 0) {
            episode = std::move(current);
        } else {
            const std::string repeat_dir = fmt::format("{}/repeat-{}", record.output_dir, repeat);
            fs::create_directories(repeat_dir);
            const std::string metrics_path = repeat_dir + "/metrics.json";
            const std::string trajectory_path = repeat_dir + "/trajectory.csv";
            write_file(metrics_path, current.metrics.to_json());
            write_file(trajectory_path, trajectory_csv(current.final_state));
            record.artifacts[fmt::format("repeat{}_metrics_json", repeat)] = metrics_path;
            record.artifacts[fmt::format("repeat{}_trajectory_csv", repeat)] = trajectory_path;
        }
    }
    const auto finished = std::chrono::steady_clock::now();
    record.wall_time_ms =
        std::chrono::duration_cast<std::chrono::microseconds>(finished - started).count() / 1000.0;

    record.metrics = episode.metrics;
    record.artifacts["trajectory_csv"] = record.output_dir + "/trajectory.csv";
    record.artifacts["decisions_csv"] = record.output_dir + "/decisions.csv";
    record.artifacts["metrics_json"] = record.output_dir + "/metrics.json";
    record.artifacts["summary_csv"] = record.output_dir + "/summary.csv";
    record.artifacts["transcript_jsonl"] = transcript_path;
    record.artifacts["run_json"] = record.output_dir + "/run.json";

    write_file(record.artifacts["trajectory_csv"], trajectory_csv(episode.final_state));
    write_file(record.artifacts["decisions_csv"], decisions_csv(episode.decisions));
    write_file(record.artifacts["metrics_json"], episode.metrics.to_json());
    write_file(record.artifacts["summary_csv"], episode.metrics.to_csv_row());
    write_file(record.artifacts["run_json"], record.to_json());
    return record;
}

namespace {

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string format_metric(const std::optional<double>& value) {
    if (!value) return "";
    nlohmann::json j = *value;
    return j.dump();
}

std::string summary_row(const ExperimentConfig& config, const MatrixCellResult& cell) {
    std::string framework_label;
    std::string tool_label = "-";
    if (const auto* framework = std::get_if<FrameworkSpec>(&config.decision)) {
        framework_label = framework_kind_name(framework->kind);
        if (framework->tool) tool_label = tool_id_name(*framework->tool);
    } else {
        const auto& policy = std::get<PolicySpec>(config.decision);
        if (policy.kind == PolicyKind::ss_policy) {
            framework_label = fmt::format("ss_policy(S={},s={})", policy.order_up_to,
                                          policy.reorder_point);
        } else {
            framework_label = "tool_agent";
            tool_label = tool_id_name(policy.tool_id);
        }
    }
    const std::string provider_label =
        config.has_provider
            ? (config.provider.kind == "scripted"
                   ? "scripted:" + scripted_strategy_name(config.provider.strategy)
                   : config.provider.kind)
            : "-";
    const std::string model_label = config.has_provider ? config.model_id : "-";

    std::string status = cell.ok ? "ok" : "error: " + cell.error;
    std::string primary, companion, display;
    if (cell.ok) {
        const auto& metrics = cell.record.metrics;
        const std::optional<double> cost = metrics.cumulative_global_cost;
        const std::optional<double>& bullwhip = metrics.aggregate_bullwhip;
        if (config.metric == Metric::cost) {
            primary = format_metric(cost);
            companion = format_metric(bullwhip);
            display = fmt::format("{} (bw={})", primary, companion.empty() ? "n/a" : companion);
        } else {
            primary = format_metric(bullwhip);
            companion = format_metric(cost);
            display = fmt::format("{} (costs={})", primary.empty() ? "n/a" : primary, companion);
        }
    }
    return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_escape(cell.name),
                       metric_name(config.metric), tool_label, model_label, framework_label,
                       provider_label, primary, companion, csv_escape(display),
                       csv_escape(status));
}

} // namespace

MatrixResult run_matrix(const std::string& matrix_path, const std::string& output_dir_override,
                        int jobs) {
    const std::string base_dir = fs::path(matrix_path).parent_path().string();
    nlohmann::json matrix;
    try {
        matrix = nlohmann::json::parse(read_file(matrix_path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("matrix: malformed JSON: ") + e.what());
    }
    if (!matrix.contains("cells") || !matrix.at("cells").is_array()) {
        throw ConfigError("matrix: expected a 'cells' array");
    }

    std::vector<std::string> cell_paths;
    for (const auto& cell : matrix.at("cells")) {
        cell_paths.push_back(resolve(base_dir, cell.get<std::string>()));
    }

    MatrixResult result;
    result.cells.resize(cell_paths.size());
    std::vector<ExperimentConfig> configs(cell_paths.size());

    auto run_cell = [&](size_t index) {
        MatrixCellResult& cell = result.cells[index];
        cell.config_path = cell_paths[index];
        try {
            ExperimentConfig config = ExperimentConfig::from_file(cell_paths[index]);
            if (!output_dir_override.empty()) config.output_dir = output_dir_override;
            configs[index] = config;
            cell.name = config.name;
            cell.record = run(config);
            cell.ok = true;
        } catch (const std::exception& e) {
            if (cell.name.empty()) cell.name = fs::path(cell_paths[index]).stem().string();
            cell.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (size_t i = 0; i < cell_paths.size(); ++i) run_cell(i);
    } else {
        std::vector<std::future<void>> pending;
        size_t next = 0;
        while (next < cell_paths.size() || !pending.empty()) {
            while (next < cell_paths.size() && pending.size() < static_cast<size_t>(jobs)) {
                pending.push_back(std::async(std::launch::async, run_cell, next++));
            }
            pending.front().get();
            pending.erase(pending.begin());
        }
    }

    std::ostringstream summary;
    summary << "cell,metric,tool,model,framework,provider,primary,companion,display,status\n";
    for (size_t i = 0; i < result.cells.size(); ++i) {
        summary << summary_row(configs[i], result.cells[i]);
    }
    result.summary_csv = summary.str();

    std::string summary_dir = output_dir_override;
    if (summary_dir.empty()) summary_dir = fs::path(matrix_path).parent_path().string();
    if (summary_dir.empty()) summary_dir = ".";
    fs::create_directories(summary_dir);
    result.summary_path = summary_dir + "/matrix_summary.csv";
    write_file(result.summary_path, result.summary_csv);
    return result;
}

std::vector<OrderingAssertion> load_assertions(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("assertions: malformed JSON: ") + e.what());
    }
    std::vector<OrderingAssertion> assertions;
    for (const auto& item : j.at("assertions")) {
        OrderingAssertion assertion;
        assertion.kind = item.at("kind").get<std::string>();
        assertion.metric = item.at("metric").get<std::string>();
        if (assertion.kind == "less") {
            assertion.left = item.at("left").get<std::string>();
            assertion.right = item.at("right").get<std::string>();
        } else if (assertion.kind == "below" || assertion.kind == "above") {
            assertion.left = item.at("cell").get<std::string>();
            assertion.threshold = item.value("threshold", 1.0);
        } else {
            throw ConfigError("assertions: unknown kind: " + assertion.kind);
        }
        assertions.push_back(std::move(assertion));
    }
    return assertions;
}

namespace {

std::optional<double> record_metric(const RunRecord& record, const std::string& metric) {
    if (metric == "cost") return record.metrics.cumulative_global_cost;
    if (metric == "bullwhip") return record.metrics.aggregate_bullwhip;
    throw ConfigError("compare: unknown metric: " + metric);
}

const RunRecord& find_record(const std::vector<RunRecord>& records, const std::string& name) {
    for (const auto& record : records) {
        if (record.name == name) return record;
    }
    throw ConfigError("compare: no record named " + name);
}

} // namespace

std::vector<CompareOutcome> compare(const std::vector<RunRecord>& records,
                                    const std::vector<OrderingAssertion>& assertions) {
    if (records.empty()) throw ConfigError("compare: no records");
    for (const auto& record : records) {
        if (record.trace_digest != records.front().trace_digest ||
            record.env_digest != records.front().env_digest) {
            throw ConfigError(fmt::format(
                "compare: record '{}' uses a different trace or environment than '{}'",
                record.name, records.front().name));
        }
    }
    std::vector<CompareOutcome> outcomes;
    for (const auto& assertion : assertions) {
        CompareOutcome outcome;
        if (assertion.kind == "less") {
            const auto left = record_metric(find_record(records, assertion.left), assertion.metric);
            const auto right =
                record_metric(find_record(records, assertion.right), assertion.metric);
            outcome.description = fmt::format("{}({}) < {}({})", assertion.metric, assertion.left,
                                              assertion.metric, assertion.right);
            outcome.pass = left && right && *left < *right;
        } else {
            const auto value = record_metric(find_record(records, assertion.left), assertion.metric);
            const bool above = assertion.kind == "above";
            outcome.description = fmt::format("{}({}) {} {}", assertion.metric, assertion.left,
                                              above ? ">" : "<", assertion.threshold);
            outcome.pass = value && (above ? *value > assertion.threshold
                                           : *value < assertion.threshold);
        }
        outcomes.push_back(std::move(outcome));
    }
    return outcomes;
}

} // namespace chainsim
