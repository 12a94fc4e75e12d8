#pragma once

#include "chainsim/demand.hpp"
#include "chainsim/frameworks.hpp"

#include <map>
#include <string>
#include <vector>

namespace chainsim {

/// Where the customer demand comes from: a seeded generator or a saved file.
struct TraceSource {
    std::string file; // when non-empty, load this path
    std::string generator = "mjd";
    std::uint64_t seed = 23;
    size_t length = 100;
    MjdParams mjd;
    int level = 10;       // constant generator
    int low = 0;          // uniform generator
    int high = 20;

    DemandTrace realize() const;
};

/// Declarative description of one experiment cell.
struct ExperimentConfig {
    std::string name = "experiment";
    Metric metric = Metric::cost;
    EnvConfig env;
    DecisionSpec decision = FrameworkSpec{};
    bool has_provider = false;
    ProviderSpec provider;
    std::string model_id = "scripted";
    double temperature = 0.1;
    int max_output_tokens = 90;
    TraceSource trace;
    std::string template_dir = "templates";
    std::string output_dir = "out";
    std::string record_cassette; // wrap the provider and record when non-empty
    int repeats = 1;
    int metrics_warmup = -1;

    bool needs_provider() const { return std::holds_alternative<FrameworkSpec>(decision); }
    void validate() const;

    /// Canonical JSON of the semantic fields (output paths excluded); the
    /// run digest is a hash of this plus the template version.
    std::string canonical_json() const;

    static ExperimentConfig from_json_text(const std::string& text, const std::string& base_dir);
    static ExperimentConfig from_file(const std::string& path);
};

struct RunRecord {
    std::string name;
    std::string digest;       // (config, seed, template version)
    std::string trace_digest;
    std::string env_digest;
    MetricsReport metrics;
    double wall_time_ms = 0.0;
    std::string output_dir;
    std::map<std::string, std::string> artifacts;

    std::string to_json() const;
    static RunRecord from_json(const std::string& text);
    static RunRecord from_file(const std::string& path);
};

/// Execute one cell: run the episode, then write trajectory CSV, decision
/// CSV, transcript JSON-lines, metrics JSON and the run record, all under a
/// digest-suffixed directory that is never silently reused.
RunRecord run(const ExperimentConfig& config);

struct MatrixCellResult {
    std::string config_path;
    std::string name;
    bool ok = false;
    std::string error;
    RunRecord record; // valid when ok
};

struct MatrixResult {
    std::vector<MatrixCellResult> cells;
    std::string summary_csv;
    std::string summary_path;
};

/// Run every cell listed in the matrix file; failures are recorded and the
/// matrix continues. The summary CSV has one row per cell with the primary
/// metric first and the companion metric alongside.
MatrixResult run_matrix(const std::string& matrix_path, const std::string& output_dir_override = "",
                        int jobs = 1);

struct OrderingAssertion {
    std::string kind;      // less | below | above
    std::string metric;    // cost | bullwhip
    std::string left;      // cell name (less) or the single cell (below/above)
    std::string right;     // cell name (less only)
    double threshold = 0.0;
};

std::vector<OrderingAssertion> load_assertions(const std::string& path);

struct CompareOutcome {
    std::string description;
    bool pass = false;
};

/// Evaluate declared orderings over records that share a trace and an
/// environment; mismatched traces are a hard error.
std::vector<CompareOutcome> compare(const std::vector<RunRecord>& records,
                                    const std::vector<OrderingAssertion>& assertions);

} // namespace chainsim
