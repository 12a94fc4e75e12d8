#include "chainsim/experiment.hpp"
#include "chainsim/util.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fmt/core.h>
#include <iostream>

namespace fs = std::filesystem;

namespace {

void print_record(const chainsim::RunRecord& record) {
    fmt::print("run: {}\n", record.name);
    fmt::print("  digest:     {}\n", record.digest);
    fmt::print("  output dir: {}\n", record.output_dir);
    fmt::print("  wall time:  {:.1f} ms\n", record.wall_time_ms);
    fmt::print("  cost:       {}\n", record.metrics.cumulative_global_cost);
    if (record.metrics.aggregate_bullwhip) {
        fmt::print("  bullwhip:   {}\n", *record.metrics.aggregate_bullwhip);
    } else {
        fmt::print("  bullwhip:   undefined\n");
    }
}

std::vector<chainsim::RunRecord> collect_records(const std::vector<std::string>& paths) {
    std::vector<chainsim::RunRecord> records;
    for (const auto& path : paths) {
        if (fs::is_directory(path)) {
            for (const auto& entry : fs::recursive_directory_iterator(path)) {
                if (entry.is_regular_file() && entry.path().filename() == "run.json") {
                    records.push_back(chainsim::RunRecord::from_file(entry.path().string()));
                }
            }
        } else {
            records.push_back(chainsim::RunRecord::from_file(path));
        }
    }
    return records;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential supply-chain simulator with consensus-seeking agent frameworks"};
    app.require_subcommand(1);

    // run
    std::string run_config, run_output, run_provider, run_cassette;
    std::optional<std::uint64_t> run_seed;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment cell from a config file");
    run_cmd->add_option("-c,--config", run_config, "Experiment config (JSON)")->required();
    run_cmd->add_option("-o,--output-dir", run_output, "Override the output directory");
    run_cmd->add_option("--provider", run_provider,
                        "Override the provider, e.g. scripted:midpoint");
    run_cmd->add_option("--record-cassette", run_cassette,
                        "Record every exchange to this cassette file");
    run_cmd->add_option("--seed", run_seed, "Override the trace seed");

    // matrix
    std::string matrix_file, matrix_output;
    int matrix_jobs = 1;
    auto* matrix_cmd = app.add_subcommand("matrix", "Run every cell in a matrix file");
    matrix_cmd->add_option("-m,--matrix", matrix_file, "Matrix file (JSON)")->required();
    matrix_cmd->add_option("-o,--output-dir", matrix_output, "Override the output directory");
    matrix_cmd->add_option("-j,--jobs", matrix_jobs, "Concurrent cells (scripted/replay only)")
        ->check(CLI::Range(1, 64));

    // compare
    std::string compare_assertions;
    std::vector<std::string> compare_records;
    auto* compare_cmd = app.add_subcommand("compare", "Evaluate declared orderings over records");
    compare_cmd->add_option("-a,--assertions", compare_assertions, "Assertions file (JSON)")
        ->required();
    compare_cmd
        ->add_option("-r,--records", compare_records,
                     "run.json files or directories to scan for them")
        ->required();

    // gen-trace
    std::string gen_out, gen_generator = "mjd";
    std::uint64_t gen_seed = 13;
    size_t gen_length = 100;
    int gen_level = 10, gen_low = 0, gen_high = 20;
    chainsim::MjdParams gen_mjd;
    auto* gen_cmd = app.add_subcommand("gen-trace", "Generate and save a demand trace");
    gen_cmd->add_option("-o,--out", gen_out, "Output path")->required();
    gen_cmd->add_option("-g,--generator", gen_generator, "mjd | constant | uniform");
    gen_cmd->add_option("--seed", gen_seed, "RNG seed");
    gen_cmd->add_option("--length", gen_length, "Number of steps");
    gen_cmd->add_option("--level", gen_level, "Constant level");
    gen_cmd->add_option("--low", gen_low, "Uniform lower bound");
    gen_cmd->add_option("--high", gen_high, "Uniform upper bound");
    gen_cmd->add_option("--drift", gen_mjd.drift, "MJD drift per step");
    gen_cmd->add_option("--volatility", gen_mjd.volatility, "MJD volatility");
    gen_cmd->add_option("--jump-intensity", gen_mjd.jump_intensity, "MJD jumps per step");
    gen_cmd->add_option("--jump-mean", gen_mjd.jump_mean, "MJD log jump mean");
    gen_cmd->add_option("--jump-sd", gen_mjd.jump_sd, "MJD log jump sd");
    gen_cmd->add_option("--initial-level", gen_mjd.initial_level, "MJD initial level");

    // replay
    std::string replay_config, replay_cassette, replay_output;
    auto* replay_cmd =
        app.add_subcommand("replay", "Re-run a cell offline from a recorded cassette");
    replay_cmd->add_option("-c,--config", replay_config, "Experiment config (JSON)")->required();
    replay_cmd->add_option("--cassette", replay_cassette, "Recorded cassette (JSONL)")->required();
    replay_cmd->add_option("-o,--output-dir", replay_output, "Override the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            auto config = chainsim::ExperimentConfig::from_file(run_config);
            if (!run_output.empty()) config.output_dir = run_output;
            if (!run_cassette.empty()) config.record_cassette = run_cassette;
            if (run_seed) config.trace.seed = *run_seed;
            if (!run_provider.empty()) {
                config.has_provider = true;
                const auto colon = run_provider.find(':');
                config.provider = chainsim::ProviderSpec{};
                config.provider.kind = run_provider.substr(0, colon);
                if (config.provider.kind == "scripted" && colon != std::string::npos) {
                    config.provider.strategy =
                        chainsim::scripted_strategy_from_name(run_provider.substr(colon + 1));
                } else if (config.provider.kind == "replay" && colon != std::string::npos) {
                    config.provider.cassette_path = run_provider.substr(colon + 1);
                }
            }
            print_record(chainsim::run(config));
            return 0;
        }
        if (matrix_cmd->parsed()) {
            const auto result = chainsim::run_matrix(matrix_file, matrix_output, matrix_jobs);
            int failures = 0;
            for (const auto& cell : result.cells) {
                if (cell.ok) {
                    fmt::print("[ok]    {}\n", cell.name);
                } else {
                    ++failures;
                    fmt::print("[error] {}: {}\n", cell.name, cell.error);
                }
            }
            fmt::print("summary: {}\n", result.summary_path);
            return failures == 0 ? 0 : 1;
        }
        if (compare_cmd->parsed()) {
            const auto records = collect_records(compare_records);
            const auto assertions = chainsim::load_assertions(compare_assertions);
            const auto outcomes = chainsim::compare(records, assertions);
            int failures = 0;
            for (const auto& outcome : outcomes) {
                fmt::print("[{}] {}\n", outcome.pass ? "pass" : "fail", outcome.description);
                if (!outcome.pass) ++failures;
            }
            return failures == 0 ? 0 : 1;
        }
        if (gen_cmd->parsed()) {
            chainsim::DemandTrace trace;
            if (gen_generator == "mjd") {
                trace = chainsim::merton_jump_diffusion(gen_mjd, gen_seed, gen_length);
            } else if (gen_generator == "constant") {
                trace = chainsim::constant_trace(gen_level, gen_length);
            } else if (gen_generator == "uniform") {
                trace = chainsim::uniform_trace(gen_low, gen_high, gen_seed, gen_length);
            } else {
                throw chainsim::ConfigError("unknown generator: " + gen_generator);
            }
            chainsim::save_trace(trace, gen_out);
            fmt::print("wrote {} values to {}\n", trace.values.size(), gen_out);
            return 0;
        }
        if (replay_cmd->parsed()) {
            auto config = chainsim::ExperimentConfig::from_file(replay_config);
            if (!replay_output.empty()) config.output_dir = replay_output;
            config.has_provider = true;
            config.provider = chainsim::ProviderSpec{};
            config.provider.kind = "replay";
            config.provider.cassette_path = replay_cassette;
            config.record_cassette.clear();
            print_record(chainsim::run(config));
            return 0;
        }
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
