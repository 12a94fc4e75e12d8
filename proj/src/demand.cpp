#include "chainsim/demand.hpp"

#include "chainsim/util.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

namespace chainsim {

namespace {

int to_demand_units(double level) {
    const double bounded = std::clamp(level, 0.0, static_cast<double>(kDemandCeiling));
    return round_half_up(bounded);
}

std::map<std::string, double> mjd_param_map(const MjdParams& p) {
    return {{"drift", p.drift},
            {"volatility", p.volatility},
            {"jump_intensity", p.jump_intensity},
            {"jump_mean", p.jump_mean},
            {"jump_sd", p.jump_sd},
            {"initial_level", p.initial_level}};
}

} // namespace

void MjdParams::validate() const {
    for (double v : {drift, volatility, jump_intensity, jump_mean, jump_sd, initial_level}) {
        if (!std::isfinite(v)) throw ConfigError("mjd: parameters must be finite");
    }
    if (volatility < 0.0) throw ConfigError("mjd: volatility must be >= 0");
    if (jump_intensity < 0.0) throw ConfigError("mjd: jump_intensity must be >= 0");
}

DemandTrace merton_jump_diffusion(const MjdParams& params, std::uint64_t seed, size_t length) {
    params.validate();
    if (length < 1) throw ConfigError("mjd: length must be >= 1");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::normal_distribution<double> jump_size(params.jump_mean, params.jump_sd);
    std::poisson_distribution<int> jump_count(params.jump_intensity);

    DemandTrace trace;
    trace.seed = seed;
    trace.generator_id = "mjd";
    trace.params = mjd_param_map(params);
    trace.values.reserve(length);

    // The level saturates at the demand ceiling instead of accumulating
    // headroom above it, so a spike decays back once the drift pulls it
    // down; the small floor lets the multiplicative process recover from 0.
    constexpr double kLevelFloor = 0.3;
    double level = std::clamp(params.initial_level, kLevelFloor, static_cast<double>(kDemandCeiling));
    trace.values.push_back(to_demand_units(level));
    for (size_t t = 1; t < length; ++t) {
        double log_increment = params.drift - 0.5 * params.volatility * params.volatility +
                               params.volatility * gauss(rng);
        if (params.jump_intensity > 0.0) {
            const int jumps = jump_count(rng);
            for (int j = 0; j < jumps; ++j) log_increment += jump_size(rng);
        }
        level *= std::exp(log_increment);
        level = std::clamp(level, kLevelFloor, static_cast<double>(kDemandCeiling));
        trace.values.push_back(to_demand_units(level));
    }
    return trace;
}

DemandTrace constant_trace(int level, size_t length) {
    if (level < 0 || level > kDemandCeiling) {
        throw ConfigError("constant_trace: level must be in [0, 20]");
    }
    DemandTrace trace;
    trace.generator_id = "constant";
    trace.params = {{"level", static_cast<double>(level)}};
    trace.values.assign(length, level);
    return trace;
}

DemandTrace uniform_trace(int low, int high, std::uint64_t seed, size_t length) {
    if (low < 0 || high > kDemandCeiling || low > high) {
        throw ConfigError("uniform_trace: bounds must satisfy 0 <= low <= high <= 20");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(low, high);
    DemandTrace trace;
    trace.seed = seed;
    trace.generator_id = "uniform";
    trace.params = {{"low", static_cast<double>(low)}, {"high", static_cast<double>(high)}};
    trace.values.reserve(length);
    for (size_t i = 0; i < length; ++i) trace.values.push_back(dist(rng));
    return trace;
}

void save_trace(const DemandTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("save_trace: cannot open " + path);
    out << "# generator=" << trace.generator_id << "\n";
    out << "# seed=" << trace.seed << "\n";
    out << "# params=";
    bool first = true;
    for (const auto& [key, value] : trace.params) {
        if (!first) out << ";";
        first = false;
        out << key << "=" << std::setprecision(17) << value;
    }
    out << "\n";
    for (int v : trace.values) out << v << "\n";
    if (!out) throw ConfigError("save_trace: write failed for " + path);
}

DemandTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("load_trace: cannot open " + path);
    DemandTrace trace;
    std::string line;
    int header_lines = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("load_trace: malformed header: " + line);
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "generator") {
                trace.generator_id = value;
            } else if (key == "seed") {
                trace.seed = std::stoull(value);
            } else if (key == "params") {
                std::istringstream items(value);
                std::string item;
                while (std::getline(items, item, ';')) {
                    if (item.empty()) continue;
                    const auto kv = item.find('=');
                    if (kv == std::string::npos) {
                        throw ConfigError("load_trace: malformed params entry: " + item);
                    }
                    trace.params[item.substr(0, kv)] = std::stod(item.substr(kv + 1));
                }
            } else {
                throw ConfigError("load_trace: unknown header key: " + key);
            }
            ++header_lines;
            continue;
        }
        size_t consumed = 0;
        int value = 0;
        try {
            value = std::stoi(line, &consumed);
        } catch (const std::exception&) {
            throw ConfigError("load_trace: malformed value line: " + line);
        }
        if (consumed != line.size()) {
            throw ConfigError("load_trace: malformed value line: " + line);
        }
        trace.values.push_back(value);
    }
    if (header_lines < 3 || trace.values.empty()) {
        throw ConfigError("load_trace: truncated or incomplete file: " + path);
    }
    return trace;
}

} // namespace chainsim
