#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace chainsim {

inline constexpr int kDemandCeiling = 20;

/// Merton jump diffusion parameters: geometric diffusion plus compound
/// Poisson log-normal jumps, simulated per discrete step.
struct MjdParams {
    double drift = -0.02;           // per step; pulls spikes back down
    double volatility = 0.12;       // per sqrt(step)
    double jump_intensity = 0.05;   // expected jumps per step
    double jump_mean = 1.1;         // mean of log jump size
    double jump_sd = 0.4;           // sd of log jump size
    double initial_level = 10.0;    // units

    void validate() const;
};

/// Seeded integer customer-demand series. Values are always in [0, 20].
struct DemandTrace {
    std::vector<int> values;
    std::uint64_t seed = 0;
    std::string generator_id;
    std::map<std::string, double> params;

    size_t length() const { return values.size(); }
    bool operator==(const DemandTrace&) const = default;
};

DemandTrace merton_jump_diffusion(const MjdParams& params, std::uint64_t seed, size_t length);

DemandTrace constant_trace(int level, size_t length);

DemandTrace uniform_trace(int low, int high, std::uint64_t seed, size_t length);

/// Line-oriented text format: `# generator=`, `# seed=`, `# params=` headers
/// followed by one integer per line.
void save_trace(const DemandTrace& trace, const std::string& path);
DemandTrace load_trace(const std::string& path);

} // namespace chainsim
