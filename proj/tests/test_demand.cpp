#include "chainsim/demand.hpp"

#include "chainsim/util.hpp"

#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <fstream>

using namespace chainsim;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("degenerate process is constant") {
    MjdParams params;
    params.drift = 0.0;
    params.volatility = 0.0;
    params.jump_intensity = 0.0;
    params.initial_level = 10.0;
    const auto trace = merton_jump_diffusion(params, 42, 50);
    REQUIRE(trace.values.size() == 50);
    for (int v : trace.values) CHECK(v == 10);
}

TEST_CASE("values always stay within the demand range") {
    MjdParams wild;
    wild.drift = 0.4;
    wild.volatility = 1.5;
    wild.jump_intensity = 0.3;
    wild.jump_mean = 2.0;
    wild.jump_sd = 1.5;
    const auto trace = merton_jump_diffusion(wild, 7, 10000);
    for (int v : trace.values) {
        CHECK(v >= 0);
        CHECK(v <= 20);
    }
}

TEST_CASE("default parameters produce a spike in most seeds") {
    int spiking = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto trace = merton_jump_diffusion(MjdParams{}, seed, 100);
        for (int v : trace.values) {
            if (v >= 15) {
                ++spiking;
                break;
            }
        }
    }
    CHECK(spiking >= 90);
}

TEST_CASE("seed determinism") {
    const auto a = merton_jump_diffusion(MjdParams{}, 13, 200);
    const auto b = merton_jump_diffusion(MjdParams{}, 13, 200);
    const auto c = merton_jump_diffusion(MjdParams{}, 14, 200);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("parameter validation") {
    MjdParams params;
    params.volatility = -0.1;
    CHECK_THROWS_AS(merton_jump_diffusion(params, 1, 10), ConfigError);
    params = MjdParams{};
    params.jump_intensity = -1.0;
    CHECK_THROWS_AS(merton_jump_diffusion(params, 1, 10), ConfigError);
    params = MjdParams{};
    params.drift = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(merton_jump_diffusion(params, 1, 10), ConfigError);
    CHECK_THROWS_AS(merton_jump_diffusion(MjdParams{}, 1, 0), ConfigError);
}

TEST_CASE("synthetic traces") {
    const auto constant = constant_trace(5, 3);
    CHECK(constant.values == std::vector<int>{5, 5, 5});
    CHECK(constant.generator_id == "constant");

    const auto zeros = uniform_trace(0, 0, 9, 4);
    CHECK(zeros.values == std::vector<int>{0, 0, 0, 0});

    CHECK(uniform_trace(2, 11, 123, 64).values == uniform_trace(2, 11, 123, 64).values);
    for (int v : uniform_trace(3, 9, 5, 1000).values) {
        CHECK(v >= 3);
        CHECK(v <= 9);
    }

    CHECK_THROWS_AS(constant_trace(21, 3), ConfigError);
    CHECK_THROWS_AS(constant_trace(-1, 3), ConfigError);
    CHECK_THROWS_AS(uniform_trace(5, 2, 1, 3), ConfigError);
    CHECK_THROWS_AS(uniform_trace(0, 30, 1, 3), ConfigError);
}

TEST_CASE("trace files round-trip losslessly") {
    const std::string path = temp_path("chainsim_trace_roundtrip.txt");
    const DemandTrace traces[] = {
        merton_jump_diffusion(MjdParams{}, 13, 100),
        constant_trace(7, 25),
        uniform_trace(1, 19, 99, 50),
    };
    for (const auto& trace : traces) {
        save_trace(trace, path);
        const auto loaded = load_trace(path);
        CHECK(loaded == trace);
        CHECK(loaded.seed == trace.seed);
        CHECK(loaded.generator_id == trace.generator_id);
        CHECK(loaded.params == trace.params);
    }
    std::filesystem::remove(path);
}

TEST_CASE("truncated or malformed trace files are rejected") {
    const std::string path = temp_path("chainsim_trace_bad.txt");
    {
        std::ofstream out(path);
        out << "# generator=mjd\n# seed=13\n"; // params header and values missing
    }
    CHECK_THROWS_AS(load_trace(path), ConfigError);
    {
        std::ofstream out(path);
        out << "# generator=mjd\n# seed=13\n# params=x=1\n5\nbanana\n";
    }
    CHECK_THROWS_AS(load_trace(path), ConfigError);
    CHECK_THROWS_AS(load_trace(temp_path("chainsim_no_such_file.txt")), ConfigError);
    std::filesystem::remove(path);
}
