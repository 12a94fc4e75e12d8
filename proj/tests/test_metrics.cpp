#include "chainsim/metrics.hpp"

#include "chainsim/util.hpp"

#include <cmath>
#include <doctest.h>
#include <random>

using namespace chainsim;

namespace {

// Independent oracle: textbook two-pass population sd over a copied series.
double cv_oracle(const std::vector<double>& series) {
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double acc = 0.0;
    for (double v : series) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(series.size())) / mean;
}

} // namespace

TEST_CASE("coefficient of variation on known series") {
    CHECK(coeff_variation(std::vector<double>{5, 5, 5, 5}) == 0.0);
    CHECK(coeff_variation(std::vector<double>{0, 10}) == doctest::Approx(1.0).epsilon(1e-12));
    // sigma = 2, mean = 5
    CHECK(coeff_variation(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9}) ==
          doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("coefficient of variation error cases") {
    CHECK_THROWS_AS(coeff_variation(std::vector<double>{1.0}), MetricError);
    CHECK_THROWS_AS(coeff_variation(std::vector<double>{}), MetricError);
    CHECK_THROWS_AS(coeff_variation(std::vector<double>{0, 0, 0}), MetricError);
    CHECK_THROWS_AS(coeff_variation(std::vector<double>{-2, 2}), MetricError); // mean 0
}

TEST_CASE("coefficient of variation properties") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> value(0.5, 20.0);
    std::uniform_real_distribution<double> scale(0.1, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> series(12);
        for (auto& v : series) v = value(rng);
        const double k = scale(rng);
        std::vector<double> scaled = series;
        for (auto& v : scaled) v *= k;
        const double base = coeff_variation(series);
        // scale-free
        CHECK(coeff_variation(scaled) == doctest::Approx(base).epsilon(1e-9));
        // matches the independent oracle
        CHECK(base == doctest::Approx(cv_oracle(series)).epsilon(1e-12));
        // adding a constant strictly decreases a positive CV
        if (base > 1e-9) {
            std::vector<double> shifted = series;
            for (auto& v : shifted) v += 5.0;
            CHECK(coeff_variation(shifted) < base);
        }
    }
}

TEST_CASE("aggregate bullwhip") {
    CHECK(aggregate_bullwhip(std::vector<double>{0.5, 0.8, 2.0}) ==
          doctest::Approx(0.8).epsilon(1e-12));
    CHECK(aggregate_bullwhip(std::vector<double>{1.0, 1.0, 1.0}) == 1.0);
    CHECK(aggregate_bullwhip(std::vector<double>{0.7}) == doctest::Approx(0.7));
    CHECK_THROWS_AS(aggregate_bullwhip(std::vector<double>{}), MetricError);
    CHECK_THROWS_AS(aggregate_bullwhip(std::vector<double>{0.5, -1.0}), MetricError);

    // n copies of c multiply to c^n
    std::vector<double> copies(5, 0.9);
    CHECK(aggregate_bullwhip(copies) == doctest::Approx(std::pow(0.9, 5)).epsilon(1e-12));
}

TEST_CASE("cumulative global cost") {
    CHECK(cumulative_global_cost({{1, 2}, {3, 4}}) == 10.0);
    CHECK(cumulative_global_cost({{0, 0}, {0, 0}}) == 0.0);
    CHECK(cumulative_global_cost({}) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> cost(0, 400);
    std::vector<std::vector<double>> ledger(100, std::vector<double>(3));
    double oracle = 0.0;
    for (auto& row : ledger) {
        for (auto& cell : row) cell = cost(rng);
    }
    for (size_t t = 0; t < ledger.size(); ++t) {
        for (size_t i = 0; i < ledger[t].size(); ++i) oracle += ledger[t][i];
    }
    CHECK(cumulative_global_cost(ledger) == oracle);
}

TEST_CASE("negligible bullwhip threshold") {
    CHECK(bullwhip_negligible(0.79));
    CHECK_FALSE(bullwhip_negligible(1.0));
    CHECK_FALSE(bullwhip_negligible(65.77168));
}

TEST_CASE("report assembly and serialization") {
    std::vector<std::vector<double>> costs{{1, 2, 3}, {4, 5, 6}};
    std::vector<std::vector<int>> orders{{3, 3, 3, 3}, {0, 10, 0, 10}, {5, 6, 7, 8}};
    MetricsReport report = compute_report(costs, orders, 0);

    CHECK(report.per_agent_cost == std::vector<double>{5, 7, 9});
    CHECK(report.cumulative_global_cost == 21.0);
    REQUIRE(report.per_agent_cv.size() == 3);
    CHECK(*report.per_agent_cv[0] == 0.0);
    REQUIRE(report.aggregate_bullwhip.has_value());
    CHECK(*report.aggregate_bullwhip == 0.0);

    // invariant: cumulative equals the sum of per-agent costs
    double sum = 0.0;
    for (double c : report.per_agent_cost) sum += c;
    CHECK(report.cumulative_global_cost == sum);

    const std::string json = report.to_json();
    const MetricsReport parsed = MetricsReport::from_json(json);
    CHECK(parsed.to_json() == json);

    // an all-zero order series leaves the CV undefined, not zero
    std::vector<std::vector<int>> zero_orders{{0, 0, 0}, {1, 2, 3}};
    MetricsReport undefined = compute_report(costs, zero_orders, 0);
    CHECK_FALSE(undefined.per_agent_cv[0].has_value());
    CHECK_FALSE(undefined.aggregate_bullwhip.has_value());
    const MetricsReport reparsed = MetricsReport::from_json(undefined.to_json());
    CHECK_FALSE(reparsed.aggregate_bullwhip.has_value());
}

TEST_CASE("report warmup window skips early orders") {
    std::vector<std::vector<double>> costs{{0, 0}};
    // agent 0: wild start then constant; warmup 2 removes the wild part
    std::vector<std::vector<int>> orders{{90, 0, 5, 5, 5, 5}, {4, 4, 4, 5, 5, 5}};
    MetricsReport report = compute_report(costs, orders, 2);
    CHECK(*report.per_agent_cv[0] == 0.0);
    MetricsReport full = compute_report(costs, orders, 0);
    CHECK(*full.per_agent_cv[0] > 0.0);
}
