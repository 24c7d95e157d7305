#include <benchmark/benchmark.h>

#include "noma/dual.hpp"
#include "noma/dynamics.hpp"
#include "noma/mdp.hpp"
#include "noma/scenario.hpp"
#include "noma/sim.hpp"

namespace {

noma::ScenarioConfig baseline() {
    noma::ScenarioConfig cfg;
    cfg.T = 4;
    cfg.N = 13;
    cfg.delta = 0.1;
    cfg.tau_s = 1e-3;
    cfg.W_hz = 1e6;
    cfg.P_dbm = 30.0;
    cfg.beta1 = 1e-6;
    cfg.beta2 = 1e-6;
    cfg.sigma1_sq_dbm = -70.0;
    cfg.sigma2_sq_dbm = -70.0;
    cfg.Y1 = 1500;
    cfg.Y2 = 1500;
    cfg.power_set = {{0.0, 0.0}, {0.0, 1.0}, {0.1, 0.9}, {0.3, 0.7},
                     {0.5, 0.5}, {0.7, 0.3}, {0.9, 0.1}, {1.0, 0.0}};
    cfg.rate_set_1 = {0, 1, 2, 3, 4};
    cfg.rate_set_2 = {0, 1, 2, 3, 4};
    cfg.validate();
    return cfg;
}

void BM_OutcomeTableBuild(benchmark::State& state) {
    const auto cfg = baseline();
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::ActionTable::build(cfg, noma::OrderFilter::Full));
    }
}
BENCHMARK(BM_OutcomeTableBuild);

void BM_BackwardInduction(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::backward_induction(cfg, table, 16.0));
    }
}
BENCHMARK(BM_BackwardInduction);

void BM_ValueIteration(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::value_iteration(cfg, table, 16.0, 1e-10));
    }
}
BENCHMARK(BM_ValueIteration);

void BM_EvaluatePolicyExact(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    const auto values = noma::backward_induction(cfg, table, 16.0);
    const auto policy = noma::extract_policy(cfg, table, 16.0, values);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::evaluate_policy_exact(cfg, policy));
    }
}
BENCHMARK(BM_EvaluatePolicyExact);

void BM_BisectionSearch(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::bisection_search(cfg, 1e-3, table));
    }
}
BENCHMARK(BM_BisectionSearch);

void BM_SampleEpisode(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    const auto values = noma::backward_induction(cfg, table, 16.0);
    const auto policy = noma::extract_policy(cfg, table, 16.0, values);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::sample_episode(cfg, policy, 16.0, seed++));
    }
}
BENCHMARK(BM_SampleEpisode);

void BM_MonteCarlo1k(benchmark::State& state) {
    const auto cfg = baseline();
    const auto table = noma::ActionTable::build(cfg, noma::OrderFilter::Full);
    const auto values = noma::backward_induction(cfg, table, 16.0);
    const auto policy = noma::extract_policy(cfg, table, 16.0, values);
    for (auto _ : state) {
        benchmark::DoNotOptimize(noma::monte_carlo(cfg, policy, 16.0, 1000, 42));
    }
}
BENCHMARK(BM_MonteCarlo1k);

}  // namespace

BENCHMARK_MAIN();
