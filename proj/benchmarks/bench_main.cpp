// Microbenchmarks for the hot paths: derivative evaluation, single steps,
// the quadrature flow oracle, and finite-difference determinants.

#include <benchmark/benchmark.h>

#include "hamadv/adversary.hpp"
#include "hamadv/diagnostics.hpp"
#include "hamadv/exact_flows.hpp"

using namespace hamadv;

namespace {

const HamiltonianSpec kHarmonic = HamiltonianSpec::harmonic(1.0);
const HamiltonianSpec kBump =
    HamiltonianSpec::separable_bump(BumpPotential({Bump{0.0, 0.4, 0.3}}));

IntegratorConfig config_for(Method m) {
    IntegratorConfig c;
    c.method = m;
    if (m == Method::step_and_project) c.base = Method::leapfrog;
    return c;
}

void bench_eval_value(benchmark::State& state) {
    const PhasePoint x = PhasePoint::planar(0.1, 1.0);
    const MultiIndex alpha = MultiIndex::planar(0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(eval_derivative(kBump, alpha, x));
}
BENCHMARK(bench_eval_value);

void bench_eval_gradient_taped(benchmark::State& state) {
    const PhasePoint x = PhasePoint::planar(0.1, 1.0);
    for (auto _ : state) {
        QueryTape tape;
        benchmark::DoNotOptimize(grad_q(kBump, x, &tape));
        benchmark::DoNotOptimize(grad_p(kBump, x, &tape));
    }
}
BENCHMARK(bench_eval_gradient_taped);

template <Method M>
void bench_step(benchmark::State& state) {
    const IntegratorConfig c = config_for(M);
    const PhasePoint x = PhasePoint::planar(0.05, 1.0);
    for (auto _ : state) {
        QueryTape tape;
        benchmark::DoNotOptimize(step(c, kBump, x, 0.02, tape));
    }
}
BENCHMARK(bench_step<Method::leapfrog>);
BENCHMARK(bench_step<Method::rk4>);
BENCHMARK(bench_step<Method::implicit_midpoint>);
BENCHMARK(bench_step<Method::step_and_project>);

void bench_time_of_flight(benchmark::State& state) {
    const BumpPotential v({Bump{0.5, 0.2, 0.3}});
    for (auto _ : state) benchmark::DoNotOptimize(time_of_flight(v, 0.0, 1.0, 0.5, 1e-12));
}
BENCHMARK(bench_time_of_flight);

void bench_bump_flow(benchmark::State& state) {
    const BumpPotential v({Bump{0.5, 0.2, 0.3}});
    const PhasePoint x0 = PhasePoint::planar(0.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(bump_flow(v, x0, 1.0, 1e-12));
}
BENCHMARK(bench_bump_flow);

void bench_jacobian(benchmark::State& state) {
    const PhaseMap map = step_map(config_for(Method::leapfrog), kHarmonic, 0.1);
    const PhasePoint x = PhasePoint::planar(0.3, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(jacobian(map, x, 1e-5));
}
BENCHMARK(bench_jacobian);

void bench_certificate_small_sweep(benchmark::State& state) {
    ConstructionParams params;
    params.dt = 0.1;
    params.sweep.q_count = 8;
    params.sweep.p_count = 2;
    params.continuity_delta = 1e-4;
    const IntegratorConfig c = config_for(Method::step_and_project);
    for (auto _ : state) benchmark::DoNotOptimize(generate_certificate(c, params));
}
BENCHMARK(bench_certificate_small_sweep)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
