#include <benchmark/benchmark.h>

#include <numbers>

#include "qst/analytic.hpp"
#include "qst/fidelity.hpp"
#include "qst/hamiltonians.hpp"
#include "qst/linalg.hpp"
#include "qst/protocol.hpp"

namespace {

using namespace qst;

void BM_ExpmHermitian8(benchmark::State& state) {
    const Operator h = build_secular(RabiTriple(1.0, 0.0, 1.0));
    const Ket psi = initial_state(InputState(1.0, 0.0), TransferSpec(1, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(expm_apply(h, psi, 1.3));
    }
}
BENCHMARK(BM_ExpmHermitian8);

void BM_ExpmNonHermitian8(benchmark::State& state) {
    const Operator h = build_nonhermitian(RabiTriple(1.0, 0.0, 1.0), DecayRate(0.1));
    const Ket psi = initial_state(InputState(1.0, 0.0), TransferSpec(1, 2));
    for (auto _ : state) {
        benchmark::DoNotOptimize(expm_apply(h, psi, 1.3));
    }
}
BENCHMARK(BM_ExpmNonHermitian8);

void BM_Rk4Subspace(benchmark::State& state) {
    const Operator h = build_subspace_h(1.0, 1.0);
    Vector v0 = Vector::Zero(3);
    v0[1] = 1.0;
    const Ket psi(Basis::SubLossless, v0);
    const double t = std::numbers::pi / std::numbers::sqrt2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rk4_propagate(h, psi, t));
    }
}
BENCHMARK(BM_Rk4Subspace);

void BM_TwoStepProtocol(benchmark::State& state) {
    const TransferSpec spec(1, 2);
    const DecayRate decay(0.1);
    const InputState in(0.6, 0.8);
    const auto schedule = standard_schedule(spec, 1.0, decay);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_schedule(schedule, in, spec, decay));
    }
}
BENCHMARK(BM_TwoStepProtocol);

void BM_AverageFidelity(benchmark::State& state) {
    const TransferSpec spec(1, 2);
    const DecayRate decay(0.1);
    const auto schedule = standard_schedule(spec, 1.0, decay);
    for (auto _ : state) {
        const auto map = schedule_state_map(schedule, spec, decay);
        benchmark::DoNotOptimize(average_fidelity(map, spec));
    }
}
BENCHMARK(BM_AverageFidelity);

void BM_SweepTimes(benchmark::State& state) {
    const TransferSpec spec(1, 2);
    const int n = static_cast<int>(state.range(0));
    std::vector<double> grid;
    for (int i = 0; i < n; ++i) {
        grid.push_back(2.0 * std::numbers::pi / std::numbers::sqrt2 * i / (n - 1));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(sweep_times(spec, 1.0, DecayRate(0.1), grid, grid));
    }
}
BENCHMARK(BM_SweepTimes)->Arg(9)->Arg(21);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
        return 1;
    }
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
