#include <benchmark/benchmark.h>

#include "mbcool/protocol.hpp"

using namespace mbcool;

namespace {

SystemParams scaled(int dim) {
    SystemParams p;
    p.theta_T = theta_for_occupation(8.0);
    p.dim = dim;
    p.truncation.tail_tol = 1e-3;
    return p;
}

DensityMatrix warm_state(int dim) { return thermal_state(theta_for_occupation(8.0), dim, TruncationPolicy{1e-3, {}}); }

}  // namespace

static void BM_BuildMeasurementOps(benchmark::State& state) {
    const SystemParams p = scaled(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(build_measurement_ops(p, p.dim, Charge::Minus));
}
BENCHMARK(BM_BuildMeasurementOps)->Arg(64)->Arg(128);

static void BM_MeasureAndCollapse(benchmark::State& state) {
    const SystemParams p = scaled(int(state.range(0)));
    const MeasurementOps ops = build_measurement_ops(p, p.dim, Charge::Minus);
    const DensityMatrix rho = warm_state(p.dim);
    for (auto _ : state) benchmark::DoNotOptimize(measure_and_collapse(rho, ops, 0.3));
}
BENCHMARK(BM_MeasureAndCollapse)->Arg(64)->Arg(128);

static void BM_LindbladRhs(benchmark::State& state) {
    const int dim = int(state.range(0));
    const DensityMatrix rho = warm_state(dim);
    const BathParams bath{5e-4, 10.0};
    for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(rho.matrix(), OscillatorHamiltonian{0.3, 0.0}, bath));
}
BENCHMARK(BM_LindbladRhs)->Arg(64)->Arg(128);

static void BM_InteractionWindow(benchmark::State& state) {
    const SystemParams p = scaled(int(state.range(0)));
    const JointBlocks blocks = prepare_joint(warm_state(p.dim), Charge::Minus);
    const BathParams bath{5e-4, 10.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_joint_blocks(blocks, p, bath, p.interaction_angle, default_step_angle(bath)));
}
BENCHMARK(BM_InteractionWindow)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_DissipativeFeedback(benchmark::State& state) {
    const int dim = int(state.range(0));
    const DensityMatrix rho = DensityMatrix::pure(coherent_ket({0.6, -0.3}, dim));
    const FeedbackPlan plan = feedback_plan(1.2, -0.6);
    const BathParams bath{5e-4, 10.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(apply_feedback_dissipative(rho, plan, bath, default_step_angle(bath)));
}
BENCHMARK(BM_DissipativeFeedback)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Entropy(benchmark::State& state) {
    const DensityMatrix rho = warm_state(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(von_neumann_entropy(rho));
}
BENCHMARK(BM_Entropy)->Arg(64)->Arg(128);

static void BM_MaxQ(benchmark::State& state) {
    const DensityMatrix rho = DensityMatrix::pure(coherent_ket({1.1, 0.4}, int(state.range(0))));
    for (auto _ : state) benchmark::DoNotOptimize(max_q(rho));
}
BENCHMARK(BM_MaxQ)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_UnitaryTrajectory(benchmark::State& state) {
    SystemParams p = scaled(64);
    p.n_measurements = 150;
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_trajectory(p, ++seed));
}
BENCHMARK(BM_UnitaryTrajectory)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
