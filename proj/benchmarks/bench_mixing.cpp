#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "selfmix/kinetic_solver.hpp"
#include "selfmix/mixer.hpp"

using namespace selfmix;

namespace {

std::vector<double> random_row(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<double> row(n);
    for (auto& r : row) r = u(rng);
    return row;
}

AlphaField random_field(const SpatialGrid& space, const VelocityGrid& vel) {
    AlphaField f(space, vel);
    const auto row = random_row(f.values().size(), 5);
    std::copy(row.begin(), row.end(), f.values().begin());
    return f;
}

}  // namespace

static void BM_PointwiseMixer(benchmark::State& state) {
    MixerParams p;
    const Vec a{0.3, -0.2};
    const Vec b{-0.5, 0.1};
    double ra = 0.7;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mass_mixer_M(ra, 1.1, a, b, p));
        ra += 1e-9;
    }
}
BENCHMARK(BM_PointwiseMixer);

static void BM_MixingRates(benchmark::State& state) {
    auto vel = build_velocity_grid(2, 1.0, static_cast<int>(state.range(0)));
    MixingKernel kernel(vel, MixerParams{});
    const auto row = random_row(vel.size(), 1);
    std::vector<double> out(vel.size());
    for (auto _ : state) {
        kernel.rates(row, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["nodes"] = static_cast<double>(vel.size());
    state.counters["pairs/s"] = benchmark::Counter(
        static_cast<double>(vel.size() * (vel.size() - 1) / 2), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_MixingRates)->Arg(4)->Arg(8)->Arg(12)->Arg(16);

static void BM_SolverStep(benchmark::State& state) {
    const auto cells = static_cast<std::size_t>(state.range(0));
    SpatialGrid space(2, {cells, cells}, 1.0 / static_cast<double>(cells));
    auto vel = build_velocity_grid(2, 1.0, 8);
    MixerParams p;
    p.E = 1e-3;
    Problem prob{space, vel, p, {}};
    KineticSolver solver(prob, SolverConfig{});
    auto s = make_state(random_field(space, vel));
    const double dt = solver.stable_dt();
    for (auto _ : state) {
        solver.step(s, dt, state.range(1) == 0 ? Integrator::euler : Integrator::rk2);
        benchmark::DoNotOptimize(s.field.values().data());
    }
    state.counters["cells"] = static_cast<double>(space.cell_count());
}
BENCHMARK(BM_SolverStep)->Args({16, 0})->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
