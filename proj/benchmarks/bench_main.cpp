#include <benchmark/benchmark.h>

#include <random>

#include "hipdyn/verify.hpp"

using namespace hipdyn;

namespace {

CMatrix random_matrix(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex{coef(rng), coef(rng)};
    return m;
}

void bm_expm(benchmark::State& state) {
    const CMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 17);
    for (auto _ : state) benchmark::DoNotOptimize(expm(m));
}

void bm_eigenvalues(benchmark::State& state) {
    const CMatrix m = random_matrix(static_cast<std::size_t>(state.range(0)), 29);
    for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(m));
}

void bm_toy_generator_eval(benchmark::State& state) {
    const PictureModel model = make_toy_model(ToyParams{});
    const TimeMatrixFn g1 = generator(model, PictureTag::HIP_Kphysical);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(g1(t));
        t = t < 1.0 ? t + 1.0 / 1024.0 : 0.0;
    }
}

void bm_evolve_toy_hip(benchmark::State& state) {
    const PictureModel model = make_toy_model(ToyParams{});
    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    const IntegratorSpec spec = IntegratorSpec::rk4(1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            evolve_ket(model, PictureTag::HIP_Kphysical, psi0, spec, {0.0, 1.0}));
}

void bm_pipeline_residuals(benchmark::State& state) {
    const PictureModel model = make_random_model(static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pipeline_residuals(model, 0.5));
}

} // namespace

BENCHMARK(bm_expm)->Arg(2)->Arg(8);
BENCHMARK(bm_eigenvalues)->Arg(2)->Arg(8);
BENCHMARK(bm_toy_generator_eval);
BENCHMARK(bm_evolve_toy_hip)->Arg(100)->Arg(1000);
BENCHMARK(bm_pipeline_residuals)->Arg(1)->Arg(2);

BENCHMARK_MAIN();
