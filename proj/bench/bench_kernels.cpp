// Serial reference vs OpenMP kernels, plus the staged-vs-flat solve contrast.

#include <benchmark/benchmark.h>

#include "bandsparse/dict.hpp"
#include "bandsparse/numerics.hpp"
#include "bandsparse/sim.hpp"
#include "bandsparse/solve.hpp"
#include "bandsparse/zoom.hpp"

namespace bs = bandsparse;

namespace {

bs::CMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    bs::Rng rng(seed);
    bs::CMatrix a(rows, cols);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) a(i, j) = rng.complex_gaussian(1.0);
    return a;
}

void bm_gram_serial(benchmark::State& state) {
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 11);
    for (auto _ : state) {
        auto g = bs::gram_serial(a);
        benchmark::DoNotOptimize(g.data().data());
    }
}

void bm_gram_parallel(benchmark::State& state) {
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 11);
    for (auto _ : state) {
        auto g = bs::gram(a);
        benchmark::DoNotOptimize(g.data().data());
    }
}

void bm_hermitian_product_serial(benchmark::State& state) {
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 13);
    bs::Rng rng(17);
    bs::CVector y(a.rows());
    for (auto& v : y) v = rng.complex_gaussian(1.0);
    for (auto _ : state) {
        auto p = bs::hermitian_product_serial(a, y);
        benchmark::DoNotOptimize(p.data());
    }
}

void bm_hermitian_product_parallel(benchmark::State& state) {
    const auto a = random_matrix(static_cast<std::size_t>(state.range(0)),
                                 static_cast<std::size_t>(state.range(1)), 13);
    bs::Rng rng(17);
    bs::CVector y(a.rows());
    for (auto& v : y) v = rng.complex_gaussian(1.0);
    for (auto _ : state) {
        auto p = bs::hermitian_product(a, y);
        benchmark::DoNotOptimize(p.data());
    }
}

void bm_build_wideband_dictionary(benchmark::State& state) {
    const auto scheme = bs::SamplingScheme::uniform(static_cast<std::size_t>(state.range(0)));
    const auto grid = bs::BandGrid::uniform_bands(1, static_cast<int>(state.range(1)));
    for (auto _ : state) {
        auto d = bs::build_dictionary(scheme, grid, bs::DictKind::wideband_integrated);
        benchmark::DoNotOptimize(d.matrix.data().data());
    }
}

// End-to-end contrast the zoom pipeline exists for: flat narrowband LASSO
// against the two-stage wideband plan on the same data.
void bm_zoom_two_stage(benchmark::State& state) {
    const auto scheme = bs::SamplingScheme::uniform(256);
    bs::SignalSpec spec;
    spec.dims = 1;
    spec.k = 3;
    spec.min_spacing = 2.0 / 256;
    bs::Rng rng(7);
    bs::SignalRealization truth;
    bs::CVector clean = bs::generate_signal(spec, scheme, rng, &truth);
    bs::CVector y = bs::add_noise(clean, bs::NoiseSpec{15.0}, rng);
    bs::ZoomPlan plan;
    plan.stages = {{40, bs::DictKind::wideband_integrated},
                   {50, bs::DictKind::wideband_integrated}};
    plan.alphas = {0.5, 0.5};
    for (auto _ : state) {
        auto r = bs::run_zoom(y, scheme, plan);
        benchmark::DoNotOptimize(r.model_order);
    }
}

void bm_flat_narrowband(benchmark::State& state) {
    const auto scheme = bs::SamplingScheme::uniform(256);
    bs::SignalSpec spec;
    spec.dims = 1;
    spec.k = 3;
    spec.min_spacing = 2.0 / 256;
    bs::Rng rng(7);
    bs::SignalRealization truth;
    bs::CVector clean = bs::generate_signal(spec, scheme, rng, &truth);
    bs::CVector y = bs::add_noise(clean, bs::NoiseSpec{15.0}, rng);
    bs::ZoomPlan plan;
    plan.stages = {{2000, bs::DictKind::narrowband}};
    plan.alphas = {0.5};
    plan.max_entries = 1u << 26;
    for (auto _ : state) {
        auto r = bs::run_zoom(y, scheme, plan);
        benchmark::DoNotOptimize(r.model_order);
    }
}

}  // namespace

BENCHMARK(bm_gram_serial)->Args({256, 128})->Args({512, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gram_parallel)->Args({256, 128})->Args({512, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(bm_hermitian_product_serial)->Args({2048, 1024})->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_hermitian_product_parallel)->Args({2048, 1024})->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_build_wideband_dictionary)->Args({512, 64})->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_zoom_two_stage)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_flat_narrowband)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
