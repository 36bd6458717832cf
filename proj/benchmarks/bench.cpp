// Microbenchmarks for the hot paths: collision stepping, angular sampling,
// transport solvers, and the symmetrized observable evaluation.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "kacsim/measures.hpp"
#include "kacsim/metrics.hpp"
#include "kacsim/particle.hpp"

using namespace kacsim;

namespace {

constexpr double kB = 1.0 / (4.0 * std::numbers::pi);

std::vector<double> gaussian_cloud(int d, std::size_t n, std::uint64_t seed) {
    Rng rng = make_stream(seed, 1);
    std::vector<double> v(n * d);
    for (auto& x : v) x = normal01(rng);
    return v;
}

void bm_step_maxwell(benchmark::State& state) {
    auto spec = KernelSpec::maxwell_grad_cutoff(3, kB);
    SystemState s(3, gaussian_cloud(3, state.range(0), 11));
    Rng rng = make_stream(12, 2);
    for (auto _ : state) step(s, spec, rng);
    state.SetItemsProcessed(state.iterations());
}

void bm_step_hard_sphere(benchmark::State& state) {
    auto spec = KernelSpec::hard_sphere(3, kB);
    SystemState s(3, gaussian_cloud(3, state.range(0), 13));
    Rng rng = make_stream(14, 2);
    for (auto _ : state) step(s, spec, rng);
    state.SetItemsProcessed(state.iterations());
}

void bm_sample_sigma(benchmark::State& state) {
    auto spec = KernelSpec::power_law(3, 0, 0.5, 0.2);
    Rng rng = make_stream(15, 2);
    const std::vector<double> u{0.0, 0.0, 1.0};
    std::vector<double> sigma(3);
    for (auto _ : state) {
        sample_sigma(u, spec, rng, sigma);
        benchmark::DoNotOptimize(sigma.data());
    }
    state.SetItemsProcessed(state.iterations());
}

void bm_wasserstein_assignment(benchmark::State& state) {
    const std::size_t n = state.range(0);
    auto mu = EmpiricalMeasure::uniform(3, gaussian_cloud(3, n, 16));
    auto nu = EmpiricalMeasure::uniform(3, gaussian_cloud(3, n, 17));
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein(mu, nu, 1.0));
}

void bm_wasserstein_quantile(benchmark::State& state) {
    const std::size_t n = state.range(0);
    auto mu = EmpiricalMeasure::uniform(1, gaussian_cloud(1, n, 18));
    auto nu = EmpiricalMeasure::uniform(1, gaussian_cloud(1, n, 19));
    for (auto _ : state) benchmark::DoNotOptimize(wasserstein(mu, nu, 1.0));
}

void bm_sym_observable(benchmark::State& state) {
    const std::size_t n = state.range(0);
    auto v = gaussian_cloud(3, n, 20);
    TensorObservable phi;
    for (int k = 0; k < 2; ++k) {
        CosineTerm t;
        t.amplitude = 0.5;
        t.frequency = {1.0, 0.5 * k, 0.25};
        phi.components.push_back(cosine_packet({t}, NormKind::Lipschitz));
    }
    for (auto _ : state) benchmark::DoNotOptimize(sym_observable(v, 3, phi));
    state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(bm_step_maxwell)->Arg(64)->Arg(1024);
BENCHMARK(bm_step_hard_sphere)->Arg(64)->Arg(1024)->Arg(8192);
BENCHMARK(bm_sample_sigma);
BENCHMARK(bm_wasserstein_assignment)->Arg(128)->Arg(512);
BENCHMARK(bm_wasserstein_quantile)->Arg(4096);
BENCHMARK(bm_sym_observable)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
