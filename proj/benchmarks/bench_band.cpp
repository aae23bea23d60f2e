// Factor/solve cost of the production-shaped linear system: the interleaved
// two-component step matrix has order 2*(m+1) with bandwidths (2, 2).

#include <benchmark/benchmark.h>

#include <random>

#include "lcnls/band.hpp"

using lcnls::BandMatrix;
using lcnls::cplx;

namespace {

BandMatrix step_shaped_matrix(int nodes) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 2 * nodes;
    BandMatrix m(n, 2, 2);
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = std::max(0, i - 2); j <= std::min(n - 1, i + 2); ++j) {
            if (j == i) continue;
            const cplx v(u(rng), u(rng));
            m.at(i, j) = v;
            row += std::abs(v);
        }
        m.at(i, i) = cplx(row + 1.5, u(rng));
    }
    return m;
}

std::vector<cplx> rhs_for(int nodes) {
    std::mt19937_64 rng(18);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> b(2 * nodes);
    for (cplx& v : b) v = cplx(u(rng), u(rng));
    return b;
}

} // namespace

static void BM_factor(benchmark::State& state) {
    const BandMatrix m = step_shaped_matrix(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto f = lcnls::factor(m);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_factor)->Arg(601)->Arg(2401);

static void BM_factor_and_solve(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    const BandMatrix m = step_shaped_matrix(nodes);
    const auto b = rhs_for(nodes);
    for (auto _ : state) {
        auto x = lcnls::factor(m).solve(b);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_factor_and_solve)->Arg(601)->Arg(2401);

static void BM_resolve(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    const auto f = lcnls::factor(step_shaped_matrix(nodes));
    const auto b = rhs_for(nodes);
    for (auto _ : state) {
        auto x = f.solve(b);
        benchmark::DoNotOptimize(x);
    }
}
BENCHMARK(BM_resolve)->Arg(601)->Arg(2401);

BENCHMARK_MAIN();
