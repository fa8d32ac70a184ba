// Serial vs OpenMP kernel comparison. Run with --benchmark_filter=... to
// pick kernels; sizes roughly match one detector training step.

#include <benchmark/benchmark.h>

#include <vector>

#include "gadsel/kernels.hpp"
#include "gadsel/rng.hpp"

namespace {

using namespace gadsel;

std::vector<double> random_matrix(std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> m(count);
    for (auto& v : m) v = rng.uniform(-1.0, 1.0);
    return m;
}

kernels::Csr random_csr(std::size_t n, double density, std::uint64_t seed) {
    Rng rng(seed);
    kernels::Csr s;
    s.rows = s.cols = n;
    s.row_ptr.assign(n + 1, 0);
    std::vector<std::pair<std::size_t, std::size_t>> entries;
    for (std::size_t i = 0; i < n; ++i) {
        entries.emplace_back(i, i);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && rng.bernoulli(density)) entries.emplace_back(i, j);
    }
    for (const auto& [i, j] : entries) ++s.row_ptr[i + 1];
    for (std::size_t i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    s.col.resize(entries.size());
    s.val.resize(entries.size());
    std::vector<std::size_t> cursor(s.row_ptr.begin(), s.row_ptr.end() - 1);
    for (const auto& [i, j] : entries) {
        s.col[cursor[i]] = j;
        s.val[cursor[i]] = 0.1;
        ++cursor[i];
    }
    return s;
}

void BM_mm_nn_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto a = random_matrix(n * n, 1);
    auto b = random_matrix(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        kernels::mm_nn_serial(a.data(), b.data(), c.data(), n, n, n);
        benchmark::ClobberMemory();
    }
}

void BM_mm_nn_omp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    auto a = random_matrix(n * n, 1);
    auto b = random_matrix(n * n, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        kernels::mm_nn_omp(a.data(), b.data(), c.data(), n, n, n);
        benchmark::ClobberMemory();
    }
}

void BM_mm_nt_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t k = 32;
    auto a = random_matrix(n * k, 1);
    auto b = random_matrix(n * k, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        kernels::mm_nt_serial(a.data(), b.data(), c.data(), n, k, n);
        benchmark::ClobberMemory();
    }
}

void BM_mm_nt_omp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t k = 32;
    auto a = random_matrix(n * k, 1);
    auto b = random_matrix(n * k, 2);
    std::vector<double> c(n * n);
    for (auto _ : state) {
        kernels::mm_nt_omp(a.data(), b.data(), c.data(), n, k, n);
        benchmark::ClobberMemory();
    }
}

void BM_spmm_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t m = 64;
    auto s = random_csr(n, 0.02, 3);
    auto b = random_matrix(n * m, 4);
    std::vector<double> c(n * m);
    for (auto _ : state) {
        kernels::spmm_serial(s, b.data(), c.data(), m);
        benchmark::ClobberMemory();
    }
}

void BM_spmm_omp(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::size_t m = 64;
    auto s = random_csr(n, 0.02, 3);
    auto b = random_matrix(n * m, 4);
    std::vector<double> c(n * m);
    for (auto _ : state) {
        kernels::spmm_omp(s, b.data(), c.data(), m);
        benchmark::ClobberMemory();
    }
}

BENCHMARK(BM_mm_nn_serial)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_mm_nn_omp)->Arg(128)->Arg(256)->Arg(512);
BENCHMARK(BM_mm_nt_serial)->Arg(256)->Arg(512);
BENCHMARK(BM_mm_nt_omp)->Arg(256)->Arg(512);
BENCHMARK(BM_spmm_serial)->Arg(512)->Arg(2048);
BENCHMARK(BM_spmm_omp)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
