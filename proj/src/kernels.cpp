#include "gadsel/kernels.hpp"

#include <algorithm>
#include <atomic>

namespace gadsel::kernels {

namespace {

std::atomic<bool> g_parallel{true};

// Parallel-region entry costs microseconds; the tape issues many tiny ops,
// so OpenMP only pays off above this many multiply-adds.
constexpr std::size_t kParallelWorkThreshold = 1 << 16;

// Per-row workers shared by the serial and OpenMP entry points. Each output
// element is accumulated in a fixed order, so thread count never changes
// results.
inline void mm_nn_row(const double* a, const double* b, double* c,
                      std::size_t i, std::size_t k, std::size_t n) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    const double* ai = a + i * k;
    for (std::size_t p = 0; p < k; ++p) {
        const double av = ai[p];
        const double* bp = b + p * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
}

inline void mm_nt_row(const double* a, const double* b, double* c,
                      std::size_t i, std::size_t k, std::size_t n) {
    double* ci = c + i * n;
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
        const double* bj = b + j * k;
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
        ci[j] = acc;
    }
}

inline void mm_tn_row(const double* a, const double* b, double* c,
                      std::size_t i, std::size_t m, std::size_t k,
                      std::size_t n) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
        const double av = a[p * m + i];
        const double* bp = b + p * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
}

inline void spmm_row(const Csr& s, const double* b, double* c, std::size_t i,
                     std::size_t n) {
    double* ci = c + i * n;
    std::fill(ci, ci + n, 0.0);
    for (std::size_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
        const double v = s.val[e];
        const double* bc = b + s.col[e] * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] += v * bc[j];
    }
}

}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void mm_nn_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) mm_nn_row(a, b, c, i, k, n);
}

void mm_nn_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i)
        mm_nn_row(a, b, c, static_cast<std::size_t>(i), k, n);
}

void mm_nn(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n) {
    if (parallel_enabled() && m > 1 && m * k * n >= kParallelWorkThreshold)
        mm_nn_omp(a, b, c, m, k, n);
    else
        mm_nn_serial(a, b, c, m, k, n);
}

void mm_nt_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) mm_nt_row(a, b, c, i, k, n);
}

void mm_nt_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i)
        mm_nt_row(a, b, c, static_cast<std::size_t>(i), k, n);
}

void mm_nt(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n) {
    if (parallel_enabled() && m > 1 && m * k * n >= kParallelWorkThreshold)
        mm_nt_omp(a, b, c, m, k, n);
    else
        mm_nt_serial(a, b, c, m, k, n);
}

void mm_tn_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) mm_tn_row(a, b, c, i, m, k, n);
}

void mm_tn_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i)
        mm_tn_row(a, b, c, static_cast<std::size_t>(i), m, k, n);
}

void mm_tn(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n) {
    if (parallel_enabled() && m > 1 && m * k * n >= kParallelWorkThreshold)
        mm_tn_omp(a, b, c, m, k, n);
    else
        mm_tn_serial(a, b, c, m, k, n);
}

void spmm_serial(const Csr& s, const double* b, double* c, std::size_t n) {
    for (std::size_t i = 0; i < s.rows; ++i) spmm_row(s, b, c, i, n);
}

void spmm_omp(const Csr& s, const double* b, double* c, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(s.rows); ++i)
        spmm_row(s, b, c, static_cast<std::size_t>(i), n);
}

void spmm(const Csr& s, const double* b, double* c, std::size_t n) {
    if (parallel_enabled() && s.rows > 1 &&
        s.nnz() * n >= kParallelWorkThreshold)
        spmm_omp(s, b, c, n);
    else
        spmm_serial(s, b, c, n);
}

}  // namespace gadsel::kernels
