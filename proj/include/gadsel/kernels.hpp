#pragma once

#include <cstddef>
#include <vector>

namespace gadsel::kernels {

// Compressed sparse row matrix. Where it backs a normalized adjacency the
// matrix is symmetric, which spmm's transpose-free backward relies on.
struct Csr {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> row_ptr;  // size rows + 1
    std::vector<std::size_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return col.size(); }
};

// Global switch between the OpenMP kernels and the serial references.
// Both variants share the per-row inner loops, so results are bitwise
// identical either way; the switch exists for benchmarking and tests.
bool parallel_enabled();
void set_parallel(bool on);

// c(m x n) = a(m x k) * b(k x n)
void mm_nn_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
void mm_nn_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
void mm_nn(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n);

// c(m x n) = a(m x k) * b(n x k)^T
void mm_nt_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
void mm_nt_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
void mm_nt(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n);

// c(m x n) = a(k x m)^T * b(k x n)
void mm_tn_serial(const double* a, const double* b, double* c, std::size_t m,
                  std::size_t k, std::size_t n);
void mm_tn_omp(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
void mm_tn(const double* a, const double* b, double* c, std::size_t m,
           std::size_t k, std::size_t n);

// c(rows x n) = s * b(cols x n)
void spmm_serial(const Csr& s, const double* b, double* c, std::size_t n);
void spmm_omp(const Csr& s, const double* b, double* c, std::size_t n);
void spmm(const Csr& s, const double* b, double* c, std::size_t n);

}  // namespace gadsel::kernels
