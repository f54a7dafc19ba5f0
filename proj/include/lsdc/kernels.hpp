#pragma once

#include <cstddef>

namespace lsdc::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Select the kernel implementation. Auto picks AVX2 when both the build and
// the running CPU support it, scalar otherwise. The LSDC_KERNELS environment
// variable (auto|scalar|avx2) is honoured on first use. Requesting an
// unavailable backend throws ConfigError.
void set_backend(Backend b);
Backend active_backend();
const char* backend_name();
bool avx2_available();

// Worker threads for the row-parallel kernels (sqdist, gemm_nt). Results are
// bit-identical for any thread count.
void set_threads(int n);
int threads();

double dot(const double* a, const double* b, std::size_t n);
float dot(const float* a, const float* b, std::size_t n);

// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void axpy(float alpha, const float* x, float* y, std::size_t n);

double sum_sq_diff(const double* a, const double* b, std::size_t n);
float sum_sq_diff(const float* a, const float* b, std::size_t n);

// out[i*nb + j] = ||a_i - b_j||^2 for row-major a (na x d), b (nb x d).
void sqdist(const double* a, std::size_t na, const double* b, std::size_t nb,
            std::size_t d, double* out);
void sqdist(const float* a, std::size_t na, const float* b, std::size_t nb,
            std::size_t d, float* out);

// out[i*m + j] = a_i . b_j  (A * B^T for row-major operands).
void gemm_nt(const double* a, std::size_t n, const double* b, std::size_t m,
             std::size_t d, double* out);
void gemm_nt(const float* a, std::size_t n, const float* b, std::size_t m,
             std::size_t d, float* out);

}  // namespace lsdc::kernels
