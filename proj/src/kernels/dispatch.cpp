#include "lsdc/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <thread>
#include <vector>

#include "lsdc/types.hpp"
#include "table.hpp"

namespace lsdc::kernels {
namespace {

using detail::KernelTable;

bool cpu_has_avx2() {
#if defined(LSDC_HAVE_AVX2) && defined(__x86_64__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend backend_from_env() {
  const char* env = std::getenv("LSDC_KERNELS");
  if (env == nullptr || std::strcmp(env, "auto") == 0) return Backend::Auto;
  if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
  if (std::strcmp(env, "avx2") == 0) return Backend::Avx2;
  throw ConfigError("LSDC_KERNELS must be auto, scalar or avx2");
}

Backend resolve(Backend requested) {
  if (requested == Backend::Auto)
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
  if (requested == Backend::Avx2 && !cpu_has_avx2())
    throw ConfigError("avx2 kernels are not available on this machine");
  return requested;
}

struct State {
  Backend backend;
  const KernelTable* table;
};

State make_state(Backend requested) {
  const Backend b = resolve(requested);
#if defined(LSDC_HAVE_AVX2)
  if (b == Backend::Avx2) return {b, &detail::avx2_table};
#endif
  return {Backend::Scalar, &detail::scalar_table};
}

State& state() {
  static State s = make_state(backend_from_env());
  return s;
}

const KernelTable& table() { return *state().table; }

std::atomic<int> g_threads{1};

// Rows are split into contiguous chunks with disjoint output ranges, so the
// result is identical for any thread count.
template <class F>
void for_rows(std::size_t n, F f) {
  const int t = g_threads.load();
  if (t <= 1 || n < 2 * static_cast<std::size_t>(t)) {
    f(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + t - 1) / t;
  std::vector<std::thread> pool;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    pool.emplace_back([=] { f(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void set_backend(Backend b) { state() = make_state(b); }

Backend active_backend() { return state().backend; }

const char* backend_name() {
  return state().backend == Backend::Avx2 ? "avx2" : "scalar";
}

bool avx2_available() { return cpu_has_avx2(); }

void set_threads(int n) {
  if (n < 1) throw ConfigError("threads must be >= 1");
  g_threads.store(n);
}

int threads() { return g_threads.load(); }

double dot(const double* a, const double* b, std::size_t n) {
  return table().dot_d(a, b, n);
}
float dot(const float* a, const float* b, std::size_t n) {
  return table().dot_f(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy_d(alpha, x, y, n);
}
void axpy(float alpha, const float* x, float* y, std::size_t n) {
  table().axpy_f(alpha, x, y, n);
}

double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return table().ssd_d(a, b, n);
}
float sum_sq_diff(const float* a, const float* b, std::size_t n) {
  return table().ssd_f(a, b, n);
}

template <class T>
static void sqdist_impl(const T* a, std::size_t na, const T* b, std::size_t nb,
                        std::size_t d, T* out,
                        T (*ssd)(const T*, const T*, std::size_t)) {
  for_rows(na, [=](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        out[i * nb + j] = ssd(a + i * d, b + j * d, d);
  });
}

void sqdist(const double* a, std::size_t na, const double* b, std::size_t nb,
            std::size_t d, double* out) {
  sqdist_impl(a, na, b, nb, d, out, table().ssd_d);
}
void sqdist(const float* a, std::size_t na, const float* b, std::size_t nb,
            std::size_t d, float* out) {
  sqdist_impl(a, na, b, nb, d, out, table().ssd_f);
}

template <class T>
static void gemm_nt_impl(const T* a, std::size_t n, const T* b, std::size_t m,
                         std::size_t d, T* out,
                         T (*dotf)(const T*, const T*, std::size_t)) {
  for_rows(n, [=](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out[i * m + j] = dotf(a + i * d, b + j * d, d);
  });
}

void gemm_nt(const double* a, std::size_t n, const double* b, std::size_t m,
             std::size_t d, double* out) {
  gemm_nt_impl(a, n, b, m, d, out, table().dot_d);
}
void gemm_nt(const float* a, std::size_t n, const float* b, std::size_t m,
             std::size_t d, float* out) {
  gemm_nt_impl(a, n, b, m, d, out, table().dot_f);
}

}  // namespace lsdc::kernels
