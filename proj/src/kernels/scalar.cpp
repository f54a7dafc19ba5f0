#include "table.hpp"

namespace lsdc::kernels::detail {
namespace {

template <class T>
T dot_scalar(const T* a, const T* b, std::size_t n) {
  T sum = T(0);
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

template <class T>
void axpy_scalar(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
T ssd_scalar(const T* a, const T* b, std::size_t n) {
  T sum = T(0);
  for (std::size_t i = 0; i < n; ++i) {
    const T d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

const KernelTable scalar_table = {
    dot_scalar<double>, dot_scalar<float>,
    axpy_scalar<double>, axpy_scalar<float>,
    ssd_scalar<double>, ssd_scalar<float>,
};

}  // namespace lsdc::kernels::detail
