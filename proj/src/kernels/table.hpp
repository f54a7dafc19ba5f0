#pragma once

#include <cstddef>

namespace lsdc::kernels::detail {

struct KernelTable {
  double (*dot_d)(const double*, const double*, std::size_t);
  float (*dot_f)(const float*, const float*, std::size_t);
  void (*axpy_d)(double, const double*, double*, std::size_t);
  void (*axpy_f)(float, const float*, float*, std::size_t);
  double (*ssd_d)(const double*, const double*, std::size_t);
  float (*ssd_f)(const float*, const float*, std::size_t);
};

extern const KernelTable scalar_table;
#if defined(LSDC_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif

}  // namespace lsdc::kernels::detail
