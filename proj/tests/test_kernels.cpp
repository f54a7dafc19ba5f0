#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsdc/kernels.hpp"
#include "lsdc/rng.hpp"
#include "lsdc/types.hpp"
#include "oracles.hpp"

using namespace lsdc;
namespace k = lsdc::kernels;

namespace {

struct BackendGuard {
  ~BackendGuard() { k::set_backend(k::Backend::Auto); }
};

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

}  // namespace

TEST_CASE("scalar kernels match the naive loops exactly") {
  BackendGuard guard;
  k::set_backend(k::Backend::Scalar);
  Rng rng(11);
  for (const std::size_t n : kSizes) {
    const std::vector<double> a = random_vec(n, rng), b = random_vec(n, rng);
    CHECK(k::dot(a.data(), b.data(), n) == oracles::naive_dot(a.data(), b.data(), n));
    CHECK(k::sum_sq_diff(a.data(), b.data(), n) ==
          oracles::naive_sqdist(a.data(), b.data(), n));
    std::vector<double> y1 = b, y2 = b;
    k::axpy(0.37, a.data(), y1.data(), n);
    for (std::size_t i = 0; i < n; ++i) y2[i] += 0.37 * a[i];
    CHECK(y1 == y2);
  }
}

TEST_CASE("avx2 kernels agree with scalar within reassociation tolerance") {
  if (!k::avx2_available()) return;
  BackendGuard guard;
  Rng rng(12);
  for (const std::size_t n : kSizes) {
    const std::vector<double> a = random_vec(n, rng), b = random_vec(n, rng);
    std::vector<float> af(n), bf(n);
    for (std::size_t i = 0; i < n; ++i) {
      af[i] = static_cast<float>(a[i]);
      bf[i] = static_cast<float>(b[i]);
    }

    k::set_backend(k::Backend::Scalar);
    const double dot_s = k::dot(a.data(), b.data(), n);
    const double ssd_s = k::sum_sq_diff(a.data(), b.data(), n);
    const float dotf_s = k::dot(af.data(), bf.data(), n);
    std::vector<double> y_s = b;
    k::axpy(0.37, a.data(), y_s.data(), n);

    k::set_backend(k::Backend::Avx2);
    CHECK(k::backend_name() == std::string("avx2"));
    const double dot_v = k::dot(a.data(), b.data(), n);
    const double ssd_v = k::sum_sq_diff(a.data(), b.data(), n);
    const float dotf_v = k::dot(af.data(), bf.data(), n);
    std::vector<double> y_v = b;
    k::axpy(0.37, a.data(), y_v.data(), n);

    CHECK(dot_v == doctest::Approx(dot_s).epsilon(1e-13));
    CHECK(ssd_v == doctest::Approx(ssd_s).epsilon(1e-13));
    CHECK(dotf_v == doctest::Approx(dotf_s).epsilon(1e-4));
    for (std::size_t i = 0; i < n; ++i)
      CHECK(y_v[i] == doctest::Approx(y_s[i]).epsilon(1e-13));
  }
}

TEST_CASE("sqdist and gemm_nt match naive loops") {
  Rng rng(13);
  const std::size_t na = 7, nb = 5, d = 9;
  const std::vector<double> a = random_vec(na * d, rng), b = random_vec(nb * d, rng);
  std::vector<double> dist(na * nb), prod(na * nb);
  k::sqdist(a.data(), na, b.data(), nb, d, dist.data());
  k::gemm_nt(a.data(), na, b.data(), nb, d, prod.data());
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      CHECK(dist[i * nb + j] ==
            doctest::Approx(oracles::naive_sqdist(a.data() + i * d, b.data() + j * d, d))
                .epsilon(1e-12));
      CHECK(prod[i * nb + j] ==
            doctest::Approx(oracles::naive_dot(a.data() + i * d, b.data() + j * d, d))
                .epsilon(1e-12));
    }
}

TEST_CASE("row-parallel kernels are bit-identical across thread counts") {
  Rng rng(14);
  const std::size_t n = 33, d = 17;
  const std::vector<double> a = random_vec(n * d, rng);
  std::vector<double> out1(n * n), out4(n * n);

  k::set_threads(1);
  k::sqdist(a.data(), n, a.data(), n, d, out1.data());
  k::set_threads(4);
  k::sqdist(a.data(), n, a.data(), n, d, out4.data());
  CHECK(out1 == out4);

  k::set_threads(1);
  k::gemm_nt(a.data(), n, a.data(), n, d, out1.data());
  k::set_threads(3);
  k::gemm_nt(a.data(), n, a.data(), n, d, out4.data());
  CHECK(out1 == out4);
  k::set_threads(1);
}

TEST_CASE("backend selection") {
  BackendGuard guard;
  k::set_backend(k::Backend::Scalar);
  CHECK(k::backend_name() == std::string("scalar"));
  CHECK(k::active_backend() == k::Backend::Scalar);
  if (k::avx2_available()) {
    k::set_backend(k::Backend::Avx2);
    CHECK(k::active_backend() == k::Backend::Avx2);
    k::set_backend(k::Backend::Auto);
    CHECK(k::active_backend() == k::Backend::Avx2);
  } else {
    CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), ConfigError);
  }
}

TEST_CASE("thread count validation") {
  CHECK_THROWS_AS(k::set_threads(0), ConfigError);
  k::set_threads(2);
  CHECK(k::threads() == 2);
  k::set_threads(1);
}
