#include "lsdc/kmeans.hpp"

#include <cmath>

#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

void assign(const Matrix& points, const Matrix& centroids, Matrix& d2,
            LabelVector& labels, real& inertia) {
  const std::size_t n = points.rows(), k = centroids.rows();
  kernels::sqdist(points.data(), n, centroids.data(), k, points.cols(), d2.data());
  inertia = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (d2(i, c) < d2(i, best)) best = c;  // ties keep the lower index
    labels[i] = static_cast<std::uint32_t>(best);
    inertia += d2(i, best);
  }
}

Matrix init_plusplus(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows(), d = points.cols();
  Matrix centroids(k, d);
  std::vector<real> best(n);

  std::size_t first = static_cast<std::size_t>(rng.below(n));
  for (std::size_t j = 0; j < d; ++j) centroids(0, j) = points(first, j);
  for (std::size_t i = 0; i < n; ++i)
    best[i] = kernels::sum_sq_diff(points.row(i), centroids.row(0), d);

  for (std::size_t c = 1; c < k; ++c) {
    real total = 0;
    for (const real v : best) total += v;
    std::size_t pick;
    if (total > 0) {
      const real r = static_cast<real>(rng.uniform()) * total;
      real cum = 0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best[i];
        if (r < cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    for (std::size_t j = 0; j < d; ++j) centroids(c, j) = points(pick, j);
    for (std::size_t i = 0; i < n; ++i) {
      const real v = kernels::sum_sq_diff(points.row(i), centroids.row(c), d);
      if (v < best[i]) best[i] = v;
    }
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg, Rng& rng) {
  const std::size_t n = points.rows(), d = points.cols();
  if (n == 0 || d == 0) throw DataError("kmeans needs a non-empty matrix");
  if (!all_finite(points)) throw DataError("non-finite values in kmeans input");
  if (cfg.k < 1) throw ConfigError("kmeans k must be >= 1");
  if (cfg.k > n) throw ConfigError("kmeans k must be <= the number of points");
  if (cfg.max_iter < 1) throw ConfigError("kmeans max_iter must be >= 1");
  if (!(cfg.tol >= 0)) throw ConfigError("kmeans tol must be >= 0");

  KMeansResult res;
  res.centroids = init_plusplus(points, cfg.k, rng);
  res.labels.assign(n, 0);
  Matrix d2(n, cfg.k);

  for (std::size_t iter = 1; iter <= cfg.max_iter; ++iter) {
    assign(points, res.centroids, d2, res.labels, res.inertia);

    Matrix next(cfg.k, d, 0);
    std::vector<std::size_t> count(cfg.k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[res.labels[i]];
      kernels::axpy(real(1), points.row(i), next.row(res.labels[i]), d);
    }
    for (std::size_t c = 0; c < cfg.k; ++c) {
      if (count[c] > 0) {
        const real inv = real(1) / static_cast<real>(count[c]);
        for (std::size_t j = 0; j < d; ++j) next(c, j) *= inv;
      } else {
        // Reseed an emptied cluster to the point farthest from its centroid.
        std::size_t far = 0;
        for (std::size_t i = 1; i < n; ++i)
          if (d2(i, c) > d2(far, c)) far = i;
        for (std::size_t j = 0; j < d; ++j) next(c, j) = points(far, j);
      }
    }

    real shift = 0;
    for (std::size_t c = 0; c < cfg.k; ++c)
      shift = std::max(shift, std::sqrt(kernels::sum_sq_diff(
                                  next.row(c), res.centroids.row(c), d)));
    res.centroids = std::move(next);
    res.iterations = iter;
    if (shift < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  assign(points, res.centroids, d2, res.labels, res.inertia);
  return res;
}

}  // namespace lsdc
