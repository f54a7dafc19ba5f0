#include "lsdc/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

void check_batch(const Matrix& f) {
  if (f.rows() < 2)
    throw DataError("pairwise labeling needs at least 2 samples");
  if (f.cols() == 0) throw DataError("features must have dimension >= 1");
  if (!all_finite(f)) throw DataError("non-finite values in features");
}

Matrix pairwise_sqdist(const Matrix& f) {
  Matrix d(f.rows(), f.rows());
  kernels::sqdist(f.data(), f.rows(), f.data(), f.rows(), f.cols(), d.data());
  return d;
}

Adjacency identity_adjacency(std::size_t n) {
  Adjacency a(n, n, 0);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = 1;
  return a;
}

}  // namespace

void validate(const SimilarityConfig& cfg) {
  switch (cfg.kind) {
    case SimilarityKind::L2:
      if (!(cfg.tau > 0)) throw ConfigError("similarity.tau must be > 0 for l2");
      break;
    case SimilarityKind::Cosine:
      if (!(cfg.tau > -1 && cfg.tau <= 1))
        throw ConfigError("similarity.tau must be in (-1, 1] for cosine");
      break;
    case SimilarityKind::Sne:
      if (!(cfg.tau > 0 && cfg.tau < 1))
        throw ConfigError("similarity.tau must be in (0, 1) for sne");
      if (!(cfg.temperature > 0))
        throw ConfigError("similarity.temperature must be > 0");
      break;
    case SimilarityKind::Knn:
      if (cfg.k < 1) throw ConfigError("similarity.k must be >= 1");
      break;
  }
}

Adjacency adjacency_l2(const Matrix& f, real tau) {
  check_batch(f);
  const std::size_t n = f.rows();
  const Matrix d = pairwise_sqdist(f);
  Adjacency a = identity_adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d(i, j) < tau) a(i, j) = a(j, i) = 1;  // tau thresholds the squared distance
  return a;
}

Adjacency adjacency_cosine(const Matrix& f, real tau) {
  check_batch(f);
  const std::size_t n = f.rows();
  std::vector<real> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    norm[i] = std::sqrt(kernels::dot(f.row(i), f.row(i), f.cols()));
    if (norm[i] == 0)
      throw DataError("zero-norm row " + std::to_string(i) +
                      " is invalid for cosine similarity");
  }
  Matrix g(n, n);
  kernels::gemm_nt(f.data(), n, f.data(), n, f.cols(), g.data());
  Adjacency a = identity_adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (g(i, j) / (norm[i] * norm[j]) > tau) a(i, j) = a(j, i) = 1;
  return a;
}

Adjacency adjacency_sne(const Matrix& f, real tau, real temperature) {
  check_batch(f);
  const std::size_t n = f.rows();
  const Matrix d = pairwise_sqdist(f);
  const real t2 = temperature * temperature;

  // Row-wise softmax over -d^2/T^2 with the max shifted out, so the
  // partition sums stay representable for any distance scale.
  Matrix e(n, n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    real m = -std::numeric_limits<real>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      m = std::max(m, -d(i, j) / t2);
    }
    if (!std::isfinite(m))
      throw DataError("similarity underflow: increase similarity.temperature");
    real zi = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      e(i, j) = std::exp(-d(i, j) / t2 - m);
      zi += e(i, j);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) e(i, j) /= zi;
  }

  Adjacency a = identity_adjacency(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (real(0.5) * (e(i, j) + e(j, i)) > tau) a(i, j) = a(j, i) = 1;
  return a;
}

Adjacency adjacency_knn(const Matrix& f, std::size_t k) {
  check_batch(f);
  const std::size_t n = f.rows();
  if (k < 1) throw ConfigError("similarity.k must be >= 1");
  if (k >= n)
    throw ConfigError("similarity.k must be smaller than the batch size");
  const Matrix d = pairwise_sqdist(f);

  Adjacency a = identity_adjacency(n);
  std::vector<std::size_t> order;
  order.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    // Ties broken by lower index: stable sort on distance alone.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return d(i, x) < d(i, y); });
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = order[r];
      a(i, j) = 1;
      a(j, i) = 1;  // union of directed edges keeps the matrix symmetric
    }
  }
  return a;
}

Adjacency build_adjacency(const SimilarityConfig& cfg, const Matrix& f) {
  switch (cfg.kind) {
    case SimilarityKind::L2:
      return adjacency_l2(f, cfg.tau);
    case SimilarityKind::Cosine:
      return adjacency_cosine(f, cfg.tau);
    case SimilarityKind::Sne:
      return adjacency_sne(f, cfg.tau, cfg.temperature);
    case SimilarityKind::Knn:
      return adjacency_knn(f, cfg.k);
  }
  throw ConfigError("unknown similarity kind");
}

std::size_t undirected_edge_count(const Adjacency& a) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0) ++count;
  return count;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_list(const Adjacency& a) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != 0)
        edges.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return edges;
}

void write_edge_list(const std::string& path, const Adjacency& a) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open output file: " + path);
  for (const auto& [i, j] : edge_list(a)) os << i << ' ' << j << '\n';
  if (!os) throw DataError("failed writing output file: " + path);
}

}  // namespace lsdc
