#pragma once

#include "lsdc/rng.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

struct KMeansConfig {
  std::size_t k = 2;
  std::size_t max_iter = 300;
  real tol = real(1e-6);  // max centroid shift (L2) that counts as converged
};

struct KMeansResult {
  Matrix centroids;    // k x d
  LabelVector labels;  // nearest centroid per point, ties to the lower index
  real inertia = 0;    // sum of squared distances to the assigned centroid
  std::size_t iterations = 0;
  bool converged = false;
};

// Lloyd iterations from k-means++ seeding. Empty clusters are reseeded to
// the point farthest from its assigned centroid.
KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg, Rng& rng);

}  // namespace lsdc
