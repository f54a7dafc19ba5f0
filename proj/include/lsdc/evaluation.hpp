#pragma once

#include <string>
#include <vector>

#include "lsdc/types.hpp"

namespace lsdc {

// Minimum-cost assignment on a square cost matrix; returns, for each row,
// the assigned column. O(n^3) shortest augmenting path.
std::vector<std::size_t> hungarian(const Matrix& cost);

struct AccuracyResult {
  real acc = 0;
  std::vector<std::size_t> mapping;  // cluster id -> class id
};

// Hungarian-matched clustering accuracy. Cluster and class counts may
// differ; the contingency table is zero-padded to square.
AccuracyResult clustering_accuracy(const LabelVector& pred,
                                   const LabelVector& truth, std::size_t k);

// counts[mapped_pred][truth]; the diagonal sums to acc * N.
Mat<std::size_t> confusion(const LabelVector& pred, const LabelVector& truth,
                           const std::vector<std::size_t>& mapping,
                           std::size_t k);
void write_confusion_csv(const std::string& path, const Mat<std::size_t>& m);

// Indices whose max probability strictly exceeds the threshold.
std::vector<std::size_t> confident_subset(const Matrix& probs, real threshold);

LabelVector argmax_rows(const Matrix& probs);

}  // namespace lsdc
