#include "lsdc/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

namespace lsdc {

std::vector<std::size_t> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() == 0)
    throw DataError("assignment needs a non-empty square cost matrix");
  if (!all_finite(cost))
    throw DataError("assignment costs must be finite");
  const std::size_t n = cost.rows();
  const real inf = std::numeric_limits<real>::infinity();

  // Potentials with 1-based columns; p[j] is the row matched to column j.
  std::vector<real> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      real delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const real cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

AccuracyResult clustering_accuracy(const LabelVector& pred,
                                   const LabelVector& truth, std::size_t k) {
  if (pred.empty() || pred.size() != truth.size())
    throw DataError("prediction and truth labels must be non-empty and equal length");
  if (k < 1) throw ConfigError("cluster count must be >= 1");
  std::size_t k_true = 0;
  for (const std::uint32_t t : truth) k_true = std::max<std::size_t>(k_true, t + 1);
  for (const std::uint32_t c : pred)
    if (c >= k) throw DataError("cluster id out of range");

  const std::size_t s = std::max(k, k_true);
  Mat<std::size_t> counts(s, s, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) ++counts(pred[i], truth[i]);

  Matrix cost(s, s);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      cost(i, j) = -static_cast<real>(counts(i, j));
  const std::vector<std::size_t> assignment = hungarian(cost);

  std::size_t hits = 0;
  for (std::size_t i = 0; i < s; ++i) hits += counts(i, assignment[i]);

  AccuracyResult out;
  out.acc = static_cast<real>(hits) / static_cast<real>(pred.size());
  out.mapping.assign(assignment.begin(), assignment.begin() + static_cast<std::ptrdiff_t>(k));
  return out;
}

Mat<std::size_t> confusion(const LabelVector& pred, const LabelVector& truth,
                           const std::vector<std::size_t>& mapping,
                           std::size_t k) {
  if (pred.size() != truth.size())
    throw DataError("prediction and truth labels must have equal length");
  if (mapping.size() < k) throw DataError("mapping must cover all clusters");
  std::size_t s = k;
  for (const std::uint32_t t : truth) s = std::max<std::size_t>(s, t + 1);
  for (std::size_t c = 0; c < k; ++c) s = std::max(s, mapping[c] + 1);

  Mat<std::size_t> m(s, s, 0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] >= k) throw DataError("cluster id out of range");
    ++m(mapping[pred[i]], truth[i]);
  }
  return m;
}

void write_confusion_csv(const std::string& path, const Mat<std::size_t>& m) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open output file: " + path);
  os << "mapped_pred";
  for (std::size_t j = 0; j < m.cols(); ++j) os << ",true_" << j;
  os << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << "class_" << i;
    for (std::size_t j = 0; j < m.cols(); ++j) os << ',' << m(i, j);
    os << '\n';
  }
  if (!os) throw DataError("failed writing output file: " + path);
}

std::vector<std::size_t> confident_subset(const Matrix& probs, real threshold) {
  if (!(threshold >= 0 && threshold <= 1))
    throw ConfigError("confidence threshold must be in [0, 1]");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    real m = probs(i, 0);
    for (std::size_t j = 1; j < probs.cols(); ++j) m = std::max(m, probs(i, j));
    if (m > threshold) idx.push_back(i);
  }
  return idx;
}

LabelVector argmax_rows(const Matrix& probs) {
  LabelVector out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.cols(); ++j)
      if (probs(i, j) > probs(i, best)) best = j;  // ties keep the lower index
    out[i] = static_cast<std::uint32_t>(best);
  }
  return out;
}

}  // namespace lsdc
