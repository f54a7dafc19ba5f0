#include "lsdc/losses.hpp"

#include <cmath>

#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

void check_pair_shapes(const Matrix& p, const Matrix& q) {
  if (p.rows() == 0 || p.cols() == 0)
    throw DataError("probability matrix must be non-empty");
  if (p.rows() != q.rows() || p.cols() != q.cols())
    throw DataError("probability matrices must have matching shapes");
}

void check_targets(const Matrix& p, const Matrix& t) {
  if (t.rows() != p.rows() || t.cols() != p.rows())
    throw DataError("targets must be B x B for a batch of B samples");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!(t.data()[i] >= 0 && t.data()[i] <= 1))
      throw DataError("pair targets must lie in [0, 1]");
}

}  // namespace

namespace {

Matrix raw_agreement(const Matrix& p, const Matrix& q) {
  Matrix s(p.rows(), q.rows());
  kernels::gemm_nt(p.data(), p.rows(), q.data(), q.rows(), p.cols(), s.data());
  return s;
}

}  // namespace

Matrix pair_agreement(const Matrix& p, const Matrix& q) {
  check_pair_shapes(p, q);
  Matrix s = raw_agreement(p, q);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.data()[i] < kAgreementEps) s.data()[i] = kAgreementEps;
    if (s.data()[i] > 1 - kAgreementEps) s.data()[i] = 1 - kAgreementEps;
  }
  return s;
}

Matrix targets_from_adjacency(const Adjacency& a) {
  Matrix t(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i)
    t.data()[i] = static_cast<real>(a.data()[i]);
  return t;
}

real clustering_loss(const Matrix& p, const Matrix& q, const Matrix& targets) {
  check_pair_shapes(p, q);
  check_targets(p, targets);
  const std::size_t b = p.rows();
  const Matrix s = pair_agreement(p, q);
  real sum = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const real v = s.data()[i];
    const real t = targets.data()[i];
    sum += t * std::log(v) + (1 - t) * std::log(1 - v);
  }
  return -sum / static_cast<real>(b * b);
}

real clustering_loss(const Matrix& p, const Matrix& q, const Adjacency& a) {
  return clustering_loss(p, q, targets_from_adjacency(a));
}

LossValueGrad clustering_loss_grad(const Matrix& p, const Matrix& q,
                                   const Matrix& targets) {
  check_pair_shapes(p, q);
  check_targets(p, targets);
  const std::size_t b = p.rows(), k = p.cols();
  const Matrix s = raw_agreement(p, q);
  const real inv = real(1) / static_cast<real>(b * b);

  LossValueGrad out;
  Matrix ds(b, b);
  real sum = 0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) {
      const real raw = s(i, j);
      real v = raw;
      if (v < kAgreementEps) v = kAgreementEps;
      if (v > 1 - kAgreementEps) v = 1 - kAgreementEps;
      const real t = targets(i, j);
      sum += t * std::log(v) + (1 - t) * std::log(1 - v);
      // No gradient through the clamped side.
      if (raw < kAgreementEps || raw > 1 - kAgreementEps)
        ds(i, j) = 0;
      else
        ds(i, j) = -inv * (t / v - (1 - t) / (1 - v));
    }
  }
  out.value = -sum * inv;
  out.dp = Matrix(b, k, 0);
  out.dq = Matrix(b, k, 0);
  for (std::size_t i = 0; i < b; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      const real g = ds(i, j);
      if (g == 0) continue;
      kernels::axpy(g, q.row(j), out.dp.row(i), k);
      kernels::axpy(g, p.row(i), out.dq.row(j), k);
    }
  return out;
}

real consistency_loss(const Matrix& p, const Matrix& q, real omega) {
  check_pair_shapes(p, q);
  const real scale = omega / static_cast<real>(p.cols() * p.rows());
  return scale * kernels::sum_sq_diff(p.data(), q.data(), p.size());
}

LossValueGrad consistency_loss_grad(const Matrix& p, const Matrix& q,
                                    real omega) {
  check_pair_shapes(p, q);
  const real scale = omega / static_cast<real>(p.cols() * p.rows());
  LossValueGrad out;
  out.value = scale * kernels::sum_sq_diff(p.data(), q.data(), p.size());
  out.dp = Matrix(p.rows(), p.cols());
  out.dq = Matrix(p.rows(), p.cols());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const real d = 2 * scale * (p.data()[i] - q.data()[i]);
    out.dp.data()[i] = d;
    out.dq.data()[i] = -d;
  }
  return out;
}

real rampup_weight(const RampUp& r, long t) {
  if (r.lambda < 0) throw ConfigError("lambda must be >= 0");
  if (r.ramp_len < 1) throw ConfigError("ramp length must be >= 1");
  if (t < 0) throw ConfigError("step index must be >= 0");
  if (t >= r.ramp_len) return r.lambda;
  const real x = 1 - static_cast<real>(t) / static_cast<real>(r.ramp_len);
  return r.lambda * std::exp(real(-5) * x * x);
}

TotalLoss total_loss(const Matrix& p, const Matrix& q, const Matrix& targets,
                     real omega, bool mse_enabled) {
  TotalLoss out;
  LossValueGrad clus = clustering_loss_grad(p, q, targets);
  out.clustering = clus.value;
  out.dp = std::move(clus.dp);
  out.dq = std::move(clus.dq);
  if (mse_enabled) {
    const LossValueGrad cons = consistency_loss_grad(p, q, omega);
    out.consistency = cons.value;
    for (std::size_t i = 0; i < out.dp.size(); ++i) {
      out.dp.data()[i] += cons.dp.data()[i];
      out.dq.data()[i] += cons.dq.data()[i];
    }
  }
  out.total = out.clustering + out.consistency;
  return out;
}

}  // namespace lsdc
