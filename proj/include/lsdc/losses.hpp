#pragma once

#include "lsdc/adjacency.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

// Agreement clamp: pair probabilities are kept inside [eps, 1 - eps] before
// the logs, and gradients vanish on the clamped side.
inline constexpr real kAgreementEps = real(1e-7);

// s_ij = p_i . q_j for all pairs (B x B).
Matrix pair_agreement(const Matrix& p, const Matrix& q);

struct LossValueGrad {
  real value = 0;
  Matrix dp;  // dL/dp
  Matrix dq;  // dL/dq
};

// Mean over the B^2 pairs of BCE(target_ij, clamp(p_i . q_j)). Targets may be
// fractional (composite plans); a binary adjacency is converted on the fly.
real clustering_loss(const Matrix& p, const Matrix& q, const Matrix& targets);
real clustering_loss(const Matrix& p, const Matrix& q, const Adjacency& a);
LossValueGrad clustering_loss_grad(const Matrix& p, const Matrix& q,
                                   const Matrix& targets);

// omega/(K*B) * sum_i ||p_i - q_i||^2.
real consistency_loss(const Matrix& p, const Matrix& q, real omega);
LossValueGrad consistency_loss_grad(const Matrix& p, const Matrix& q, real omega);

struct RampUp {
  real lambda = 5;
  long ramp_len = 1;  // steps
};

// lambda * exp(-5 (1 - t/T)^2) for t < T, lambda afterwards.
real rampup_weight(const RampUp& r, long t);

struct TotalLoss {
  real clustering = 0;
  real consistency = 0;
  real total = 0;
  Matrix dp;
  Matrix dq;
};

TotalLoss total_loss(const Matrix& p, const Matrix& q, const Matrix& targets,
                     real omega, bool mse_enabled);

Matrix targets_from_adjacency(const Adjacency& a);

}  // namespace lsdc
