#pragma once

#include <functional>
#include <vector>

#include "lsdc/losses.hpp"
#include "lsdc/rng.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

// A composite minibatch: x'_i = sum_s weights[s] * x[perms[s][i]], with
// weights summing to 1. Mixup is the two-permutation case with the first
// permutation equal to identity.
struct CompositePlan {
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<real> weights;
};

void validate(const CompositePlan& plan, std::size_t batch);

// Beta(alpha, beta) sample via two gamma draws (Marsaglia-Tsang).
real sample_beta(real alpha, real beta, Rng& rng);

// Identity + one random permutation, weights {m, 1-m} with m ~ Beta(a, b).
CompositePlan mixup_plan(std::size_t batch, real alpha, real beta, Rng& rng);

Matrix apply_plan(const Matrix& x, const CompositePlan& plan);

// t_ij = sum_s weights[s] * A[i][perms[s][j]].
Matrix composite_targets(const Adjacency& a, const CompositePlan& plan);

real composite_clustering_loss(const Matrix& p, const Matrix& q,
                               const Adjacency& a, const CompositePlan& plan);

// Supplies plans from outside the trainer (e.g. patch-composition schemes).
using PlanProvider =
    std::function<CompositePlan(std::size_t batch, long step, Rng& rng)>;

}  // namespace lsdc
