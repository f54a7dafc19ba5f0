#include "lsdc/composition.hpp"

#include <cmath>
#include <numeric>

#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

// Marsaglia-Tsang for shape >= 1; the shape < 1 case is boosted from
// Gamma(shape + 1) by a power of an extra uniform.
double sample_gamma(double shape, Rng& rng) {
  if (shape < 1.0) {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

}  // namespace

real sample_beta(real alpha, real beta, Rng& rng) {
  if (!(alpha > 0) || !(beta > 0))
    throw ConfigError("beta distribution parameters must be > 0");
  const double x = sample_gamma(static_cast<double>(alpha), rng);
  const double y = sample_gamma(static_cast<double>(beta), rng);
  if (x + y <= 0.0) return real(0.5);
  real m = static_cast<real>(x / (x + y));
  // Rounding may land on an endpoint; the contract is the open interval.
  if (m <= 0) m = std::nextafter(real(0), real(1));
  if (m >= 1) m = std::nextafter(real(1), real(0));
  return m;
}

void validate(const CompositePlan& plan, std::size_t batch) {
  if (plan.perms.empty()) throw ConfigError("composite plan has no permutations");
  if (plan.weights.size() != plan.perms.size())
    throw ConfigError("composite plan weights must match permutations");
  std::vector<std::uint8_t> seen(batch);
  for (const auto& perm : plan.perms) {
    if (perm.size() != batch)
      throw ConfigError("composite permutation length must equal the batch size");
    std::fill(seen.begin(), seen.end(), 0);
    for (const std::uint32_t v : perm) {
      if (v >= batch || seen[v] != 0)
        throw ConfigError("composite plan entry is not a permutation");
      seen[v] = 1;
    }
  }
  real sum = 0;
  for (const real w : plan.weights) {
    if (!(w >= 0)) throw ConfigError("composite weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - real(1)) > real(1e-9))
    throw ConfigError("composite weights must sum to 1");
}

CompositePlan mixup_plan(std::size_t batch, real alpha, real beta, Rng& rng) {
  if (batch == 0) throw ConfigError("mixup needs a non-empty batch");
  const real m = sample_beta(alpha, beta, rng);
  CompositePlan plan;
  plan.perms.resize(2);
  plan.perms[0].resize(batch);
  std::iota(plan.perms[0].begin(), plan.perms[0].end(), 0);
  plan.perms[1] = plan.perms[0];
  rng.shuffle(plan.perms[1]);
  plan.weights = {m, 1 - m};
  return plan;
}

Matrix apply_plan(const Matrix& x, const CompositePlan& plan) {
  validate(plan, x.rows());
  Matrix out(x.rows(), x.cols(), 0);
  for (std::size_t s = 0; s < plan.perms.size(); ++s) {
    const real w = plan.weights[s];
    for (std::size_t i = 0; i < x.rows(); ++i)
      kernels::axpy(w, x.row(plan.perms[s][i]), out.row(i), x.cols());
  }
  return out;
}

Matrix composite_targets(const Adjacency& a, const CompositePlan& plan) {
  validate(plan, a.rows());
  Matrix t(a.rows(), a.cols(), 0);
  for (std::size_t s = 0; s < plan.perms.size(); ++s) {
    const real w = plan.weights[s];
    const auto& perm = plan.perms[s];
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        t(i, j) += w * static_cast<real>(a(i, perm[j]));
  }
  return t;
}

real composite_clustering_loss(const Matrix& p, const Matrix& q,
                               const Adjacency& a, const CompositePlan& plan) {
  return clustering_loss(p, q, composite_targets(a, plan));
}

}  // namespace lsdc
