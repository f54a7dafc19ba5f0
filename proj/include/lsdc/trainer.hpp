#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lsdc/adjacency.hpp"
#include "lsdc/composition.hpp"
#include "lsdc/data.hpp"
#include "lsdc/head.hpp"
#include "lsdc/losses.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

enum class OptimizerKind { Sgd, Adam };
enum class CompositionKind { None, Mixup, ExternalPlan };

struct RunConfig {
  SimilarityConfig similarity;
  std::size_t k_clusters = 2;
  std::size_t epochs = 1;
  std::size_t batch_size = 256;

  OptimizerKind optimizer = OptimizerKind::Sgd;
  real lr_init = real(0.1);
  std::vector<std::size_t> lr_steps;  // epochs where lr is multiplied by the factor
  real lr_decay_factor = real(0.1);
  real momentum = real(0.9);
  real weight_decay = real(5e-4);
  real adam_beta1 = real(0.9);
  real adam_beta2 = real(0.999);
  real adam_eps = real(1e-8);

  real lambda = 5;
  std::size_t ramp_len_epochs = 50;
  bool mse_enabled = true;

  CompositionKind composition = CompositionKind::None;
  real beta_alpha = real(0.3);
  real beta_beta = real(0.3);

  AugmentMode augment_mode = AugmentMode::GaussianNoise;
  real augment_strength = real(0.1);

  HeadKind head_kind = HeadKind::Linear;
  std::size_t head_hidden = 128;

  bool backbone_enabled = false;
  std::size_t backbone_hidden = 16;
  std::size_t backbone_out = 0;  // 0 = input dimension

  std::uint64_t seed = 0;
};

void validate(const RunConfig& cfg);

struct Model {
  bool has_backbone = false;
  Backbone backbone;
  ClassifierHead head;
};

// Parameter draw order: backbone (l1 then l2) when enabled, then head.
Model make_model(const RunConfig& cfg, std::size_t in_dim, Rng& rng);

std::size_t model_input_dim(const Model& model);

// Features in the pairwise-labeling space (backbone output, or input as-is).
Matrix model_features(const Model& model, const Matrix& x);
Matrix model_logits(const Model& model, const Matrix& x);
Matrix model_probs(const Model& model, const Matrix& x);

struct EpochRecord {
  std::size_t epoch = 0;
  real lr = 0;
  real omega = 0;  // ramp-up weight at the last step of the epoch
  real loss_clus = 0;
  real loss_cons = 0;
  real loss_total = 0;
  std::optional<real> acc;
};

struct TrainReport {
  std::vector<EpochRecord> records;
  std::size_t steps_per_epoch = 0;
  long total_steps = 0;
  real first_step_clustering = 0;
  Model model;
};

TrainReport train(const Matrix& features, const RunConfig& cfg,
                  const LabelVector* labels = nullptr,
                  const PlanProvider* external_plan = nullptr);

// One record per line: epoch,lr,omega,loss_clus,loss_cons,loss_total[,acc].
void write_report(std::ostream& os, const TrainReport& report);
std::string report_string(const TrainReport& report);

real lr_at(const RunConfig& cfg, std::size_t epoch);
std::size_t steps_per_epoch(const RunConfig& cfg, std::size_t n_samples);

// g <- grad + wd*param; v <- momentum*v + g; param <- param - lr*v
void sgd_step(real* param, const real* grad, real* velocity, std::size_t n,
              real lr, real momentum, real weight_decay);

// Bias-corrected Adam, weight decay folded into the gradient; t starts at 1.
void adam_step(real* param, const real* grad, real* m, real* v, std::size_t n,
               long t, real lr, real beta1, real beta2, real eps,
               real weight_decay);

// Checkpoint container: magic "LSDH", shape header, f32 payload.
void save_model(const std::string& path, const Model& model);
Model load_model(const std::string& path);

}  // namespace lsdc
